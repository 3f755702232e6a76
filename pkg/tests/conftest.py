"""Shared helpers: high-precision finite-difference oracles for the exponent
``phi``, used to validate the closed-form gradient and Hessian independently.
"""

from __future__ import annotations

import mpmath

from porient.moments import ParamPair
from porient.second_moment import ZPoint, _phi_free_mp


def _free_mpf(point: ZPoint) -> list[mpmath.mpf]:
    return [
        mpmath.mpf(c.numerator) / c.denominator for c in point.free_coords()
    ]


def fd_gradient(point: ZPoint, pair: ParamPair, prec: int = 300) -> list[mpmath.mpf]:
    """Central-difference gradient of ``phi`` at an interior point."""
    with mpmath.workprec(prec):
        free = _free_mpf(point)
        h = mpmath.mpf(2) ** -45
        out = []
        for i in range(len(free)):
            up = list(free)
            dn = list(free)
            up[i] += h
            dn[i] -= h
            out.append(
                (_phi_free_mp(up, pair.d, pair.p) - _phi_free_mp(dn, pair.d, pair.p))
                / (2 * h)
            )
        return out


def fd_hessian(
    point: ZPoint, pair: ParamPair, rel_step: float = 1e-4, prec: int = 220
) -> list[list[mpmath.mpf]]:
    """Four-point cross finite-difference Hessian of ``phi``.

    Step ``h_i`` is relative to the coordinate value, so every probe stays
    interior; truncation error is quadratic in the relative step.
    """
    with mpmath.workprec(prec):
        free = _free_mpf(point)
        dim = len(free)
        hs = [abs(x) * mpmath.mpf(rel_step) for x in free]

        def at(delta: dict[int, mpmath.mpf]) -> mpmath.mpf:
            probe = list(free)
            for idx, dv in delta.items():
                probe[idx] += dv
            return _phi_free_mp(probe, pair.d, pair.p)

        out = [[mpmath.mpf(0)] * dim for _ in range(dim)]
        for i in range(dim):
            for j in range(i, dim):
                pp = at({i: hs[i], j: hs[j]} if i != j else {i: 2 * hs[i]})
                mm = at({i: -hs[i], j: -hs[j]} if i != j else {i: -2 * hs[i]})
                if i == j:
                    mid = at({})
                    val = (pp - 2 * mid + mm) / (4 * hs[i] * hs[i])
                else:
                    pm = at({i: hs[i], j: -hs[j]})
                    mp_ = at({i: -hs[i], j: hs[j]})
                    val = (pp - pm - mp_ + mm) / (4 * hs[i] * hs[j])
                out[i][j] = out[j][i] = val
        return out
