"""Second-moment machinery for counting orientations with two-valued in-degrees.

The second moment of the orientation count decomposes over *class vectors*: a
cell (vertex) is classified by the overlap ``j`` between the two distinguished
point sets and by which side (in-degree ``p`` or ``d - p``) it lies on in each
of the two orientations.  This module provides the exact finite-``n`` terms
``J_n`` and their sum, the limiting exponent ``phi`` and amplitude ``psi`` on
the compact polytope ``K`` (coordinates: the side-overlap density ``z`` plus
``z[j, a, b]`` for ``1 <= j <= p``), the interior stationary point, exact
gradient and Hessian data there, the closed-form determinant, the Laplace-type
ratio that the series route must reproduce, the symmetry involution of ``K``,
and exact/batched uniform samplers over ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath
import numpy as np

from .exact_math import (
    HighPrecisionReal,
    binomial,
    get_precision,
    hp_log,
    hp_sqrt,
    pairings_count,
    xlogx,
)
from .moments import ParamPair, tau, tau_vector

__all__ = [
    "ALPHA_BETA",
    "KVector",
    "enumerate_kvectors",
    "AB_hat",
    "Jn_exact",
    "second_moment_exact_sum",
    "ZPoint",
    "kvector_to_zpoint",
    "z_star",
    "AB",
    "phi",
    "phi_star",
    "psi",
    "psi_star_squared_closed",
    "gradient_phi",
    "hessian_assembled",
    "fraction_matrix_det",
    "hessian_negative_definite",
    "hessian_det_closed",
    "laplace_ratio",
    "involution",
    "sample_K_exact",
    "sample_K_batch",
    "phi_batch",
]

# canonical order of the side classes (alpha, beta)
ALPHA_BETA: tuple[tuple[int, int], ...] = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class KVector:
    """Integer class-vector of a pair of orientations of one ``d``-regular graph.

    ``kab[j]`` counts cells with point-set overlap ``j`` whose sides are
    ``(alpha, beta)`` in the two orientations (side 0 = in-degree ``p``).  All
    four tuples have length ``p + 1`` (``j`` from 0 to ``p``).
    """

    n: int
    p: int
    k00: tuple[int, ...]
    k01: tuple[int, ...]
    k10: tuple[int, ...]
    k11: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 0 or self.n % 2 != 0:
            raise ValueError("n must be even and nonnegative")
        for name in ("k00", "k01", "k10", "k11"):
            t = getattr(self, name)
            if len(t) != self.p + 1:
                raise ValueError(f"{name} must have length p + 1 = {self.p + 1}")
            if any(c < 0 for c in t):
                raise ValueError(f"{name} has a negative count")
        if sum(self.k00) != sum(self.k11):
            raise ValueError("sum of k00 must equal sum of k11")
        if sum(self.k01) != sum(self.k10):
            raise ValueError("sum of k01 must equal sum of k10")
        if sum(self.k00) + sum(self.k01) != self.n // 2:
            raise ValueError("each side of the first orientation must hold n/2 cells")

    @property
    def k(self) -> int:
        return sum(self.k11)

    def count(self, j: int, alpha: int, beta: int) -> int:
        return getattr(self, f"k{alpha}{beta}")[j]

    def classes(self) -> Iterator[tuple[int, int, int, int]]:
        for j in range(self.p + 1):
            for a, b in ALPHA_BETA:
                yield j, a, b, self.count(j, a, b)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _composition_count(total: int, parts: int) -> int:
    return binomial(total + parts - 1, parts - 1)


def enumerate_kvectors(n: int, p: int, limit: int = 2_000_000) -> Iterator[KVector]:
    """Yield every class vector for ``n`` cells and overlap range ``0..p``."""
    if n % 2 != 0 or n < 0:
        raise ValueError("n must be even and nonnegative")
    half = n // 2
    est = sum(
        (_composition_count(k, p + 1) * _composition_count(half - k, p + 1)) ** 2
        for k in range(half + 1)
    )
    if est > limit:
        raise ValueError(f"{est} class vectors exceed the enumeration limit {limit}")
    for k in range(half + 1):
        for k00 in _compositions(k, p + 1):
            for k11 in _compositions(k, p + 1):
                for k01 in _compositions(half - k, p + 1):
                    for k10 in _compositions(half - k, p + 1):
                        yield KVector(n, p, k00, k01, k10, k11)


def AB_hat(kv: KVector, d: int) -> tuple[int, int]:
    """Point counts ``(A_hat, B_hat)``: pairs of half-edges that are heads in
    both orientations, and heads in exactly the first."""
    p, n = kv.p, kv.n
    drift = sum(
        j * (kv.k00[j] + kv.k11[j] - kv.k01[j] - kv.k10[j]) for j in range(p + 1)
    )
    a_hat = p * n + (d - 4 * p) * kv.k + drift
    b_hat = d * n // 2 - a_hat
    if a_hat < 0 or b_hat < 0:
        raise AssertionError("class vector yields a negative point count")
    return a_hat, b_hat


def Jn_exact(kv: KVector, d: int) -> Fraction:
    """Exact contribution of one class vector to the second moment."""
    pair = ParamPair(d, kv.p)
    a_hat, b_hat = AB_hat(kv, d)
    num = math.factorial(kv.n) * math.factorial(a_hat) * math.factorial(b_hat)
    den = pairings_count(d * kv.n // 2)
    for j, _, _, c in kv.classes():
        num *= tau(pair, j) ** c
        den *= math.factorial(c)
    return Fraction(num, den)


def second_moment_exact_sum(d: int, p: int, n: int) -> Fraction:
    """Exact second moment of the orientation count: the sum of ``Jn_exact``
    over every class vector.  Requires ``2p < d`` (two distinct sides)."""
    if not 0 < 2 * p < d:
        raise ValueError(f"need 0 < 2p < d, got p={p}, d={d}")
    return sum((Jn_exact(kv, d) for kv in enumerate_kvectors(n, p)), Fraction(0))


@dataclass(frozen=True)
class ZPoint:
    """A point of the polytope ``K``: overlap-density rows for ``j = 1..p``
    plus the side-overlap density ``z``; the ``j = 0`` coordinates are derived
    so each (alpha, beta) group sums to its budget (``z`` or ``1/2 - z``)."""

    z: Fraction
    rows: tuple[tuple[Fraction, Fraction, Fraction, Fraction], ...]

    @property
    def p(self) -> int:
        return len(self.rows)

    def group_sum(self, alpha: int, beta: int) -> Fraction:
        idx = ALPHA_BETA.index((alpha, beta))
        return sum((row[idx] for row in self.rows), Fraction(0))

    def budget(self, alpha: int, beta: int) -> Fraction:
        return self.z if alpha == beta else Fraction(1, 2) - self.z

    def coord(self, j: int, alpha: int, beta: int) -> Fraction:
        """Coordinate ``z[j, alpha, beta]``; ``j = 0`` is the derived slack."""
        idx = ALPHA_BETA.index((alpha, beta))
        if j == 0:
            return self.budget(alpha, beta) - self.group_sum(alpha, beta)
        return self.rows[j - 1][idx]

    def all_coords(self) -> list[Fraction]:
        """All ``4 (p + 1)`` class coordinates, ``j`` major, class order minor."""
        return [self.coord(j, a, b) for j in range(self.p + 1) for a, b in ALPHA_BETA]

    def free_coords(self) -> list[Fraction]:
        """The ``4p + 1`` independent coordinates: ``z`` then rows ``j = 1..p``."""
        out = [self.z]
        for row in self.rows:
            out.extend(row)
        return out

    def in_K(self) -> bool:
        if not Fraction(0) <= self.z <= Fraction(1, 2):
            return False
        return all(c >= 0 for c in self.all_coords())

    def is_interior(self) -> bool:
        if not Fraction(0) < self.z < Fraction(1, 2):
            return False
        return all(c > 0 for c in self.all_coords())


def zpoint_from_free(p: int, coords: Sequence[Fraction]) -> ZPoint:
    if len(coords) != 4 * p + 1:
        raise ValueError(f"need 4p + 1 = {4 * p + 1} coordinates")
    fr = [Fraction(c) for c in coords]
    rows = tuple(tuple(fr[1 + 4 * i : 5 + 4 * i]) for i in range(p))
    return ZPoint(fr[0], rows)  # type: ignore[arg-type]


def kvector_to_zpoint(kv: KVector) -> ZPoint:
    n = kv.n
    rows = tuple(
        tuple(Fraction(kv.count(j, a, b), n) for a, b in ALPHA_BETA)
        for j in range(1, kv.p + 1)
    )
    return ZPoint(Fraction(kv.k, n), rows)  # type: ignore[arg-type]


def z_star(pair: ParamPair) -> ZPoint:
    """The interior stationary point: ``z = 1/4`` and
    ``z[j, a, b] = tau_j / (4 C^2)`` with ``C = binomial(d, p)``."""
    c = binomial(pair.d, pair.p)
    rows = tuple(
        tuple(Fraction(tau(pair, j), 4 * c * c) for _ in ALPHA_BETA)
        for j in range(1, pair.p + 1)
    )
    return ZPoint(Fraction(1, 4), rows)  # type: ignore[arg-type]


def AB(point: ZPoint, pair: ParamPair) -> tuple[Fraction, Fraction]:
    """Densities ``(a, b)`` of both-heads and first-only-heads point pairs;
    ``a + b = d / 2``."""
    d, p = pair.d, pair.p
    if point.p != p:
        raise ValueError("point dimension does not match p")
    drift = sum(
        j * (point.coord(j, 0, 0) + point.coord(j, 1, 1)
             - point.coord(j, 0, 1) - point.coord(j, 1, 0))
        for j in range(1, p + 1)
    )
    a = p + (d - 4 * p) * point.z + drift
    return a, Fraction(d, 2) - a


def phi(point: ZPoint, pair: ParamPair) -> HighPrecisionReal:
    """Exponential growth rate of the second-moment terms at ``point``."""
    if not point.in_K():
        raise ValueError("point lies outside K")
    a, b = AB(point, pair)
    total = xlogx(a) + xlogx(b)
    for j in range(pair.p + 1):
        t = tau(pair, j)
        for al, be in ALPHA_BETA:
            zc = point.coord(j, al, be)
            total = total + zc * hp_log(Fraction(t)) - xlogx(zc)
    return total


def phi_star(pair: ParamPair) -> HighPrecisionReal:
    """Closed form of ``phi`` at the stationary point:
    ``(d/2) log(d/4) + 2 log(2 C)``."""
    d = pair.d
    c = binomial(d, pair.p)
    return hp_log(Fraction(d, 4)) * Fraction(d, 2) + hp_log(Fraction(4 * c * c))


def psi(point: ZPoint, pair: ParamPair) -> HighPrecisionReal:
    """Amplitude ``sqrt(a b / prod z[j, a, b])``; requires an interior point."""
    if not point.is_interior():
        raise ValueError("psi requires an interior point of K")
    a, b = AB(point, pair)
    prod = Fraction(1)
    for zc in point.all_coords():
        prod *= zc
    return hp_sqrt(a * b / prod)


def psi_star_squared_closed(pair: ParamPair) -> Fraction:
    """Exact value of ``psi(z_star)^2``: each of the ``p + 1`` overlap values
    contributes four identical coordinates to the product."""
    c = binomial(pair.d, pair.p)
    prod = Fraction(1)
    for t in tau_vector(pair):
        prod *= Fraction(t, 4 * c * c)
    return Fraction(pair.d, 4) ** 2 / prod ** 4


def _sign_exponent(alpha: int, beta: int) -> int:
    return 1 if (alpha + beta) % 2 == 0 else -1


def gradient_phi(point: ZPoint, pair: ParamPair) -> list[HighPrecisionReal]:
    """Exact-argument gradient of ``phi`` in the ``4p + 1`` free coordinates.

    Every component is the log of a single rational number, evaluated in high
    precision; at the stationary point each argument is exactly 1.
    """
    if not point.is_interior():
        raise ValueError("gradient requires an interior point of K")
    d, p = pair.d, pair.p
    a, b = AB(point, pair)
    ratio = a / b
    z0 = {(al, be): point.coord(0, al, be) for al, be in ALPHA_BETA}
    out = [
        hp_log(
            ratio ** (d - 4 * p)
            * z0[(0, 1)] * z0[(1, 0)] / (z0[(0, 0)] * z0[(1, 1)])
        )
    ]
    t0 = tau(pair, 0)
    for j in range(1, p + 1):
        tj = tau(pair, j)
        for al, be in ALPHA_BETA:
            arg = (
                ratio ** (j * _sign_exponent(al, be))
                * Fraction(tj, t0) * z0[(al, be)] / point.coord(j, al, be)
            )
            out.append(hp_log(arg))
    return out


def _free_index_data(d: int, p: int) -> tuple[list[int], list[tuple[int, int, int, int]]]:
    """Per free coordinate: the drift weight ``u`` and the 4-vector of
    derivatives of the derived ``j = 0`` coordinates (one entry per class)."""
    u = [d - 4 * p]
    g = [(1, -1, -1, 1)]
    for j in range(1, p + 1):
        for idx, (al, be) in enumerate(ALPHA_BETA):
            u.append(j * _sign_exponent(al, be))
            vec = [0, 0, 0, 0]
            vec[idx] = -1
            g.append(tuple(vec))  # type: ignore[arg-type]
    return u, g  # type: ignore[return-value]


def hessian_assembled(pair: ParamPair) -> list[list[Fraction]]:
    """Exact Hessian of ``phi`` at the stationary point, assembled from its
    rank-one and diagonal structure:
    ``H = (8/d) u u^T - (1/z0) G G^T - diag(1 / z*[j, a, b])``."""
    d, p = pair.d, pair.p
    c = binomial(d, p)
    u, g = _free_index_data(d, p)
    dim = 4 * p + 1
    z0 = Fraction(tau(pair, 0), 4 * c * c)
    h = [[Fraction(0)] * dim for _ in range(dim)]
    for x in range(dim):
        for y in range(dim):
            val = Fraction(8, d) * u[x] * u[y]
            val -= sum(g[x][t] * g[y][t] for t in range(4)) / z0
            h[x][y] = val
    idx = 1
    for j in range(1, p + 1):
        zj = Fraction(tau(pair, j), 4 * c * c)
        for _ in ALPHA_BETA:
            h[idx][idx] -= 1 / zj
            idx += 1
    return h


def fraction_matrix_det(mat: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by fraction-preserving Gaussian elimination."""
    n = len(mat)
    a = [list(map(Fraction, row)) for row in mat]
    det = Fraction(1)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            det = -det
        piv = a[col][col]
        det *= piv
        for r in range(col + 1, n):
            if a[r][col]:
                factor = a[r][col] / piv
                for cc in range(col, n):
                    a[r][cc] -= factor * a[col][cc]
    return det


def hessian_negative_definite(mat: Sequence[Sequence[Fraction]]) -> bool:
    """Exact test via the pivots of symmetric elimination: a symmetric matrix
    is negative definite iff every pivot is negative."""
    n = len(mat)
    a = [list(map(Fraction, row)) for row in mat]
    for col in range(n):
        piv = a[col][col]
        if piv >= 0:
            return False
        for r in range(col + 1, n):
            if a[r][col]:
                factor = a[r][col] / piv
                for cc in range(col, n):
                    a[r][cc] -= factor * a[col][cc]
    return True


def hessian_det_closed(pair: ParamPair) -> Fraction:
    """Exact closed form of ``det(-H)`` at the stationary point."""
    d, p = pair.d, pair.p
    c = binomial(d, p)
    e = d * d - 4 * d * p + 4 * p * p - d
    delta = d * d * (d - 1) - e * e
    prod = Fraction(1)
    for t in tau_vector(pair):
        prod *= Fraction(t) ** 4
    return Fraction(2 * c) ** (8 * (p + 1)) * delta / (32 * d * d * (d - 1) * prod)


def laplace_ratio(pair: ParamPair) -> HighPrecisionReal:
    """Laplace-method value of the second-moment ratio, assembled from the
    amplitude and determinant (pre-substitution route); equals
    ``d sqrt((d - 1) / Delta)``."""
    det = fraction_matrix_det([[-x for x in row] for row in hessian_assembled(pair)])
    if det <= 0:
        raise ValueError("stationary point is not a proper maximum")
    c = binomial(pair.d, pair.p)
    prod = Fraction(1)
    for t in tau_vector(pair):
        prod *= Fraction(t) ** 4
    return hp_sqrt(Fraction(2 * c) ** (8 * (pair.p + 1)) / (32 * det * prod))


def involution(point: ZPoint) -> ZPoint:
    """The measure-preserving symmetry of ``K``: flip the side of the second
    orientation (``beta -> 1 - beta``), sending ``z`` to ``1/2 - z``."""
    rows = tuple(
        (row[1], row[0], row[3], row[2])  # (00,01,10,11) -> (01,00,11,10)
        for row in point.rows
    )
    return ZPoint(Fraction(1, 2) - point.z, rows)


def sample_K_exact(pair: ParamPair, rng: np.random.Generator) -> ZPoint:
    """One exactly-represented uniform sample from ``K``.

    ``z`` is Beta(2p+1, 2p+1) scaled to ``[0, 1/2]`` (the volume of the slice
    through ``z`` is proportional to ``z^{2p} (1/2 - z)^{2p}``); given ``z``
    each (alpha, beta) group is an independent uniform point of its scaled
    simplex.  All draws are converted to exact dyadic fractions first, so the
    returned point lies in ``K`` exactly.
    """
    p = pair.p
    z = Fraction(float(rng.beta(2 * p + 1, 2 * p + 1))) / 2
    cols: list[list[Fraction]] = []
    for al, be in ALPHA_BETA:
        budget = z if al == be else Fraction(1, 2) - z
        raw = [Fraction(float(x)) for x in rng.exponential(size=p + 1)]
        total = sum(raw, Fraction(0))
        cols.append([budget * w / total for w in raw[:p]])
    rows = tuple(
        (cols[0][i], cols[1][i], cols[2][i], cols[3][i]) for i in range(p)
    )
    return ZPoint(z, rows)  # type: ignore[arg-type]


def sample_K_batch(
    pair: ParamPair, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Uniform samples from ``K`` as a float array of all class coordinates.

    Returns shape ``(count, 4 (p + 1))``; column ``4 j + t`` is ``z[j, a, b]``
    with ``(a, b) = ALPHA_BETA[t]``, including the derived ``j = 0`` slacks.
    """
    p = pair.p
    z = rng.beta(2 * p + 1, 2 * p + 1, size=count) / 2
    out = np.empty((count, 4 * (p + 1)))
    for t, (al, be) in enumerate(ALPHA_BETA):
        budget = z if al == be else 0.5 - z
        raw = rng.exponential(size=(count, p + 1))
        w = raw / raw.sum(axis=1, keepdims=True)
        coords = budget[:, None] * w
        out[:, t] = coords[:, p]  # j = 0 slack
        for j in range(1, p + 1):
            out[:, 4 * j + t] = coords[:, j - 1]
    return out


def phi_batch(coords: np.ndarray, pair: ParamPair) -> np.ndarray:
    """Vectorized ``phi`` over rows of class coordinates (as from
    :func:`sample_K_batch`)."""
    d, p = pair.d, pair.p
    if coords.shape[1] != 4 * (p + 1):
        raise ValueError("coordinate array has the wrong number of columns")

    def xlx(v: np.ndarray) -> np.ndarray:
        out = np.zeros_like(v)
        mask = v > 0
        out[mask] = v[mask] * np.log(v[mask])
        return out

    z = coords[:, 0::4].sum(axis=1) + coords[:, 3::4].sum(axis=1)
    z = z / 2  # both diagonal groups sum to z
    drift = np.zeros(len(coords))
    for j in range(1, p + 1):
        drift += j * (
            coords[:, 4 * j] + coords[:, 4 * j + 3]
            - coords[:, 4 * j + 1] - coords[:, 4 * j + 2]
        )
    a = p + (d - 4 * p) * z + drift
    b = d / 2 - a
    total = xlx(a) + xlx(b)
    taus = tau_vector(pair)
    for j in range(p + 1):
        logt = math.log(taus[j])
        for t in range(4):
            col = coords[:, 4 * j + t]
            total += col * logt - xlx(col)
    return total


def _phi_free_mp(free: Sequence, d: int, p: int):
    """``phi`` as an mpmath expression of the free coordinates, evaluated at
    the ambient working precision (for finite-difference checks)."""
    z = mpmath.mpf(free[0]) if not isinstance(free[0], mpmath.mpf) else free[0]
    rows = [[mpmath.mpf(x) for x in free[1 + 4 * i : 5 + 4 * i]] for i in range(p)]
    pair = ParamPair(d, p)
    taus = tau_vector(pair)

    def xlx(v):
        return v * mpmath.log(v) if v != 0 else mpmath.mpf(0)

    coords = []
    for t, (al, be) in enumerate(ALPHA_BETA):
        budget = z if al == be else mpmath.mpf(0.5) - z
        slack = budget - mpmath.fsum(rows[i][t] for i in range(p))
        coords.append((0, t, slack))
    for j in range(1, p + 1):
        for t in range(4):
            coords.append((j, t, rows[j - 1][t]))
    drift = mpmath.fsum(
        j * (row[0] + row[3] - row[1] - row[2]) for j, row in enumerate(rows, start=1)
    )
    a = p + (d - 4 * p) * z + drift
    b = mpmath.mpf(d) / 2 - a
    total = xlx(a) + xlx(b)
    for j, _, v in coords:
        total += v * mpmath.log(taus[j]) - xlx(v)
    return total
