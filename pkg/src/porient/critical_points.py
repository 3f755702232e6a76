"""Certificates locating the maxima of the second-moment exponent ``phi``.

The stationary structure of ``phi`` on the polytope ``K`` reduces to a family
of integer polynomials built from the overlap weights ``tau_j``:

* ``f`` certifies that the interior stationary point is the unique interior
  critical point (its shift by 1 has nonnegative coefficients and zero
  constant term, and it is antireciprocal, so ``w = 1`` is its only positive
  root);
* ``g`` locates the unique critical point of ``phi`` restricted to the face
  ``z = 0`` (a one-parameter curve), bracketed between rationals;
* ``N = theta2 * theta - theta1^2`` (nonnegative coefficients) bounds the
  derivative of the restricted exponent, turning a mean-value estimate over
  the bracket into a sound upper bound for the whole face;
* the corner value gap ``log(C 2^(1 - d/2))`` covers the face endpoints.

Everything is exact: polynomial identities over the integers, rational
evaluations, and interval-tracked logarithms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exact_math import (
    HighPrecisionReal,
    IntPolynomial,
    binomial,
    hp_log,
    refine_root_bisection,
    sign_changes,
    taylor_shift_one,
    xlogx,
)
from .moments import ParamPair, tau_vector
from .second_moment import ZPoint, phi, phi_star, sample_K_exact

__all__ = [
    "ThetaFamily",
    "theta_family",
    "build_f",
    "build_f_parts",
    "build_g",
    "n_polynomial",
    "is_antireciprocal",
    "reduced_f",
    "interior_uniqueness",
    "curve_z",
    "interior_param",
    "boundary_param",
    "phi0",
    "phi_tilde",
    "phi_tilde_prime",
    "derivative_bound",
    "boundary_bracket",
    "BoundaryReport",
    "boundary_max_check",
    "boundary_escape_check",
    "corner_check",
    "AppendixCertificate",
    "certificate",
]


@dataclass(frozen=True)
class ThetaFamily:
    """Generating polynomials of the overlap weights ``tau_j``.

    ``theta``  has coefficients ``tau_m``;
    ``theta1`` has ``m tau_m`` (that is ``x theta'``);
    ``theta2`` has ``m^2 tau_m``;
    ``eta``    has ``tau_(p-m)`` (the reverse of ``theta``);
    ``eta1``   has ``(p-m) tau_(p-m)`` (the degree-``p`` reverse of ``theta1``).
    """

    theta: IntPolynomial
    theta1: IntPolynomial
    theta2: IntPolynomial
    eta: IntPolynomial
    eta1: IntPolynomial


def theta_family(pair: ParamPair) -> ThetaFamily:
    taus = tau_vector(pair)
    p = pair.p
    return ThetaFamily(
        theta=IntPolynomial(tuple(taus)),
        theta1=IntPolynomial(tuple(m * t for m, t in enumerate(taus))),
        theta2=IntPolynomial(tuple(m * m * t for m, t in enumerate(taus))),
        eta=IntPolynomial(tuple(reversed(taus))),
        eta1=IntPolynomial(tuple((p - m) * taus[p - m] for m in range(p + 1))),
    )


def build_f_parts(pair: ParamPair) -> tuple[IntPolynomial, IntPolynomial]:
    """The two halves of ``f`` as polynomials in ``y``:
    ``f1 = (-4y - 4) theta1 + (4p y + 4p - 2d) theta`` and
    ``f2 = (4y + 4) eta1 + ((2d - 4p) y - 4p) eta``;
    ``-f1`` is the degree-``p+1`` reciprocal of ``f2``."""
    d, p = pair.d, pair.p
    th = theta_family(pair)
    f1 = IntPolynomial((-4, -4)) * th.theta1 + IntPolynomial((4 * p - 2 * d, 4 * p)) * th.theta
    f2 = IntPolynomial((4, 4)) * th.eta1 + IntPolynomial((-4 * p, 2 * d - 4 * p)) * th.eta
    return f1, f2


def build_f(pair: ParamPair) -> IntPolynomial:
    """The interior-criticality polynomial in ``w`` (where ``y = w^2``):
    ``f(w) = w^(d - 2p) f1(w^2) + f2(w^2)``.
    Requires ``d > 2p``; vanishes at ``w = 1``."""
    d, p = pair.d, pair.p
    if d <= 2 * p:
        raise ValueError(f"need d > 2p, got d={d}, p={p}")
    f1, f2 = build_f_parts(pair)
    return f1.of_square().shift_up(d - 2 * p) + f2.of_square()


def build_g(pair: ParamPair) -> IntPolynomial:
    """Criticality polynomial of ``phi`` restricted to the face ``z = 0``:
    ``g = 2 (p theta - theta1)(1 + x) - d theta``; its positive roots are the
    critical parameters of the face curve."""
    th = theta_family(pair)
    p, d = pair.p, pair.d
    return (p * th.theta - th.theta1) * IntPolynomial((2, 2)) - d * th.theta


def n_polynomial(pair: ParamPair) -> IntPolynomial:
    """``N = theta2 theta - theta1^2``; its coefficients are nonnegative, so it
    is monotone on the positive axis."""
    th = theta_family(pair)
    return th.theta2 * th.theta - th.theta1 * th.theta1


def is_antireciprocal(poly: IntPolynomial) -> bool:
    """True iff, after removing the factor ``x^valuation``, the coefficient
    list reversed equals its own negation."""
    if poly.is_zero():
        return True
    val = poly.valuation()
    coeffs = poly.coeffs[val:]
    deg = len(coeffs) - 1
    return all(coeffs[i] == -coeffs[deg - i] for i in range(len(coeffs)))


def reduced_f(pair: ParamPair) -> tuple[int, IntPolynomial]:
    """``(content, f / content)``: the interior-criticality polynomial divided
    by the gcd of its coefficients."""
    import math

    f = build_f(pair)
    content = 0
    for c in f.coeffs:
        content = math.gcd(content, abs(c))
    content = max(content, 1)
    return content, f.divexact(content)


def interior_uniqueness(pair: ParamPair) -> bool:
    """Certificate that ``w = 1`` is the only positive root of ``f``.

    Checks that ``f`` is antireciprocal and that ``f(1 + x)`` has zero
    constant term and nonnegative coefficients (so ``f > 0`` beyond 1, and by
    antireciprocity ``f < 0`` below 1)."""
    _, f = reduced_f(pair)
    if not is_antireciprocal(f):
        return False
    shifted = taylor_shift_one(f)
    if shifted.is_zero() or shifted.coeffs[0] != 0:
        return False
    return all(c >= 0 for c in shifted.coeffs)


def curve_z(pair: ParamPair, w: Fraction) -> Fraction:
    """The ``z`` value on the interior critical curve at parameter ``w``
    (``y = w^2``): ``z = 1 / (2 (1 + Q))`` with
    ``Q = y^(-(d - 4p)/2) theta(1/y) / theta(y)``."""
    w = Fraction(w)
    if w <= 0:
        raise ValueError("w must be positive")
    d, p = pair.d, pair.p
    th = theta_family(pair)
    y = w * w
    q = th.eta(y) / (w ** (d - 4 * p) * y**p * th.theta(y))
    return 1 / (2 * (1 + q))


def interior_param(pair: ParamPair, y: Fraction, z: Fraction) -> ZPoint:
    """Point of the interior critical curve family:
    ``z[j,0,0] = z[j,1,1] = tau_j z y^j / theta(y)`` and
    ``z[j,0,1] = z[j,1,0] = tau_j (1 - 2z) y^(p-j) / (2 eta(y))``.
    At ``y = 1, z = 1/4`` this is the stationary point."""
    y, z = Fraction(y), Fraction(z)
    if y <= 0:
        raise ValueError("y must be positive")
    if not Fraction(0) <= z <= Fraction(1, 2):
        raise ValueError("z must lie in [0, 1/2]")
    taus = tau_vector(pair)
    p = pair.p
    th = theta_family(pair)
    ty, ey = th.theta(y), th.eta(y)
    rows = tuple(
        (
            taus[j] * z * y**j / ty,
            taus[j] * (1 - 2 * z) * y ** (p - j) / (2 * ey),
            taus[j] * (1 - 2 * z) * y ** (p - j) / (2 * ey),
            taus[j] * z * y**j / ty,
        )
        for j in range(1, p + 1)
    )
    return ZPoint(z, rows)


def boundary_param(pair: ParamPair, x: Fraction) -> ZPoint:
    """Point of the critical curve of the face ``z = 0``:
    ``z[j,0,1] = z[j,1,0] = tau_j x^j / (2 theta(x))`` and zero elsewhere."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    taus = tau_vector(pair)
    th = theta_family(pair)
    tx = th.theta(x)
    rows = tuple(
        (
            Fraction(0),
            taus[j] * x**j / (2 * tx),
            taus[j] * x**j / (2 * tx),
            Fraction(0),
        )
        for j in range(1, pair.p + 1)
    )
    return ZPoint(Fraction(0), rows)


def phi0(point: ZPoint, pair: ParamPair) -> HighPrecisionReal:
    """The exponent restricted to the face ``z = 0`` (all diagonal overlap
    coordinates zero), evaluated at a point of that face."""
    if point.z != 0:
        raise ValueError("phi0 is defined on the face z = 0")
    for j in range(1, len(point.rows) + 1):
        if point.coord(j, 0, 0) != 0 or point.coord(j, 1, 1) != 0:
            raise ValueError("phi0 needs all diagonal coordinates zero")
    return phi(point, pair)


def _a_tilde(pair: ParamPair, x: Fraction) -> Fraction:
    th = theta_family(pair)
    return pair.p - Fraction(th.theta1(x), 1) / th.theta(x)


def phi_tilde(pair: ParamPair, x: Fraction) -> HighPrecisionReal:
    """``phi`` restricted to the face curve at parameter ``x``:
    ``a log a + b log b - (theta1/theta) log x + log(2 theta)`` with
    ``a = p - theta1(x)/theta(x)`` and ``b = d/2 - a``."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    th = theta_family(pair)
    a = _a_tilde(pair, x)
    b = Fraction(pair.d, 2) - a
    if a < 0 or b < 0:
        raise ValueError("curve parameter leaves the admissible range")
    ratio = Fraction(th.theta1(x), 1) / th.theta(x)
    return (
        xlogx(a)
        + xlogx(b)
        - hp_log(x) * ratio
        + hp_log(2 * Fraction(th.theta(x)))
    )


def phi_tilde_prime(pair: ParamPair, x: Fraction) -> HighPrecisionReal:
    """Derivative of the restricted exponent:
    ``- N(x) / (x theta(x)^2) * log(a x / b)``.  Requires ``a, b > 0``."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    a = _a_tilde(pair, x)
    b = Fraction(pair.d, 2) - a
    if a <= 0 or b <= 0:
        raise ValueError("curve parameter leaves the admissible range")
    th = theta_family(pair)
    pref = Fraction(n_polynomial(pair)(x), 1) / (x * Fraction(th.theta(x)) ** 2)
    return hp_log(a * x / b) * (-pref)


def _hp_upper_max(a: HighPrecisionReal, b: HighPrecisionReal) -> HighPrecisionReal:
    """An interval dominating the upper endpoints of both arguments (only the
    upper side is meaningful; used for sound suprema of bounds)."""
    value = a.value if a.value >= b.value else b.value
    err = a.err if a.err >= b.err else b.err
    return HighPrecisionReal(value, err)


def derivative_bound(
    pair: ParamPair, lo: Fraction, hi: Fraction, depth: int = 6
) -> HighPrecisionReal:
    """Sound upper bound for ``|phi_tilde'|`` on ``[lo, hi]``.

    ``N`` and ``theta`` have nonnegative coefficients, so
    ``N(x)/(x theta(x)^2) <= N(hi) / (lo theta(lo)^2)`` on the interval, and
    the log factor is bounded by interval arithmetic on the monotone envelope
    of ``a``; the interval is subdivided ``depth`` times for tightness."""
    lo, hi = Fraction(lo), Fraction(hi)
    if not 0 < lo <= hi:
        raise ValueError("need 0 < lo <= hi")
    th = theta_family(pair)
    npoly = n_polynomial(pair)
    half_d = Fraction(pair.d, 2)

    def leaf(a0: Fraction, a1: Fraction) -> HighPrecisionReal:
        u = Fraction(npoly(a1), 1) / (a0 * Fraction(th.theta(a0)) ** 2)
        a_lo = pair.p - Fraction(th.theta1(a1), 1) / th.theta(a0)
        a_hi = pair.p - Fraction(th.theta1(a0), 1) / th.theta(a1)
        if a_lo <= 0:
            raise ValueError("interval bound needs a > 0; shrink the bracket")
        r_lo = a_lo * a0 / (half_d - a_lo)
        r_hi = a_hi * a1 / (half_d - a_hi)
        m = _hp_upper_max(abs(hp_log(r_lo)), abs(hp_log(r_hi)))
        return m * u

    def rec(a0: Fraction, a1: Fraction, k: int) -> HighPrecisionReal:
        if k == 0:
            return leaf(a0, a1)
        mid = (a0 + a1) / 2
        return _hp_upper_max(rec(a0, mid, k - 1), rec(mid, a1, k - 1))

    return rec(lo, hi, depth)


# Stored brackets for the boundary-critical parameter.  For (6, 1) the
# critical parameter is exactly 5 (g(5) = 0), so the bracket degenerates.
_BOUNDARY_BRACKETS: dict[tuple[int, int], tuple[Fraction, Fraction]] = {
    (6, 1): (Fraction(5), Fraction(5)),
    (10, 2): (Fraction(3), Fraction(16, 5)),
    (13, 3): (Fraction(5, 2), Fraction(8, 3)),
    (14, 3): (Fraction(25, 9), Fraction(26, 9)),
    (17, 4): (Fraction(7, 3), Fraction(5, 2)),
}


def boundary_bracket(pair: ParamPair) -> tuple[Fraction, Fraction]:
    """Rational bracket ``(lo, hi)`` containing the face-critical parameter.
    Stored for the certified pairs; found by scan and bisection otherwise."""
    key = (pair.d, pair.p)
    if key in _BOUNDARY_BRACKETS:
        return _BOUNDARY_BRACKETS[key]
    g = build_g(pair)
    x = 1
    while g(Fraction(x)) <= 0:
        x += 1
        if x > 10_000:
            raise ValueError("no sign change of g found")
    lo, hi = Fraction(x - 1), Fraction(x)
    if g(lo) == 0:
        return lo, lo
    while hi - lo > Fraction(1, 8):
        mid = (lo + hi) / 2
        v = g(mid)
        if v == 0:
            return mid, mid
        if v < 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


@dataclass(frozen=True)
class BoundaryReport:
    """Outcome of the face-maximum certificate.

    Sub-checks: ``check_descartes`` (g has one coefficient sign change, so a
    unique positive root), ``check_bracket`` (g changes sign across the
    stored bracket), ``check_derivative`` (the interval bound for
    ``|phi_tilde'|`` on the bracket is below 1), ``check_value``
    (``phi_tilde(lo) + (hi - lo)`` is provably below the interior stationary
    value).  ``critical_parameter`` and ``critical_value`` report the refined
    root location; they carry no certifying weight beyond the bracket."""

    pair: ParamPair
    lo: Fraction
    hi: Fraction
    g_lo: Fraction
    g_hi: Fraction
    descartes_changes: int
    anchor_value: HighPrecisionReal
    derivative_bound: HighPrecisionReal
    sup_bound: HighPrecisionReal
    interior_value: HighPrecisionReal
    critical_parameter: Fraction
    critical_value: HighPrecisionReal
    check_descartes: bool
    check_bracket: bool
    check_derivative: bool
    check_value: bool

    @property
    def passed(self) -> bool:
        return (
            self.check_descartes
            and self.check_bracket
            and self.check_derivative
            and self.check_value
        )

    def failed_checks(self) -> list[str]:
        return [
            name
            for name, ok in (
                ("descartes", self.check_descartes),
                ("bracket", self.check_bracket),
                ("derivative", self.check_derivative),
                ("value", self.check_value),
            )
            if not ok
        ]


def boundary_max_check(pair: ParamPair) -> BoundaryReport:
    """Certify that the maximum of ``phi`` over the face ``z = 0`` lies
    strictly below the interior stationary value.

    The face maximum sits at the unique critical parameter inside the
    bracket; by the mean value theorem with ``|phi_tilde'| < 1`` there, it is
    below ``phi_tilde(lo) + (hi - lo)``, which is compared against
    ``phi(z*)`` in tracked-error arithmetic."""
    g = build_g(pair)
    lo, hi = boundary_bracket(pair)
    value = phi_tilde(pair, lo)
    exact_root = lo == hi
    if exact_root:
        bound = HighPrecisionReal.zero()  # lo is the exact root
        sup = value
        root = lo
    else:
        bound = derivative_bound(pair, lo, hi)
        sup = value + (hi - lo)
        root = refine_root_bisection(g, lo, hi)
    top = phi_star(pair)
    return BoundaryReport(
        pair=pair,
        lo=lo,
        hi=hi,
        g_lo=Fraction(g(lo), 1),
        g_hi=Fraction(g(hi), 1),
        descartes_changes=sign_changes(g),
        anchor_value=value,
        derivative_bound=bound,
        sup_bound=sup,
        interior_value=top,
        critical_parameter=root,
        critical_value=phi_tilde(pair, root),
        check_descartes=sign_changes(g) == 1,
        check_bracket=(g(lo) == 0 if exact_root else g(lo) < 0 < g(hi)),
        check_derivative=bool(bound.definitely_less_than(1)),
        check_value=bool(sup.definitely_less_than(top)),
    )


def boundary_escape_check(pair: ParamPair, rng, samples: int = 100) -> bool:
    """Sampled check that no point of the face boundary with vanished
    coordinates is a local maximum: at boundary points (some coordinates set
    to zero, ``z`` kept inside (0.05, 0.45)) the exponent strictly increases
    along an inward direction supported on the vanished coordinates, for
    steps 1e-4 and 1e-3."""
    p = pair.p
    eps_steps = (Fraction(1, 10_000), Fraction(1, 1_000))
    cells = [(j, a, b) for j in range(1, p + 1) for (a, b) in ((0, 1), (1, 0), (0, 0), (1, 1))]
    done = 0
    while done < samples:
        point = sample_K_exact(pair, rng)
        if not Fraction(1, 20) < point.z < Fraction(9, 20):
            continue
        # vanish a random nonempty subset of the j >= 1 coordinates (their
        # group slack absorbs the mass, so the point stays in K)
        n_kill = int(rng.integers(1, len(cells) + 1))
        picks = rng.choice(len(cells), size=n_kill, replace=False)
        killed = {cells[int(i)] for i in picks}
        rows = tuple(
            tuple(
                Fraction(0) if (j, a, b) in killed else point.coord(j, a, b)
                for (a, b) in ((0, 0), (0, 1), (1, 0), (1, 1))
            )
            for j in range(1, p + 1)
        )
        base = ZPoint(point.z, rows)
        moved_points = []
        for eps in eps_steps:
            moved_rows = tuple(
                tuple(
                    base.coord(j, a, b) + (eps if (j, a, b) in killed else 0)
                    for (a, b) in ((0, 0), (0, 1), (1, 0), (1, 1))
                )
                for j in range(1, p + 1)
            )
            moved_points.append(ZPoint(base.z, moved_rows))
        if not all(m.in_K() for m in moved_points):
            continue  # step left the polytope: draw a fresh sample
        base_val = phi(base, pair)
        for moved in moved_points:
            if not phi(moved, pair).definitely_greater_than(base_val):
                return False
        done += 1
    return True


def corner_check(pair: ParamPair) -> HighPrecisionReal:
    """Gap ``phi(z*) - phi(corner) = log(C 2^(1 - d/2))`` at the fully
    correlated corner of ``K``; exactly zero for (8, 1), positive whenever
    the growth base exceeds 1."""
    c = binomial(pair.d, pair.p)
    return hp_log(Fraction(4 * c * c, 2**pair.d)) * Fraction(1, 2)


@dataclass(frozen=True)
class AppendixCertificate:
    """Full certificate bundle for one parameter pair.

    ``escape_ok`` is None when the sampled escape check was not run (it needs
    a random generator); the deterministic parts alone decide ``passed``,
    except that a run-and-failed escape check also fails the bundle.
    """

    pair: ParamPair
    f_content: int
    shifted_f: IntPolynomial
    interior_unique: bool
    antireciprocal: bool
    boundary: BoundaryReport
    corner_gap: HighPrecisionReal
    escape_ok: Optional[bool]

    @property
    def passed(self) -> bool:
        return (
            self.interior_unique
            and self.antireciprocal
            and self.boundary.passed
            and self.corner_gap.value >= 0
            and self.escape_ok is not False
        )

    def to_text(self) -> str:
        b = self.boundary
        lines = [
            f"pair: d={self.pair.d} p={self.pair.p}",
            f"f content: {self.f_content}",
            f"shifted f coefficients (ascending): {list(self.shifted_f.coeffs)}",
            f"interior uniqueness: {self.interior_unique}",
            f"antireciprocal: {self.antireciprocal}",
            f"face bracket: [{b.lo}, {b.hi}]",
            f"g at bracket: {b.g_lo} .. {b.g_hi}",
            f"g sign changes: {b.descartes_changes}",
            f"face critical parameter (refined): {b.critical_parameter}",
            f"face value at critical parameter: {b.critical_value.to_decimal(12)}",
            f"face value at bracket low end: {b.anchor_value.to_decimal(12)}",
            f"face derivative bound: {b.derivative_bound.to_decimal(6)}",
            f"face supremum bound: {b.sup_bound.to_decimal(12)}",
            f"interior value: {b.interior_value.to_decimal(12)}",
            f"face checks failed: {b.failed_checks() or 'none'}",
            f"face below interior: {b.passed}",
            f"corner gap: {self.corner_gap.to_decimal(12)}",
            f"escape check: {'skipped' if self.escape_ok is None else self.escape_ok}",
            f"certificate passed: {self.passed}",
        ]
        return "\n".join(lines)


def certificate(pair: ParamPair, rng=None, escape_samples: int = 100) -> AppendixCertificate:
    content, f = reduced_f(pair)
    return AppendixCertificate(
        pair=pair,
        f_content=content,
        shifted_f=taylor_shift_one(f),
        interior_unique=interior_uniqueness(pair),
        antireciprocal=is_antireciprocal(f),
        boundary=boundary_max_check(pair),
        corner_gap=corner_check(pair),
        escape_ok=(
            None if rng is None else boundary_escape_check(pair, rng, escape_samples)
        ),
    )
