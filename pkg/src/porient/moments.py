"""Moment formulas and classification for in-degree constrained orientations.

An orientation of a d-regular multigraph is admissible for parameter p when
every in-degree is either p or d - p. This module carries the exact expected
count of such orientations over the uniform pairing model, the short-cycle
correction constants, the small-subgraph-conditioning sum in closed form,
and the classifier that labels a parameter pair as affirmative, ruled out by
the first moment, ruled out by cut bounds, unknown, or infeasible.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .exact_math import (
    HighPrecisionReal,
    binomial,
    hp_sqrt,
    pairings_count,
)


@dataclass(frozen=True)
class ParamPair:
    """A degree/in-degree parameter pair (d, p)."""

    d: int
    p: int

    def __post_init__(self) -> None:
        if self.d < 3:
            raise ValueError("degree d must be at least 3")
        if self.p < 1:
            raise ValueError("parameter p must be at least 1")

    def canonical(self) -> "ParamPair":
        """Replace p by min(p, d - p); admissible orientations are unchanged."""
        if self.p >= self.d:
            raise ValueError("p >= d has no canonical form")
        return ParamPair(self.d, min(self.p, self.d - self.p))

    @property
    def is_eulerian(self) -> bool:
        return self.d == 2 * self.p


class ClassLabel(enum.Enum):
    AffirmativeY = "Y"
    NegativeN = "N"
    NegativeNstar = "N*"
    Unknown = "?"
    Infeasible = "-"

    @property
    def symbol(self) -> str:
        return self.value


@dataclass(frozen=True)
class MomentReport:
    pair: ParamPair
    growth_base: HighPrecisionReal
    lambdas: tuple[Fraction, ...]
    deltas: tuple[Fraction, ...]
    condition1: bool
    sscm_sum: HighPrecisionReal | None
    ratio: HighPrecisionReal | None
    label: ClassLabel


def _require_valid(pair: ParamPair) -> None:
    if not 1 <= pair.p <= pair.d - 1:
        raise ValueError(f"p must lie in 1..d-1, got {(pair.d, pair.p)}")


def tau(pair: ParamPair, j: int) -> int:
    """Number of ordered pairs of p-subsets of a d-set meeting in exactly j points.

    tau_j = C(d,p) * C(p,j) * C(d-p,p-j). The raw p is used; this quantity is
    not symmetric under p <-> d-p.
    """
    _require_valid(pair)
    if not 0 <= j <= pair.p:
        raise ValueError(f"j must lie in 0..p, got {j}")
    d, p = pair.d, pair.p
    return binomial(d, p) * binomial(p, j) * binomial(d - p, p - j)


def tau_vector(pair: ParamPair) -> tuple[int, ...]:
    return tuple(tau(pair, j) for j in range(pair.p + 1))


def hypergeom_identity(pair: ParamPair, s: int) -> tuple[int, int]:
    """Both sides of the falling-factorial overlap identity.

    Left: sum_j (j)_s * tau_j. Right: (p)_s * C(d,p) * C(d-s,p-s). The two are
    equal for every 0 <= s; when s > p both sides vanish.
    """
    _require_valid(pair)
    if s < 0:
        raise ValueError("s must be nonnegative")
    d, p = pair.d, pair.p
    lhs = sum(math.perm(j, s) * tau(pair, j) for j in range(p + 1) if j >= s)
    rhs = math.perm(p, s) * binomial(d, p) * binomial(d - s, p - s) if s <= p else 0
    return lhs, rhs


def lambda_i(d: int, i: int) -> Fraction:
    """Limiting mean number of i-cycles in the uniform pairing model."""
    if i < 1:
        raise ValueError("i must be at least 1")
    if d < 2:
        raise ValueError("d must be at least 2")
    return Fraction((d - 1) ** i, 2 * i)


def _delta_base(pair: ParamPair) -> Fraction:
    d, p = pair.d, pair.p
    return Fraction(-(d * d - 4 * d * p + 4 * p * p - d), d * (d - 1))


def delta_i(pair: ParamPair, i: int) -> Fraction:
    """Relative i-cycle bias of the orientation-weighted pairing measure."""
    _require_valid(pair)
    if i < 1:
        raise ValueError("i must be at least 1")
    return _delta_base(pair) ** i


def delta_via_cycle_sum(pair: ParamPair, i: int) -> Fraction:
    """Recompute delta_i from the unsimplified cycle-weight sum.

    Sums, over the number 2j of cycle cells whose two cycle points share their
    marked/unmarked status, the exact per-cell completion weights
    gamma_k = C(d-2, p-k), with the inner (s, t) sums left unexpanded. The
    result divided by lambda_i, minus one, must reproduce delta_i.
    """
    _require_valid(pair)
    if i < 1:
        raise ValueError("i must be at least 1")
    d, p = pair.d, pair.p
    g0 = Fraction(binomial(d - 2, p))
    g1 = Fraction(binomial(d - 2, p - 1))
    g2 = Fraction(binomial(d - 2, p - 2))
    total = Fraction(0)
    for j in range(i // 2 + 1):
        inner = Fraction(0)
        for s in range(j + 1):
            for t in range(j + 1):
                inner += (
                    binomial(j, s)
                    * binomial(j, t)
                    * g2 ** (s + t)
                    * g0 ** (2 * j - s - t)
                )
        total += binomial(i, 2 * j) * Fraction(1, 4) ** j * g1 ** (i - 2 * j) * inner
    cycle_mean = Fraction(1, i) * Fraction(2 * (d - 1), binomial(d, p)) ** i * total
    return cycle_mean / lambda_i(d, i) - 1


def expected_count_exact(pair: ParamPair, n: int) -> Fraction:
    """Exact expected number of admissible orientations over uniform pairings.

    Requires even n and 2p < d strictly; the balanced-split factor C(n, n/2)
    is wrong in the Eulerian case d = 2p, which needs no counting formula
    because an admissible orientation always exists there.
    """
    _require_valid(pair)
    d, p = pair.d, pair.p
    if 2 * p >= d:
        raise ValueError("expected_count_exact requires p < d/2")
    if n < 2 or n % 2:
        raise ValueError("n must be a positive even integer")
    m = d * n // 2
    numerator = binomial(n, n // 2) * binomial(d, p) ** n * math.factorial(m)
    return Fraction(numerator, pairings_count(m))


def admissible_orientation_total(pair: ParamPair, n: int) -> int:
    """Exact size of the set of (pairing, admissible orientation) pairs."""
    _require_valid(pair)
    d, p = pair.d, pair.p
    if n < 2 or n % 2:
        raise ValueError("n must be a positive even integer")
    m = d * n // 2
    if 2 * p == d:
        return binomial(d, p) ** n * math.factorial(m)
    return binomial(n, n // 2) * binomial(d, p) ** n * math.factorial(m)


def growth_base(pair: ParamPair) -> HighPrecisionReal:
    """Exponential growth base of the expected count: 2**(1 - d/2) * C(d, p).

    Returned with zero tracked error whenever the value is a dyadic rational
    (even d with the power of two dividing out, and the boundary case where
    the base is exactly 1).
    """
    _require_valid(pair)
    d, p = pair.d, pair.p
    c = binomial(d, p)
    return hp_sqrt(Fraction(4 * c * c, 2**d))


def first_moment_rules_out(pair: ParamPair) -> bool:
    """True when the expected count decays: C(d,p) <= 2**(d/2 - 1), exactly."""
    _require_valid(pair)
    c = binomial(pair.d, pair.p)
    return c * c <= 2 ** (pair.d - 2)


def first_moment_equality(pair: ParamPair) -> bool:
    """True when the growth base is exactly 1 (C(d,p)**2 == 2**(d-2))."""
    _require_valid(pair)
    c = binomial(pair.d, pair.p)
    return c * c == 2 ** (pair.d - 2)


def condition_one(pair: ParamPair) -> bool:
    """Variance-control condition: (d^2-4dp+4p^2-d)^2 < d^2 (d-1)."""
    _require_valid(pair)
    d, p = pair.d, pair.p
    e = d * d - 4 * d * p + 4 * p * p - d
    return e * e < d * d * (d - 1)


def sscm_sum_closed(pair: ParamPair) -> HighPrecisionReal:
    """Closed form of exp(sum_i lambda_i delta_i^2): d*sqrt((d-1)/Delta).

    Delta = d^2 (d-1) - (d^2-4dp+4p^2-d)^2 must be positive, which is exactly
    the variance-control condition.
    """
    _require_valid(pair)
    if not condition_one(pair):
        raise ValueError("the series diverges when the variance condition fails")
    d, p = pair.d, pair.p
    e = d * d - 4 * d * p + 4 * p * p - d
    delta = d * d * (d - 1) - e * e
    return HighPrecisionReal.exact(d) * hp_sqrt(Fraction(d - 1, delta))


def second_moment_ratio(pair: ParamPair) -> HighPrecisionReal:
    """Limit of E(Y^2)/E(Y)^2; coincides with the conditioning sum's closed form."""
    return sscm_sum_closed(pair)


def mu_r(pair: ParamPair, r: int) -> Fraction:
    """Limiting mean count of consistently oriented r-cycles: (2p(d-p)/d)^r / r."""
    _require_valid(pair)
    if r < 1:
        raise ValueError("r must be at least 1")
    d, p = pair.d, pair.p
    return Fraction(2 * p * (d - p), d) ** r / r


# Rigorous interpolation-method upper bounds on the bisection-width fraction of
# random d-regular graphs, for the degrees where they close the argument.
_CUT_BOUNDS: dict[int, Fraction] = {
    14: Fraction(7028, 10**4),
    15: Fraction(6965, 10**4),
    19: Fraction(6749, 10**4),
    20: Fraction(6703, 10**4),
}

_CLOSURE_SEEDS = {
    (3, 1),
    (4, 1),
    (5, 1),
    (9, 2),
    (6, 1),
    (10, 2),
    (13, 3),
    (14, 3),
    (17, 4),
}


def cut_bound_for_degree(d: int) -> Fraction | None:
    return _CUT_BOUNDS.get(d)


def _reachable(d: int, p: int) -> bool:
    """Walk the shift rule (d, p) <- (d-2, p-1) back to a settled base case."""
    while p >= 1:
        if (d, p) in _CLOSURE_SEEDS or d == 2 * p or d == 2 * p + 1:
            return True
        d -= 2
        p -= 1
    return False


def classify(pair: ParamPair) -> ClassLabel:
    """Label a parameter pair.

    Order of the rules matters and is covered by the table regression test:
    infeasible, Eulerian existence, exact first-moment exclusion, cut-bound
    exclusion for the four special degrees, affirmative closure intersected
    with the variance condition, otherwise unknown.
    """
    d, p = pair.d, pair.p
    if p >= d:
        return ClassLabel.Infeasible
    pc = min(p, d - p)
    canonical = ParamPair(d, pc)
    if d == 2 * pc:
        return ClassLabel.AffirmativeY
    if first_moment_rules_out(canonical):
        return ClassLabel.NegativeN
    bound = _CUT_BOUNDS.get(d)
    if bound is not None and Fraction(d - 2 * pc, d) > bound:
        return ClassLabel.NegativeNstar
    if _reachable(d, pc) and condition_one(canonical):
        return ClassLabel.AffirmativeY
    return ClassLabel.Unknown


def build_moment_report(pair: ParamPair, terms: int = 5) -> MomentReport:
    _require_valid(pair)
    canonical = pair.canonical()
    cond = condition_one(canonical)
    return MomentReport(
        pair=pair,
        growth_base=growth_base(canonical),
        lambdas=tuple(lambda_i(pair.d, i) for i in range(1, terms + 1)),
        deltas=tuple(delta_i(canonical, i) for i in range(1, terms + 1)),
        condition1=cond,
        sscm_sum=sscm_sum_closed(canonical) if cond else None,
        ratio=second_moment_ratio(canonical) if cond else None,
        label=classify(pair),
    )
