from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from porient.exact_math import (
    HighPrecisionReal,
    IntPolynomial,
    binomial,
    get_precision,
    hp_exp,
    hp_log,
    hp_sqrt,
    pairings_count,
    refine_root_bisection,
    set_precision,
    sign_changes,
    taylor_shift_one,
    verify_root_bracket,
    xlogx,
)


def _all_matchings(points):
    """Independent oracle: generate every perfect matching explicitly."""
    if not points:
        yield ()
        return
    first = points[0]
    rest = points[1:]
    for i in range(len(rest)):
        other = rest[i]
        remaining = rest[:i] + rest[i + 1 :]
        for m in _all_matchings(remaining):
            yield ((first, other),) + m


def test_pairings_count_small_values():
    assert pairings_count(0) == 1
    assert pairings_count(1) == 1
    assert pairings_count(2) == 3
    assert pairings_count(6) == 10395


def test_pairings_count_matches_explicit_enumeration():
    for a in range(7):
        generated = list(_all_matchings(tuple(range(2 * a))))
        assert len(generated) == pairings_count(a)
        assert len(set(generated)) == len(generated)


def test_pairings_count_matches_recursive_oracle():
    # counting by where the first point goes: 2a-1 choices, then a smaller instance
    for a in range(1, 13):
        assert pairings_count(a) == (2 * a - 1) * pairings_count(a - 1)


def test_pairings_count_rejects_negative():
    with pytest.raises(ValueError):
        pairings_count(-1)


def test_binomial_values():
    assert binomial(6, 1) == 6
    assert binomial(8, 1) == 8
    assert binomial(13, 3) == 286
    assert binomial(8, 1) == 2**3


def test_binomial_outside_range_is_zero():
    assert binomial(5, -1) == 0
    assert binomial(5, 6) == 0
    assert binomial(-2, 0) == 0
    assert binomial(0, 0) == 1


@given(st.integers(0, 40), st.integers(0, 40))
def test_binomial_pascal_rule(n, k):
    assert binomial(n + 1, k + 1) == binomial(n, k) + binomial(n, k + 1)


def test_polynomial_normalization_trims_trailing_zeros():
    p = IntPolynomial((1, 2, 0, 0))
    assert p.coeffs == (1, 2)
    assert p.degree == 1
    assert IntPolynomial((0, 0)).is_zero()
    assert IntPolynomial(()).degree == -1


def test_polynomial_evaluation_is_exact():
    p = IntPolynomial((2, -3, 1))  # (x-1)(x-2)
    assert p(1) == 0
    assert p(2) == 0
    assert p(Fraction(1, 2)) == Fraction(3, 4)


def test_polynomial_ring_operations():
    p = IntPolynomial((1, 1))
    q = IntPolynomial((-1, 1))
    assert (p * q).coeffs == (-1, 0, 1)
    assert (p + q).coeffs == (0, 2)
    assert (p - p).is_zero()
    assert (3 * p).coeffs == (3, 3)
    assert p.shift_up(2).coeffs == (0, 0, 1, 1)
    assert p.of_square().coeffs == (1, 0, 1)
    assert IntPolynomial((4, 0, 2)).divexact(2).coeffs == (2, 0, 1)
    with pytest.raises(ValueError):
        IntPolynomial((3,)).divexact(2)


def test_polynomial_reciprocal():
    p = IntPolynomial((30, 6))
    assert p.reciprocal().coeffs == (6, 30)
    assert p.reciprocal(3).coeffs == (0, 0, 6, 30)
    assert IntPolynomial((0, 6)).valuation() == 1


def test_taylor_shift_one_basic():
    assert taylor_shift_one(IntPolynomial((-1, 1))).coeffs == (0, 1)
    assert taylor_shift_one(IntPolynomial((0, 0, 1))).coeffs == (1, 2, 1)
    assert taylor_shift_one(IntPolynomial((7,))).coeffs == (7,)


_coeff_lists = st.lists(st.integers(-9, 9), min_size=0, max_size=6)


@settings(max_examples=120)
@given(_coeff_lists, _coeff_lists)
def test_taylor_shift_one_is_ring_homomorphism(a, b):
    p = IntPolynomial(tuple(a))
    q = IntPolynomial(tuple(b))
    assert taylor_shift_one(p * q) == taylor_shift_one(p) * taylor_shift_one(q)
    assert taylor_shift_one(p + q) == taylor_shift_one(p) + taylor_shift_one(q)


@given(_coeff_lists, st.integers(-5, 5))
def test_taylor_shift_one_pointwise(a, x):
    p = IntPolynomial(tuple(a))
    assert taylor_shift_one(p)(x) == p(1 + x)


def test_sign_changes():
    assert sign_changes(IntPolynomial((-120, 24))) == 1
    assert sign_changes(IntPolynomial((1, 2, 3))) == 0
    assert sign_changes(IntPolynomial((2, -3, 1))) == 2
    assert sign_changes(IntPolynomial(())) == 0
    assert sign_changes(IntPolynomial((1, 0, -1))) == 1


@settings(max_examples=60)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=5))
def test_descartes_rule_on_products_of_linear_factors(roots):
    # build prod (x - r) with known integer roots, count the positive ones
    poly = IntPolynomial((1,))
    for r in roots:
        poly = poly * IntPolynomial((-r, 1))
    positive_roots = len({r for r in roots if r > 0})
    changes = sign_changes(poly)
    assert positive_roots <= changes
    multiplicity_total = sum(1 for r in roots if r > 0)
    assert (changes - multiplicity_total) % 2 == 0


def test_verify_root_bracket():
    p = IntPolynomial((-1, 1))
    assert verify_root_bracket(p, 0, 2)
    assert not verify_root_bracket(p, 2, 3)
    with pytest.raises(ValueError):
        verify_root_bracket(p, 2, 2)
    with pytest.raises(ValueError):
        verify_root_bracket(p, 3, 1)


def test_refine_root_bisection():
    p = IntPolynomial((-2, 0, 1))  # root sqrt(2)
    mid = refine_root_bisection(p, 1, 2, Fraction(1, 10**9))
    assert abs(float(mid) - math.sqrt(2)) < 1e-8
    exact = refine_root_bisection(IntPolynomial((-120, 24)), 4, 6)
    assert exact == 5


def test_hp_exact_integers_have_zero_error():
    x = HighPrecisionReal.exact(12)
    assert x.err == 0
    y = HighPrecisionReal.exact(Fraction(3, 8))
    assert y.err == 0
    z = HighPrecisionReal.exact(Fraction(1, 3))
    assert z.err > 0


def test_hp_log_is_exact_at_one():
    v = hp_log(Fraction(1))
    assert v.value == 0
    assert v.err == 0


def test_hp_sqrt_perfect_square_is_exact():
    v = hp_sqrt(Fraction(9, 4))
    assert v.value == 1.5
    assert v.err == 0


def test_hp_containment_of_exact_zero_quantities():
    a = hp_sqrt(2) * hp_sqrt(3) - hp_sqrt(6)
    assert abs(float(a.value)) <= float(a.err)
    b = hp_log(2) + hp_log(3) - hp_log(6)
    assert abs(float(b.value)) <= float(b.err)
    c = hp_exp(hp_log(Fraction(7, 5))) - Fraction(7, 5)
    assert abs(float(c.value)) <= float(c.err)


def _sample_expression():
    x = hp_log(Fraction(355, 113))
    y = hp_sqrt(Fraction(2, 7))
    return (x * y + Fraction(1, 3)) / (y + 2)


def test_hp_error_bound_contains_higher_precision_value():
    assert get_precision() == 128
    low = _sample_expression()
    set_precision(512)
    try:
        ref = _sample_expression()
    finally:
        set_precision(128)
    assert abs(low.value - ref.value) <= low.err


def test_hp_inequality_is_directional():
    a = HighPrecisionReal(1.0, 0.2)
    b = HighPrecisionReal(1.1, 0.2)
    assert not (a < b)
    assert not (b < a)
    assert a.overlaps(b)
    c = HighPrecisionReal(2.0, 0.1)
    assert a < c
    assert c > a
    assert not c.overlaps(a)


def test_hp_division_guards_zero_interval():
    denom = HighPrecisionReal(0.05, 0.1)
    with pytest.raises(ValueError):
        HighPrecisionReal.exact(1) / denom


def test_xlogx_boundary():
    assert xlogx(0).value == 0
    assert xlogx(1).value == 0
    v = xlogx(Fraction(1, 2))
    assert abs(float(v.value) - 0.5 * math.log(0.5)) < 1e-15
    with pytest.raises(ValueError):
        xlogx(-1)


def test_set_precision_rejects_tiny():
    with pytest.raises(ValueError):
        set_precision(8)
