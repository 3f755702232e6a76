from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from porient.exact_math import HighPrecisionReal, hp_log
from porient.moments import (
    ClassLabel,
    ParamPair,
    admissible_orientation_total,
    build_moment_report,
    classify,
    condition_one,
    cut_bound_for_degree,
    delta_i,
    delta_via_cycle_sum,
    expected_count_exact,
    first_moment_equality,
    first_moment_rules_out,
    growth_base,
    hypergeom_identity,
    lambda_i,
    mu_r,
    second_moment_ratio,
    sscm_sum_closed,
    tau,
    tau_vector,
)

# The published classification grid for d = 3..20 and p = 1..4, used as the
# regression target for classify(). "-" marks p >= d.
TABLE_ROWS = {
    1: "Y Y Y Y ? N N N N N N N N N N N N N",
    2: "Y Y Y Y Y Y Y Y ? ? ? N* N* N N N N N",
    3: "- Y Y Y Y Y Y Y Y Y Y Y ? ? ? ? N* N*",
    4: "- - Y Y Y Y Y Y Y Y Y Y Y Y Y ? ? ?",
}


def _tau_bruteforce(d: int, p: int, j: int) -> int:
    sets = list(combinations(range(d), p))
    return sum(1 for a in sets for b in sets if len(set(a) & set(b)) == j)


def test_param_pair_validation():
    with pytest.raises(ValueError):
        ParamPair(2, 1)
    with pytest.raises(ValueError):
        ParamPair(5, 0)
    assert ParamPair(6, 4).canonical() == ParamPair(6, 2)
    assert ParamPair(4, 2).is_eulerian
    assert not ParamPair(5, 2).is_eulerian


def test_tau_values():
    assert tau(ParamPair(6, 1), 0) == 30
    assert tau(ParamPair(6, 1), 1) == 6
    assert tau(ParamPair(4, 2), 2) == 6
    assert sum(tau_vector(ParamPair(13, 3))) == 81796
    assert sum(tau_vector(ParamPair(13, 3))) == 286**2


def test_tau_matches_subset_enumeration():
    for d in range(3, 8):
        for p in range(1, d):
            for j in range(p + 1):
                assert tau(ParamPair(d, p), j) == _tau_bruteforce(d, p, j)


def test_tau_rejects_bad_overlap():
    with pytest.raises(ValueError):
        tau(ParamPair(6, 1), 2)
    with pytest.raises(ValueError):
        tau(ParamPair(6, 1), -1)
    with pytest.raises(ValueError):
        tau(ParamPair(6, 6), 0)


def test_tau_is_not_symmetric_in_p():
    assert tau_vector(ParamPair(7, 2)) != tau_vector(ParamPair(7, 5))


def test_hypergeom_identity_examples():
    lhs, rhs = hypergeom_identity(ParamPair(6, 1), 1)
    assert lhs == rhs == 6
    assert hypergeom_identity(ParamPair(6, 1), 2) == (0, 0)
    lhs, rhs = hypergeom_identity(ParamPair(6, 1), 0)
    assert lhs == rhs == 36


def test_hypergeom_identity_sweep():
    for d in range(3, 13):
        for p in range(1, d):
            for s in range(p + 2):
                lhs, rhs = hypergeom_identity(ParamPair(d, p), s)
                assert lhs == rhs


@settings(max_examples=80)
@given(st.integers(3, 24), st.data())
def test_hypergeom_identity_random(d, data):
    p = data.draw(st.integers(1, d - 1))
    s = data.draw(st.integers(0, p))
    lhs, rhs = hypergeom_identity(ParamPair(d, p), s)
    assert lhs == rhs


def test_lambda_values():
    assert lambda_i(5, 1) == 2
    assert lambda_i(3, 2) == 1
    assert lambda_i(13, 3) == 288
    with pytest.raises(ValueError):
        lambda_i(5, 0)


def test_delta_values():
    assert delta_i(ParamPair(5, 1), 1) == Fraction(-1, 5)
    assert delta_i(ParamPair(4, 2), 1) == Fraction(1, 3)
    assert delta_i(ParamPair(13, 3), 1) == Fraction(-3, 13)
    for p in (2, 3, 4):
        for i in (1, 2, 3):
            assert delta_i(ParamPair(2 * p, p), i) == Fraction(1, 2 * p - 1) ** i


def test_delta_symmetric_under_complement():
    for d in range(3, 12):
        for p in range(1, d):
            assert delta_i(ParamPair(d, p), 2) == delta_i(ParamPair(d, d - p), 2)


def test_delta_magnitude_below_one():
    for d in range(3, 21):
        for p in range(1, d):
            assert abs(delta_i(ParamPair(d, p), 1)) < 1


def test_delta_via_cycle_sum_matches_closed_form():
    for d in range(3, 9):
        for p in range(1, d):
            for i in range(1, 7):
                pair = ParamPair(d, p)
                assert delta_via_cycle_sum(pair, i) == delta_i(pair, i)


def test_expected_count_exact_small_value():
    assert expected_count_exact(ParamPair(3, 1), 2) == Fraction(36, 5)
    assert admissible_orientation_total(ParamPair(3, 1), 2) == 108


def test_expected_count_exact_guards():
    with pytest.raises(ValueError):
        expected_count_exact(ParamPair(3, 1), 3)
    with pytest.raises(ValueError):
        expected_count_exact(ParamPair(4, 2), 2)
    with pytest.raises(ValueError):
        expected_count_exact(ParamPair(5, 2), 0)


def test_expected_count_growth_trend():
    # for the boundary pair the expected count tends to sqrt(d)
    d, p, n = 8, 1, 10**6
    m = d * n // 2
    log_pairings = math.lgamma(2 * m + 1) - math.lgamma(m + 1) - m * math.log(2)
    log_count = (
        math.lgamma(n + 1)
        - 2 * math.lgamma(n / 2 + 1)
        + n * math.log(8)
        + math.lgamma(m + 1)
        - log_pairings
    )
    assert abs(log_count - 0.5 * math.log(8)) < 1e-3


def test_growth_base_values():
    b = growth_base(ParamPair(6, 1))
    assert b.value == 1.5
    assert b.err == 0
    one = growth_base(ParamPair(8, 1))
    assert one.value == 1
    assert one.err == 0
    assert growth_base(ParamPair(16, 2)) < 1


def test_growth_base_equality_unique_up_to_64():
    hits = [
        (d, p)
        for d in range(4, 65)
        for p in range(1, (d + 1) // 2 + 1)
        if p < d and first_moment_equality(ParamPair(d, p))
    ]
    assert hits == [(8, 1)]


def test_condition_one():
    assert condition_one(ParamPair(6, 1))
    assert condition_one(ParamPair(13, 3))
    assert not condition_one(ParamPair(8, 1))
    assert not condition_one(ParamPair(7, 1))


def test_sscm_sum_closed_values():
    v = sscm_sum_closed(ParamPair(13, 3))
    assert abs(float(v.value) - 13 / math.sqrt(61)) < 1e-15
    w = sscm_sum_closed(ParamPair(4, 2))
    assert abs(float(w.value) - math.sqrt(1.5)) < 1e-15
    r = second_moment_ratio(ParamPair(6, 1))
    assert r.value == 1.5
    with pytest.raises(ValueError):
        sscm_sum_closed(ParamPair(8, 1))


def test_sscm_partial_sums_converge_to_closed_form():
    pair = ParamPair(13, 3)
    d = pair.d
    base = delta_i(pair, 1)
    partial = Fraction(0)
    for i in range(1, 201):
        partial += lambda_i(d, i) * base ** (2 * i)
    e = d * d - 4 * d * pair.p + 4 * pair.p**2 - d
    delta = d * d * (d - 1) - e * e
    closed_log = hp_log(Fraction(d * d * (d - 1), delta)) * Fraction(1, 2)
    diff = closed_log - HighPrecisionReal.exact(partial)
    assert abs(float(diff.value)) < 1e-20


def test_ratio_equals_sscm_across_condition_pairs():
    for d in range(3, 21):
        for p in range(1, d):
            pair = ParamPair(d, p)
            if not condition_one(pair):
                continue
            a = sscm_sum_closed(pair)
            b = second_moment_ratio(pair)
            assert abs(float(a.value - b.value)) < 1e-30


def test_mu_values():
    assert mu_r(ParamPair(8, 1), 1) == Fraction(7, 4)
    assert mu_r(ParamPair(8, 1), 2) == Fraction(49, 32)
    assert mu_r(ParamPair(4, 2), 1) == 2


def test_classify_reproduces_published_table():
    for p, row in TABLE_ROWS.items():
        cells = row.split()
        for d, expected in zip(range(3, 21), cells):
            got = classify(ParamPair(d, p)).symbol
            assert got == expected, f"(d={d}, p={p}): expected {expected}, got {got}"


def test_classify_rule_order():
    # exact first-moment exclusion takes precedence over the cut bounds
    assert classify(ParamPair(19, 2)) is ClassLabel.NegativeN
    assert classify(ParamPair(20, 2)) is ClassLabel.NegativeN
    assert classify(ParamPair(19, 3)) is ClassLabel.NegativeNstar
    assert classify(ParamPair(8, 1)) is ClassLabel.NegativeN
    assert first_moment_equality(ParamPair(8, 1))
    assert not first_moment_equality(ParamPair(9, 1))
    assert classify(ParamPair(3, 3)) is ClassLabel.Infeasible
    assert classify(ParamPair(4, 3)) is ClassLabel.AffirmativeY


def test_classify_affirmative_cases_satisfy_condition_one():
    for d in range(3, 21):
        for p in range(1, min(d, 5)):
            pair = ParamPair(d, p)
            if classify(pair) is ClassLabel.AffirmativeY and not pair.canonical().is_eulerian:
                assert condition_one(pair.canonical())


def test_cut_bound_lookup():
    assert cut_bound_for_degree(14) == Fraction(7028, 10000)
    assert cut_bound_for_degree(12) is None
    assert first_moment_rules_out(ParamPair(16, 2))
    assert not first_moment_rules_out(ParamPair(14, 2))


def test_moment_report():
    rep = build_moment_report(ParamPair(13, 3), terms=4)
    assert rep.condition1
    assert len(rep.lambdas) == 4
    assert rep.deltas[0] == Fraction(-3, 13)
    assert rep.label is ClassLabel.AffirmativeY
    rep81 = build_moment_report(ParamPair(8, 1))
    assert not rep81.condition1
    assert rep81.sscm_sum is None
    assert rep81.label is ClassLabel.NegativeN
