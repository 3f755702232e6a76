from __future__ import annotations

import io
from collections import Counter, defaultdict
from itertools import combinations

import numpy as np
import pytest

from porient.config_model import (
    CycleCensus,
    Multigraph,
    Pairing,
    cycle_census,
    enumerate_pairings,
    format_edge_list,
    is_simple,
    parse_edge_list,
    project,
    read_edge_list,
    sample_cycle_counts,
    sample_pairing,
    sample_pairings_batch,
    sample_simple_graph,
    write_edge_list,
)
from porient.exact_math import pairings_count


def _edge_subset_is_cycle(es: list[tuple[int, int]]) -> bool:
    """Independent predicate: does this edge multiset form a single cycle?"""
    k = len(es)
    if k == 1:
        return es[0][0] == es[0][1]
    if any(u == v for u, v in es):
        return False
    deg: Counter = Counter()
    for u, v in es:
        deg[u] += 1
        deg[v] += 1
    if len(deg) != k or any(c != 2 for c in deg.values()):
        return False
    # connectivity over the chosen edges
    adj = defaultdict(list)
    for i, (u, v) in enumerate(es):
        adj[u].append((v, i))
        adj[v].append((u, i))
    start = es[0][0]
    seen_v = {start}
    seen_e = set()
    stack = [start]
    while stack:
        x = stack.pop()
        for y, i in adj[x]:
            if i in seen_e:
                continue
            seen_e.add(i)
            if y not in seen_v:
                seen_v.add(y)
                stack.append(y)
    return len(seen_v) == k


def _census_by_edge_subsets(graph: Multigraph, kmax: int) -> CycleCensus:
    counts = [0] * kmax
    for k in range(1, kmax + 1):
        for subset in combinations(range(graph.m), k):
            if _edge_subset_is_cycle([graph.edges[i] for i in subset]):
                counts[k - 1] += 1
    return CycleCensus(tuple(counts))


def _k4() -> Multigraph:
    return Multigraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def test_pairing_validation():
    Pairing.from_pairs(4, [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        Pairing.from_pairs(4, [(0, 1), (1, 3)])
    with pytest.raises(ValueError):
        Pairing.from_pairs(4, [(0, 1)])
    p = Pairing.from_point_sequence([3, 1, 0, 2])
    assert p.pairs == ((0, 2), (1, 3))
    assert p.mates() == [2, 3, 0, 1]


def test_enumerate_pairings_counts():
    for size in (0, 2, 4, 6, 8, 10):
        got = sum(1 for _ in enumerate_pairings(size))
        assert got == pairings_count(size // 2)
    with pytest.raises(ValueError):
        next(enumerate_pairings(18))
    # no duplicates
    seen = {p.pairs for p in enumerate_pairings(6)}
    assert len(seen) == 15


def test_projection_and_loops():
    # two cells of size 2; both pairs internal -> two loops
    p = Pairing.from_pairs(4, [(0, 1), (2, 3)])
    g = project(p, 2)
    assert g.n == 2
    assert g.edges == ((0, 0), (1, 1))
    assert g.loop_count() == 2
    assert not is_simple(g)
    assert g.degrees() == [2, 2]


def test_projection_k4():
    p = Pairing.from_pairs(
        12, [(0, 3), (1, 6), (2, 9), (4, 7), (5, 10), (8, 11)]
    )
    g = project(p, 3)
    assert g == _k4()
    assert is_simple(g)
    assert g.is_regular(3)


def test_cycle_census_k4():
    c = cycle_census(_k4(), 4)
    assert c.counts == (0, 0, 4, 3)
    with pytest.raises(ValueError):
        c.count(5)


def test_cycle_census_multiedges():
    # double edge plus a loop on each endpoint
    g = Multigraph.from_edges(2, [(0, 1), (0, 1), (0, 0), (1, 1)])
    c = cycle_census(g, 3)
    assert c.counts == (2, 1, 0)
    # triangle with one doubled side: two triangles
    g2 = Multigraph.from_edges(3, [(0, 1), (0, 1), (0, 2), (1, 2)])
    assert cycle_census(g2, 3).counts == (0, 1, 2)


def test_cycle_census_matches_edge_subset_oracle():
    rng = np.random.default_rng(20240817)
    for _ in range(30):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(4, 9))
        if (d * n) % 2:
            n += 1
        g = project(sample_pairing(d, n, rng), d)
        assert cycle_census(g, 6) == _census_by_edge_subsets(g, 6)


def test_sample_pairing_is_valid_and_seeded():
    rng = np.random.default_rng(7)
    for d, n in [(3, 4), (4, 5), (2, 6)]:
        p = sample_pairing(d, n, rng)
        assert p.size == d * n
    a = sample_pairing(3, 10, np.random.default_rng(123))
    b = sample_pairing(3, 10, np.random.default_rng(123))
    assert a == b


def test_batched_rows_are_permutations():
    rows = sample_pairings_batch(3, 6, 40, np.random.default_rng(5))
    assert rows.shape == (40, 18)
    target = np.arange(18)
    for row in rows:
        assert np.array_equal(np.sort(row), target)


def test_batched_counts_match_scalar_census():
    d, n = 3, 6
    rows = sample_pairings_batch(d, n, 50, np.random.default_rng(99))
    counts = sample_cycle_counts(d, n, 50, np.random.default_rng(99))
    for i, row in enumerate(rows):
        g = project(Pairing.from_point_sequence(row.tolist()), d)
        c = cycle_census(g, 2)
        assert counts.x1[i] == c.count(1)
        assert counts.x2[i] == c.count(2)
        assert counts.simple[i] == is_simple(g)


def test_simple_fraction_smoke():
    # P(simple) tends to exp(-2) ~ 0.1353 for d = 3
    res = sample_cycle_counts(3, 40, 2000, np.random.default_rng(4242))
    frac = res.simple.mean()
    assert abs(frac - 0.1353) < 0.04


def test_sample_simple_graph():
    g, attempts = sample_simple_graph(3, 20, np.random.default_rng(11))
    assert is_simple(g)
    assert g.is_regular(3)
    assert attempts >= 1


def test_edge_list_round_trip():
    rng = np.random.default_rng(31)
    for _ in range(10):
        g = project(sample_pairing(3, 8, rng), 3)
        buf = io.StringIO()
        write_edge_list(g, buf)
        back = read_edge_list(io.StringIO(buf.getvalue()))
        assert back == g
        assert format_edge_list(back) == buf.getvalue()


def test_edge_list_parse_errors():
    with pytest.raises(ValueError, match="line 1"):
        parse_edge_list("")
    with pytest.raises(ValueError, match="line 1"):
        parse_edge_list("3\n0 1\n")
    with pytest.raises(ValueError, match="line 2"):
        parse_edge_list("3 1\n0 x\n")
    with pytest.raises(ValueError, match="line 3"):
        parse_edge_list("3 2\n0 1\n0 7\n")
    with pytest.raises(ValueError, match="declares 3"):
        parse_edge_list("3 3\n0 1\n1 2\n")
