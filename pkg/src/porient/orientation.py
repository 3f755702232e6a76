"""Orientations of regular multigraphs with two-valued in-degrees.

An orientation assigns a head endpoint to every edge; it is admissible for
parameter ``p`` when every in-degree is ``p`` or ``d - p`` (a loop contributes
exactly 1 to its vertex's in-degree).  This module provides exact counting by
pruned search, existence decisions (max-flow over candidate bisections, plus a
randomized local-search heuristic), oriented pairings at the half-edge level
(where the two head choices of a loop are distinct), uniform sampling from the
set of admissible oriented pairings, directed cycle censuses, and the class
vector of a pair of orientations used by the second-moment machinery.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Optional, Sequence

import numpy as np

from .bisection import Bisection
from .config_model import CycleCensus, Multigraph, Pairing
from .second_moment import KVector

__all__ = [
    "Orientation",
    "OrientedPairing",
    "OrientationWitness",
    "PairClassVector",
    "indegrees",
    "is_p_orientation",
    "induced_bisection",
    "count_bruteforce",
    "count_oriented_bruteforce",
    "enumerate_admissible_head_choices",
    "feasible_with_targets",
    "exists_exact",
    "exists_heuristic",
    "dual",
    "flip_edges",
    "directed_cycle_census",
    "sample_oriented_pairing",
    "sample_oriented_pairings_batch",
    "GammaCycleSample",
    "sample_gamma_cycle_counts",
    "pair_class_vector",
]

# The class vector of a pair of orientations is the KVector of the
# second-moment machinery.
PairClassVector = KVector


@dataclass(frozen=True)
class Orientation:
    """Heads of a multigraph's edges: ``heads[i]`` is the head endpoint of
    ``graph.edges[i]`` (for a loop, the vertex itself)."""

    heads: tuple[int, ...]


@dataclass(frozen=True)
class OrientationWitness:
    """Evidence that an orientation exists: the orientation itself plus the
    bisection it induces (``None`` in the Eulerian case ``d == 2p``)."""

    bisection: Optional[Bisection]
    orientation: Orientation


def _regular_degree(graph: Multigraph) -> int:
    degs = graph.degrees()
    if not degs or any(x != degs[0] for x in degs):
        raise ValueError("graph must be regular with at least one vertex")
    return degs[0]


def _check_heads(graph: Multigraph, orientation: Orientation) -> None:
    if len(orientation.heads) != graph.m:
        raise ValueError("orientation length does not match edge count")
    for (u, v), h in zip(graph.edges, orientation.heads):
        if h != u and h != v:
            raise ValueError(f"head {h} is not an endpoint of edge ({u}, {v})")


def indegrees(graph: Multigraph, orientation: Orientation) -> list[int]:
    _check_heads(graph, orientation)
    indeg = [0] * graph.n
    for h in orientation.heads:
        indeg[h] += 1
    return indeg


def is_p_orientation(graph: Multigraph, orientation: Orientation, p: int) -> bool:
    d = _regular_degree(graph)
    if not 0 < p < d:
        raise ValueError(f"need 0 < p < d, got p={p}, d={d}")
    allowed = {p, d - p}
    return all(x in allowed for x in indegrees(graph, orientation))


def induced_bisection(
    graph: Multigraph, orientation: Orientation, p: int
) -> Optional[Bisection]:
    """The bisection induced by an admissible orientation: side ``u`` holds the
    vertices of in-degree ``min(p, d-p)``.  ``None`` when ``d == 2p``."""
    d = _regular_degree(graph)
    if not is_p_orientation(graph, orientation, p):
        raise ValueError("orientation is not admissible for this p")
    pc = min(p, d - p)
    if 2 * pc == d:
        return None
    indeg = indegrees(graph, orientation)
    u = frozenset(v for v in range(graph.n) if indeg[v] == pc)
    w = frozenset(v for v in range(graph.n) if indeg[v] == d - pc)
    return Bisection(u, w)


def count_bruteforce(graph: Multigraph, p: int) -> int:
    """Exact number of admissible orientations of the multigraph, by pruned
    search over edge head choices (loops have a single choice).  Limited to
    ``m <= 24`` edges."""
    d = _regular_degree(graph)
    if not 0 < p < d:
        raise ValueError(f"need 0 < p < d, got p={p}, d={d}")
    m = graph.m
    if m > 24:
        raise ValueError(f"brute-force counting limited to 24 edges, got {m}")
    lo, hi = min(p, d - p), max(p, d - p)
    n = graph.n
    indeg = [0] * n
    rem = [0] * n  # in-degree units still assignable to each vertex
    for u, v in graph.edges:
        if u == v:
            rem[u] += 1
        else:
            rem[u] += 1
            rem[v] += 1

    def ok(v: int) -> bool:
        i, r = indeg[v], rem[v]
        return (i <= lo <= i + r) or (i <= hi <= i + r)

    edges = graph.edges

    def rec(idx: int) -> int:
        if idx == m:
            return 1
        u, v = edges[idx]
        total = 0
        if u == v:
            rem[u] -= 1
            indeg[u] += 1
            if ok(u):
                total = rec(idx + 1)
            indeg[u] -= 1
            rem[u] += 1
            return total
        rem[u] -= 1
        rem[v] -= 1
        for head, other in ((u, v), (v, u)):
            indeg[head] += 1
            if ok(head) and ok(other):
                total += rec(idx + 1)
            indeg[head] -= 1
        rem[u] += 1
        rem[v] += 1
        return total

    return rec(0)


@dataclass(frozen=True)
class OrientedPairing:
    """A pairing with one point of each pair designated as the head.

    ``head_points[i]`` must be an element of ``pairing.pairs[i]``.  The two
    head choices of a pair lying inside one cell (a loop) are distinct
    oriented pairings even though they orient the multigraph identically.
    """

    pairing: Pairing
    head_points: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.head_points) != len(self.pairing.pairs):
            raise ValueError("one head point per pair is required")
        for (a, b), h in zip(self.pairing.pairs, self.head_points):
            if h != a and h != b:
                raise ValueError(f"head point {h} is not in pair ({a}, {b})")

    def head_set(self) -> frozenset[int]:
        return frozenset(self.head_points)

    def cell_indegrees(self, d: int) -> list[int]:
        if self.pairing.size % d != 0:
            raise ValueError("point count is not a multiple of d")
        indeg = [0] * (self.pairing.size // d)
        for h in self.head_points:
            indeg[h // d] += 1
        return indeg

    def is_admissible(self, d: int, p: int) -> bool:
        if not 0 < p < d:
            raise ValueError(f"need 0 < p < d, got p={p}, d={d}")
        allowed = {p, d - p}
        return all(x in allowed for x in self.cell_indegrees(d))

    def to_graph_orientation(self, d: int) -> tuple[Multigraph, Orientation]:
        """Project to a multigraph and the aligned edge orientation."""
        if self.pairing.size % d != 0:
            raise ValueError("point count is not a multiple of d")
        n = self.pairing.size // d
        items = sorted(
            ((min(a // d, b // d), max(a // d, b // d)), h // d)
            for (a, b), h in zip(self.pairing.pairs, self.head_points)
        )
        graph = Multigraph(n, tuple(e for e, _ in items))
        return graph, Orientation(tuple(h for _, h in items))


def enumerate_admissible_head_choices(
    pairing: Pairing, d: int, p: int
) -> Iterator[OrientedPairing]:
    """Yield every admissible oriented version of a pairing (pruned search)."""
    if not 0 < p < d:
        raise ValueError(f"need 0 < p < d, got p={p}, d={d}")
    if pairing.size % d != 0:
        raise ValueError("point count is not a multiple of d")
    m = len(pairing.pairs)
    if m > 24:
        raise ValueError(f"enumeration limited to 24 pairs, got {m}")
    n = pairing.size // d
    lo, hi = min(p, d - p), max(p, d - p)
    indeg = [0] * n
    rem = [0] * n
    for a, b in pairing.pairs:
        rem[a // d] += 1
        rem[b // d] += 1
    # a loop contributes in-degree 1 but has two head choices; count capacity 1
    for a, b in pairing.pairs:
        if a // d == b // d:
            rem[a // d] -= 1

    def ok(v: int) -> bool:
        i, r = indeg[v], rem[v]
        return (i <= lo <= i + r) or (i <= hi <= i + r)

    chosen: list[int] = []

    def rec(idx: int) -> Iterator[OrientedPairing]:
        if idx == m:
            yield OrientedPairing(pairing, tuple(chosen))
            return
        a, b = pairing.pairs[idx]
        ca, cb = a // d, b // d
        if ca == cb:
            rem[ca] -= 1
            indeg[ca] += 1
            if ok(ca):
                for h in (a, b):
                    chosen.append(h)
                    yield from rec(idx + 1)
                    chosen.pop()
            indeg[ca] -= 1
            rem[ca] += 1
            return
        rem[ca] -= 1
        rem[cb] -= 1
        for h, hc, oc in ((a, ca, cb), (b, cb, ca)):
            indeg[hc] += 1
            if ok(hc) and ok(oc):
                chosen.append(h)
                yield from rec(idx + 1)
                chosen.pop()
            indeg[hc] -= 1
        rem[ca] += 1
        rem[cb] += 1

    yield from rec(0)


def count_oriented_bruteforce(pairing: Pairing, d: int, p: int) -> int:
    """Number of admissible head choices of a pairing at the half-edge level."""
    return sum(1 for _ in enumerate_admissible_head_choices(pairing, d, p))


class _Dinic:
    def __init__(self, n: int) -> None:
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, u: int, v: int, c: int) -> int:
        eid = len(self.to)
        self.adj[u].append(eid)
        self.to.append(v)
        self.cap.append(c)
        self.adj[v].append(eid + 1)
        self.to.append(u)
        self.cap.append(0)
        return eid

    def maxflow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = [-1] * self.n
            level[s] = 0
            q = deque([s])
            while q:
                x = q.popleft()
                for eid in self.adj[x]:
                    y = self.to[eid]
                    if self.cap[eid] > 0 and level[y] < 0:
                        level[y] = level[x] + 1
                        q.append(y)
            if level[t] < 0:
                return flow
            it = [0] * self.n

            def dfs(x: int, f: int) -> int:
                if x == t:
                    return f
                while it[x] < len(self.adj[x]):
                    eid = self.adj[x][it[x]]
                    y = self.to[eid]
                    if self.cap[eid] > 0 and level[y] == level[x] + 1:
                        got = dfs(y, min(f, self.cap[eid]))
                        if got:
                            self.cap[eid] -= got
                            self.cap[eid ^ 1] += got
                            return got
                    it[x] += 1
                return 0

            while True:
                pushed = dfs(s, 1 << 60)
                if not pushed:
                    break
                flow += pushed


def feasible_with_targets(
    graph: Multigraph, targets: Sequence[int]
) -> Optional[Orientation]:
    """Orientation achieving exact in-degrees ``targets``, or ``None``.

    Solved as a unit-capacity max-flow: source -> edge -> endpoint -> sink,
    with a single arc for a loop (its in-degree contribution is fixed at 1).
    """
    n, m = graph.n, graph.m
    if len(targets) != n:
        raise ValueError("one target per vertex is required")
    if any(t < 0 for t in targets):
        raise ValueError("targets must be nonnegative")
    if sum(targets) != m:
        raise ValueError(f"targets must sum to the edge count {m}")
    net = _Dinic(m + n + 2)
    s, t = 0, m + n + 1
    arc_u: list[int] = []
    arc_v: list[int] = []
    for i, (u, v) in enumerate(graph.edges):
        net.add(s, 1 + i, 1)
        arc_u.append(net.add(1 + i, 1 + m + u, 1))
        arc_v.append(arc_u[-1] if u == v else net.add(1 + i, 1 + m + v, 1))
    for v in range(n):
        net.add(1 + m + v, t, targets[v])
    if net.maxflow(s, t) != m:
        return None
    heads = tuple(
        u if net.cap[arc_u[i]] == 0 else v
        for i, (u, v) in enumerate(graph.edges)
    )
    return Orientation(heads)


def exists_exact(
    graph: Multigraph, p: int, use_heuristic: bool = True
) -> Optional[OrientationWitness]:
    """Decide whether an admissible orientation exists; ``None`` is a proof of
    nonexistence.

    For ``d == 2p`` a single max-flow decides.  Otherwise every candidate
    bisection containing vertex 0 on the low side is tried (reversal symmetry
    makes that exhaustive), so the search is limited to ``n <= 24``.  A
    successful heuristic probe short-circuits the exhaustive phase.
    """
    d = _regular_degree(graph)
    if not 0 < p < d:
        raise ValueError(f"need 0 < p < d, got p={p}, d={d}")
    pc = min(p, d - p)
    n = graph.n
    if 2 * pc == d:
        orient = feasible_with_targets(graph, [pc] * n)
        return None if orient is None else OrientationWitness(None, orient)
    if n % 2 != 0:
        return None
    if n > 24:
        raise ValueError(f"exact existence search limited to 24 vertices, got {n}")
    if use_heuristic:
        found, witness = exists_heuristic(
            graph, p, np.random.default_rng(0), restarts=8
        )
        if found:
            return witness
    for rest in combinations(range(1, n), n // 2 - 1):
        low = frozenset((0,) + rest)
        targets = [pc if v in low else d - pc for v in range(n)]
        orient = feasible_with_targets(graph, targets)
        if orient is not None:
            high = frozenset(v for v in range(n) if v not in low)
            return OrientationWitness(Bisection(low, high), orient)
    return None


def exists_heuristic(
    graph: Multigraph,
    p: int,
    rng: np.random.Generator,
    restarts: int = 50,
) -> tuple[bool, Optional[OrientationWitness]]:
    """Randomized local search for an admissible orientation.

    Returns ``(True, witness)`` on success and ``(False, None)`` when no
    orientation was found — which proves nothing.  Each restart walks
    ``20 n`` edge flips, accepting any flip that does not increase the total
    distance of the in-degree vector from the allowed values.
    """
    d = _regular_degree(graph)
    if not 0 < p < d:
        raise ValueError(f"need 0 < p < d, got p={p}, d={d}")
    pc = min(p, d - p)
    n, m = graph.n, graph.m
    if 2 * pc == d:
        orient = feasible_with_targets(graph, [pc] * n)
        return (orient is not None), (
            None if orient is None else OrientationWitness(None, orient)
        )
    if n % 2 != 0:
        return False, None

    def vertex_cost(x: int) -> int:
        return min(abs(x - pc), abs(x - (d - pc)))

    nonloop = [i for i, (u, v) in enumerate(graph.edges) if u != v]
    for _ in range(max(1, restarts)):
        heads = []
        indeg = [0] * n
        for u, v in graph.edges:
            h = u if (u == v or rng.integers(2) == 0) else v
            heads.append(h)
            indeg[h] += 1
        cost = sum(vertex_cost(x) for x in indeg)
        if nonloop:
            for _ in range(20 * n):
                if cost == 0:
                    break
                i = nonloop[int(rng.integers(len(nonloop)))]
                u, v = graph.edges[i]
                h = heads[i]
                o = u if h == v else v
                delta = (
                    vertex_cost(indeg[h] - 1)
                    + vertex_cost(indeg[o] + 1)
                    - vertex_cost(indeg[h])
                    - vertex_cost(indeg[o])
                )
                if delta <= 0:
                    heads[i] = o
                    indeg[h] -= 1
                    indeg[o] += 1
                    cost += delta
        if cost == 0:
            orient = Orientation(tuple(heads))
            if is_p_orientation(graph, orient, p):
                return True, OrientationWitness(
                    induced_bisection(graph, orient, p), orient
                )
    return False, None


def dual(graph: Multigraph, orientation: Orientation) -> Orientation:
    """Reverse every edge (a loop's head vertex is unchanged)."""
    _check_heads(graph, orientation)
    return Orientation(
        tuple(u if h == v else v for (u, v), h in zip(graph.edges, orientation.heads))
    )


def flip_edges(
    graph: Multigraph, orientation: Orientation, indices: Sequence[int]
) -> Orientation:
    """Reverse the listed edges; reversing a directed cycle preserves every
    in-degree."""
    _check_heads(graph, orientation)
    heads = list(orientation.heads)
    for i in indices:
        u, v = graph.edges[i]
        heads[i] = u if heads[i] == v else v
    return Orientation(tuple(heads))


def directed_cycle_census(
    graph: Multigraph, orientation: Orientation, kmax: int
) -> CycleCensus:
    """Count directed cycles of each length ``1..kmax``.

    Loops are directed 1-cycles; a 2-cycle is a pair of oppositely directed
    parallel edges; longer cycles follow edge directions through distinct
    vertices, weighted by directed-edge multiplicities, each counted once
    (anchored at the smallest vertex on the cycle).
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    _check_heads(graph, orientation)
    n = graph.n
    counts = [0] * kmax
    mult: dict[tuple[int, int], int] = {}
    for (u, v), h in zip(graph.edges, orientation.heads):
        if u == v:
            counts[0] += 1
        else:
            tail = u if h == v else v
            mult[(tail, h)] = mult.get((tail, h), 0) + 1
    if kmax >= 2:
        counts[1] = sum(
            c * mult.get((b, a), 0) for (a, b), c in mult.items() if a < b
        )
    if kmax >= 3:
        out: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for (a, b), c in mult.items():
            out[a].append((b, c))
        for a in range(n):
            stack = [(b, c, frozenset((b,))) for b, c in out[a] if b > a]
            while stack:
                v, weight, visited = stack.pop()
                length = len(visited) + 1
                if 3 <= length <= kmax:
                    back = mult.get((v, a), 0)
                    if back:
                        counts[length - 1] += weight * back
                if length < kmax:
                    for w, c in out[v]:
                        if w > a and w not in visited:
                            stack.append((w, weight * c, visited | {w}))
    return CycleCensus(tuple(counts))


def sample_oriented_pairing(
    d: int, p: int, n: int, rng: np.random.Generator
) -> OrientedPairing:
    """One uniform sample from the admissible oriented pairings.

    Constructive: choose which cells sit on the low in-degree side (skipped
    when ``d == 2p``), choose each cell's head points, then match head points
    to tail points by a uniform bijection.
    """
    rows = sample_oriented_pairings_batch(d, p, n, 1, rng)
    heads_idx, tails_idx = rows
    pairs = list(zip(heads_idx[0].tolist(), tails_idx[0].tolist()))
    pairing = Pairing.from_pairs(d * n, pairs)
    # Realign head points with the canonical pair order.
    head_by_pair = {(min(h, t), max(h, t)): h for h, t in pairs}
    heads = tuple(head_by_pair[pr] for pr in pairing.pairs)
    return OrientedPairing(pairing, heads)


def sample_oriented_pairings_batch(
    d: int, p: int, n: int, samples: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform admissible oriented pairings in bulk.

    Returns ``(head_points, tail_points)``, each of shape
    ``(samples, d * n / 2)``; column ``i`` of the two arrays forms one pair
    directed tail -> head.
    """
    if not 0 < p < d:
        raise ValueError(f"need 0 < p < d, got p={p}, d={d}")
    if n < 1:
        raise ValueError("n must be positive")
    if 2 * p != d and n % 2 != 0:
        raise ValueError("n must be even when d != 2p")
    if (d * n) % 2 != 0:
        raise ValueError("d * n must be even")
    size = d * n
    m = size // 2
    head_counts = np.full((samples, n), p, dtype=np.int64)
    if 2 * p != d:
        keys = rng.random((samples, n))
        order = np.argsort(keys, axis=1)
        low = np.zeros((samples, n), dtype=bool)
        np.put_along_axis(low, order[:, : n // 2], True, axis=1)
        head_counts = np.where(low, p, d - p)
    # choose head points within each cell
    cell_keys = rng.random((samples, n, d))
    ranks = np.argsort(np.argsort(cell_keys, axis=2), axis=2)
    head_mask = (ranks < head_counts[:, :, None]).reshape(samples, size)
    # stable index lists of heads and tails
    heads_idx = np.argsort(~head_mask, axis=1, kind="stable")[:, :m]
    tails_idx = np.argsort(head_mask, axis=1, kind="stable")[:, :m]
    perm = np.argsort(rng.random((samples, m)), axis=1)
    tails_for_heads = np.take_along_axis(tails_idx, perm, axis=1)
    return heads_idx, tails_for_heads


@dataclass(frozen=True)
class GammaCycleSample:
    """Per-sample directed cycle counts of admissible oriented pairings."""

    w1: np.ndarray
    w2: Optional[np.ndarray]
    w3: Optional[np.ndarray]


def sample_gamma_cycle_counts(
    d: int, p: int, n: int, samples: int, rng: np.random.Generator, kmax: int = 1
) -> GammaCycleSample:
    """Directed 1-, 2-, 3-cycle counts over uniform admissible oriented
    pairings (``kmax`` chooses how many are computed)."""
    if not 1 <= kmax <= 3:
        raise ValueError("kmax must be 1, 2, or 3")
    w1 = np.empty(samples, dtype=np.int64)
    w2 = np.empty(samples, dtype=np.int64) if kmax >= 2 else None
    w3 = np.empty(samples, dtype=np.int64) if kmax >= 3 else None
    chunk = max(1, min(samples, 4096, (1 << 27) // max(1, n * n * 4)))
    done = 0
    while done < samples:
        hi = min(samples, done + chunk)
        heads_idx, tails_idx = sample_oriented_pairings_batch(
            d, p, n, hi - done, rng
        )
        head_cell = heads_idx // d
        tail_cell = tails_idx // d
        loops = head_cell == tail_cell
        w1[done:hi] = loops.sum(axis=1)
        if kmax >= 2:
            s = hi - done
            flat = (
                np.arange(s, dtype=np.int64)[:, None] * (n * n)
                + tail_cell * n
                + head_cell
            )[~loops]
            mat = np.bincount(flat, minlength=s * n * n).reshape(s, n, n)
            w2[done:hi] = np.einsum("sij,sji->s", mat, mat) // 2
            if kmax >= 3:
                mf = mat.astype(np.float32)
                m2 = mf @ mf
                tr3 = np.einsum("sij,sji->s", m2, mf)
                w3[done:hi] = np.rint(tr3 / 3).astype(np.int64)
        done = hi
    return GammaCycleSample(w1=w1, w2=w2, w3=w3)


def pair_class_vector(
    d: int, p: int, first: OrientedPairing, second: OrientedPairing
) -> KVector:
    """Class vector of two admissible oriented pairings of the same pairing.

    Each cell is classified by its side in each orientation (0 = in-degree
    ``p``) and by the overlap ``j`` between the two distinguished point sets
    (the head points on side 0, the tail points on side 1 — always ``p`` of
    them).  Undefined when ``d == 2p`` (sides are indistinguishable)."""
    if not 0 < p < d:
        raise ValueError(f"need 0 < p < d, got p={p}, d={d}")
    if 2 * p == d:
        raise ValueError("side classes are undefined when d == 2p")
    if first.pairing != second.pairing:
        raise ValueError("both orientations must orient the same pairing")
    size = first.pairing.size
    if size % d != 0:
        raise ValueError("point count is not a multiple of d")
    n = size // d
    h1, h2 = first.head_set(), second.head_set()
    table = [[0, 0, 0, 0] for _ in range(p + 1)]
    for c in range(n):
        pts = frozenset(range(c * d, (c + 1) * d))
        sets = []
        sides = []
        for h in (h1, h2):
            inside = pts & h
            if len(inside) == p:
                sides.append(0)
                sets.append(inside)
            elif len(inside) == d - p:
                sides.append(1)
                sets.append(pts - inside)
            else:
                raise ValueError(f"cell {c} has in-degree {len(inside)}: not admissible")
        j = len(sets[0] & sets[1])
        table[j][2 * sides[0] + sides[1]] += 1
    return KVector(
        n,
        p,
        tuple(row[0] for row in table),
        tuple(row[1] for row in table),
        tuple(row[2] for row in table),
        tuple(row[3] for row in table),
    )
