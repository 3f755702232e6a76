"""Configuration-model sampling and cycle statistics for random regular multigraphs.

A *pairing* is a perfect matching on ``d * n`` points; projecting each point
``q`` to the cell ``q // d`` yields a ``d``-regular multigraph on ``n``
vertices (loops and parallel edges allowed).  This module provides exact
enumeration of pairings on small point sets, uniform sampling (scalar and
batched), projection, a cycle census (loops, parallel pairs, and longer
cycles counted with edge multiplicity), rejection sampling of simple graphs,
and a plain-text edge-list interchange format.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence, TextIO

import numpy as np

from .exact_math import binomial

__all__ = [
    "Pairing",
    "Multigraph",
    "CycleCensus",
    "enumerate_pairings",
    "sample_pairing",
    "sample_pairings_batch",
    "project",
    "is_simple",
    "cycle_census",
    "sample_simple_graph",
    "sample_cycle_counts",
    "CycleCountSample",
    "write_edge_list",
    "read_edge_list",
    "parse_edge_list",
    "format_edge_list",
]


@dataclass(frozen=True)
class Pairing:
    """A perfect matching on the point set ``{0, ..., size - 1}``.

    ``pairs`` is stored canonically: each pair ``(a, b)`` has ``a < b`` and the
    pairs are sorted by first element.
    """

    size: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.size % 2 != 0 or self.size < 0:
            raise ValueError(f"point count must be even and nonnegative, got {self.size}")
        if len(self.pairs) * 2 != self.size:
            raise ValueError("pair count does not match point count")
        seen = set()
        for a, b in self.pairs:
            if not (0 <= a < b < self.size):
                raise ValueError(f"invalid pair ({a}, {b})")
            seen.add(a)
            seen.add(b)
        if len(seen) != self.size:
            raise ValueError("pairs do not cover every point exactly once")

    @classmethod
    def from_pairs(cls, size: int, pairs: Sequence[tuple[int, int]]) -> "Pairing":
        canon = tuple(sorted((min(a, b), max(a, b)) for a, b in pairs))
        return cls(size, canon)

    @classmethod
    def from_point_sequence(cls, points: Sequence[int]) -> "Pairing":
        """Build a pairing by matching consecutive entries of ``points``."""
        pts = list(points)
        return cls.from_pairs(len(pts), [(pts[i], pts[i + 1]) for i in range(0, len(pts), 2)])

    def mates(self) -> list[int]:
        """Return the mate array: ``mates[a] == b`` iff ``{a, b}`` is a pair."""
        out = [0] * self.size
        for a, b in self.pairs:
            out[a] = b
            out[b] = a
        return out


@dataclass(frozen=True)
class Multigraph:
    """A multigraph on vertices ``{0, ..., n - 1}`` given by an edge multiset.

    Edges are stored canonically as ``(u, v)`` with ``u <= v``, sorted; a loop
    is ``(u, u)`` and contributes 2 to the degree of ``u``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        for u, v in self.edges:
            if not (0 <= u <= v < self.n):
                raise ValueError(f"invalid edge ({u}, {v})")

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[tuple[int, int]]) -> "Multigraph":
        canon = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
        return cls(n, canon)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_regular(self, d: int) -> bool:
        return all(x == d for x in self.degrees())

    def multiplicities(self) -> Counter:
        return Counter(self.edges)

    def loop_count(self) -> int:
        return sum(1 for u, v in self.edges if u == v)


@dataclass(frozen=True)
class CycleCensus:
    """Cycle counts ``counts[i - 1]`` = number of ``i``-cycles, for ``1 <= i <= kmax``.

    A 1-cycle is a loop; a 2-cycle is an unordered pair of parallel edges
    between distinct vertices; an ``i``-cycle for ``i >= 3`` visits ``i``
    distinct vertices and is counted once per choice of connecting edges, so
    multi-edges contribute multiplicatively.
    """

    counts: tuple[int, ...]

    @property
    def kmax(self) -> int:
        return len(self.counts)

    def count(self, i: int) -> int:
        if not 1 <= i <= self.kmax:
            raise ValueError(f"cycle length {i} outside census range 1..{self.kmax}")
        return self.counts[i - 1]


def enumerate_pairings(size: int) -> Iterator[Pairing]:
    """Yield every perfect matching on ``size`` points (``size`` <= 16).

    The number of matchings is ``(size - 1)!! = size! / ((size/2)! 2^(size/2))``,
    which reaches 2 027 025 at ``size == 16``; larger point sets are refused.
    """
    if size % 2 != 0:
        raise ValueError("point count must be even")
    if size > 16:
        raise ValueError(f"refusing to enumerate pairings on {size} > 16 points")

    def rec(remaining: tuple[int, ...], acc: list[tuple[int, int]]) -> Iterator[Pairing]:
        if not remaining:
            yield Pairing.from_pairs(size, acc)
            return
        a = remaining[0]
        rest = remaining[1:]
        for idx in range(len(rest)):
            b = rest[idx]
            acc.append((a, b))
            yield from rec(rest[:idx] + rest[idx + 1 :], acc)
            acc.pop()

    yield from rec(tuple(range(size)), [])


def sample_pairing(d: int, n: int, rng: np.random.Generator) -> Pairing:
    """Sample a uniform pairing on ``d * n`` points."""
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    if (d * n) % 2 != 0:
        raise ValueError(f"d * n = {d * n} must be even")
    perm = rng.permutation(d * n)
    return Pairing.from_point_sequence(perm.tolist())


def sample_pairings_batch(d: int, n: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Sample ``samples`` uniform pairings at once.

    Returns an array of shape ``(samples, d * n)`` whose rows are uniformly
    random permutations of the points; consecutive entries of a row are paired,
    exactly as in :func:`Pairing.from_point_sequence`.
    """
    if d < 1 or n < 1 or samples < 0:
        raise ValueError("need d >= 1, n >= 1, samples >= 0")
    if (d * n) % 2 != 0:
        raise ValueError(f"d * n = {d * n} must be even")
    size = d * n
    out = np.empty((samples, size), dtype=np.int64)
    # Chunk so the intermediate random matrix stays modest in memory.
    chunk = max(1, min(samples, (1 << 24) // max(size, 1)))
    for lo in range(0, samples, chunk):
        hi = min(samples, lo + chunk)
        keys = rng.random((hi - lo, size))
        out[lo:hi] = np.argsort(keys, axis=1)
    return out


def project(pairing: Pairing, d: int) -> Multigraph:
    """Project a pairing to the multigraph whose vertex for point ``q`` is ``q // d``."""
    if d < 1 or pairing.size % d != 0:
        raise ValueError(f"point count {pairing.size} is not a multiple of d={d}")
    n = pairing.size // d
    return Multigraph.from_edges(n, [(a // d, b // d) for a, b in pairing.pairs])


def is_simple(graph: Multigraph) -> bool:
    """True iff the multigraph has no loops and no repeated edges."""
    mult = graph.multiplicities()
    return all(u != v for u, v in mult) and all(c == 1 for c in mult.values())


def cycle_census(graph: Multigraph, kmax: int) -> CycleCensus:
    """Count cycles of each length ``1..kmax`` in a multigraph.

    Loops are 1-cycles; unordered pairs of parallel edges between distinct
    vertices are 2-cycles; longer cycles are counted over distinct vertex
    sequences, weighted by the product of edge multiplicities, each cycle
    once (anchored at its smallest vertex, direction fixed).
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    counts = [0] * kmax
    counts[0] = graph.loop_count()
    mult = graph.multiplicities()
    if kmax >= 2:
        counts[1] = sum(binomial(c, 2) for (u, v), c in mult.items() if u != v)
    if kmax >= 3:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(graph.n)]
        for (u, v), c in mult.items():
            if u != v:
                adj[u].append((v, c))
                adj[v].append((u, c))
        for a in range(graph.n):
            # Simple paths a -> ... -> last using only vertices > a; close back
            # to a.  Direction is canonicalized by path[1] < last.
            stack: list[tuple[int, int, frozenset[int], tuple[int, ...]]] = []
            for b, c in adj[a]:
                if b > a:
                    stack.append((b, c, frozenset((b,)), (b,)))
            while stack:
                v, weight, visited, path = stack.pop()
                length = len(path) + 1  # cycle length if we close now
                if 3 <= length <= kmax and path[0] < path[-1]:
                    back = mult.get((min(a, v), max(a, v)), 0)
                    if back:
                        counts[length - 1] += weight * back
                if length < kmax:
                    for w, c in adj[v]:
                        if w > a and w not in visited:
                            stack.append((w, weight * c, visited | {w}, path + (w,)))
    return CycleCensus(tuple(counts))


def sample_simple_graph(
    d: int, n: int, rng: np.random.Generator, max_attempts: int = 100_000
) -> tuple[Multigraph, int]:
    """Rejection-sample a uniform simple ``d``-regular graph.

    Repeatedly samples pairings and projects until the result is simple.
    Returns ``(graph, attempts)``.  The acceptance probability tends to
    ``exp((1 - d^2) / 4)``, so this is practical for small ``d`` only.
    """
    for attempt in range(1, max_attempts + 1):
        g = project(sample_pairing(d, n, rng), d)
        if is_simple(g):
            return g, attempt
    raise RuntimeError(f"no simple graph found in {max_attempts} attempts")


@dataclass(frozen=True)
class CycleCountSample:
    """Batched short-cycle statistics: per-sample loop counts, parallel-pair
    counts, and the simplicity indicator."""

    x1: np.ndarray
    x2: np.ndarray
    simple: np.ndarray

    @property
    def samples(self) -> int:
        return len(self.x1)


def sample_cycle_counts(
    d: int, n: int, samples: int, rng: np.random.Generator
) -> CycleCountSample:
    """Sample pairings in bulk and return loop / parallel-pair counts per sample.

    For each of ``samples`` uniform pairings, computes ``x1`` (loops), ``x2``
    (unordered pairs of parallel edges between distinct vertices), and whether
    the projected multigraph is simple (``x1 == 0 and x2 == 0``).
    """
    size = d * n
    m = size // 2
    x1 = np.empty(samples, dtype=np.int64)
    x2 = np.empty(samples, dtype=np.int64)
    chunk = max(1, min(samples, (1 << 24) // max(size, 1)))
    for lo in range(0, samples, chunk):
        hi = min(samples, lo + chunk)
        rows = sample_pairings_batch(d, n, hi - lo, rng)
        u = rows[:, 0::2] // d
        v = rows[:, 1::2] // d
        lo_end = np.minimum(u, v)
        hi_end = np.maximum(u, v)
        loops = lo_end == hi_end
        x1[lo:hi] = loops.sum(axis=1)
        # Key each non-loop edge by its endpoint pair; give loops unique
        # sentinel keys so they never form runs.
        keys = lo_end * n + hi_end
        sentinels = -1 - np.arange(m, dtype=np.int64)
        keys = np.where(loops, sentinels[None, :], keys)
        keys.sort(axis=1)
        eq = keys[:, 1:] == keys[:, :-1]
        run = np.zeros(hi - lo, dtype=np.int64)
        acc = np.zeros(hi - lo, dtype=np.int64)
        for t in range(m - 1):
            run = (run + 1) * eq[:, t]
            acc += run
        x2[lo:hi] = acc
    return CycleCountSample(x1=x1, x2=x2, simple=(x1 == 0) & (x2 == 0))


def format_edge_list(graph: Multigraph) -> str:
    """Serialize a multigraph as ``"n m"`` followed by one ``"u v"`` line per edge."""
    lines = [f"{graph.n} {graph.m}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges)
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Multigraph:
    """Parse the edge-list format; raises ValueError naming the offending line."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ValueError("line 1: expected header 'n m'")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"line 1: expected two integers 'n m', got {lines[0]!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"line 1: expected two integers 'n m', got {lines[0]!r}") from None
    if n < 0 or m < 0:
        raise ValueError("line 1: vertex and edge counts must be nonnegative")
    edges: list[tuple[int, int]] = []
    lineno = 1
    for raw in lines[1:]:
        lineno += 1
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(
                f"line {lineno}: endpoint out of range 0..{n - 1} in {raw!r}"
            )
        edges.append((u, v))
    if len(edges) != m:
        raise ValueError(f"header declares {m} edges but {len(edges)} edge lines found")
    return Multigraph.from_edges(n, edges)


def write_edge_list(graph: Multigraph, fh: TextIO) -> None:
    fh.write(format_edge_list(graph))


def read_edge_list(fh: TextIO) -> Multigraph:
    return parse_edge_list(fh.read())
