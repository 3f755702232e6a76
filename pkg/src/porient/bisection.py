"""Balanced bisections of multigraphs and the max-bisection obstruction.

For ``p < d/2``, a ``d``-regular multigraph admitting an orientation with every
in-degree in ``{p, d - p}`` must contain a balanced bisection crossed by at
least ``(d - 2p) * n / 2`` edges; graphs whose maximum bisection falls short
therefore admit no such orientation.  This module provides the exact
branch-and-bound maximum bisection, the resulting obstruction test, and the
first-moment bound on the cut density of random regular graphs that powers the
asymptotic version of the obstruction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config_model import Multigraph

__all__ = [
    "Bisection",
    "BisectionResult",
    "max_bisection_exact",
    "orientation_obstruction",
    "bollobas_condition",
    "pstar_lower_bound",
]


@dataclass(frozen=True)
class Bisection:
    """A partition of ``{0, ..., n-1}`` into two equal halves ``u`` and ``w``."""

    u: frozenset[int]
    w: frozenset[int]

    def __post_init__(self) -> None:
        if len(self.u) != len(self.w):
            raise ValueError("bisection sides must have equal size")
        if self.u & self.w:
            raise ValueError("bisection sides must be disjoint")
        n = len(self.u) + len(self.w)
        if (self.u | self.w) != frozenset(range(n)):
            raise ValueError("bisection must cover 0..n-1 exactly")

    @property
    def n(self) -> int:
        return len(self.u) + len(self.w)

    def side(self, v: int) -> int:
        """0 if ``v`` is in ``u``, 1 if in ``w``."""
        if v in self.u:
            return 0
        if v in self.w:
            return 1
        raise ValueError(f"vertex {v} not covered")

    def crossing_count(self, graph: Multigraph) -> int:
        """Number of edges with one endpoint on each side (loops never cross)."""
        return sum(1 for a, b in graph.edges if (a in self.u) != (b in self.u))


@dataclass(frozen=True)
class BisectionResult:
    size: int
    bisection: Bisection


def max_bisection_exact(graph: Multigraph) -> BisectionResult:
    """Exact maximum balanced bisection by branch and bound.

    Vertex 0 is fixed on side ``u`` (the problem is symmetric under swapping
    sides).  The bound at a partial assignment is the current crossing count
    plus the total multiplicity of non-loop edges not yet fully decided.
    """
    n = graph.n
    if n % 2 != 0 or n == 0:
        raise ValueError(f"graph must have a positive even vertex count, got {n}")
    half = n // 2
    # multiplicity matrix over non-loop edges
    mult = [[0] * n for _ in range(n)]
    total = 0
    for a, b in graph.edges:
        if a != b:
            mult[a][b] += 1
            mult[b][a] += 1
            total += 1

    side = [-1] * n
    side[0] = 0
    best_size = -1
    best_sides: list[int] = []

    def rec(v: int, cu: int, cw: int, cross: int, undecided: int) -> None:
        nonlocal best_size, best_sides
        if cross + undecided <= best_size:
            return
        if v == n:
            if cross > best_size:
                best_size = cross
                best_sides = side.copy()
            return
        # decided weight gained when v is placed: edges to already-placed vertices
        row = mult[v]
        gain = [0, 0]  # crossing gained if v goes to side 0 / side 1
        decided_here = 0
        for u in range(v):
            c = row[u]
            if c:
                decided_here += c
                gain[1 - side[u]] += c
        for s, cap_used in ((0, cu), (1, cw)):
            if cap_used >= half:
                continue
            side[v] = s
            rec(
                v + 1,
                cu + (s == 0),
                cw + (s == 1),
                cross + gain[s],
                undecided - decided_here,
            )
        side[v] = -1

    rec(1, 1, 0, 0, total)
    u = frozenset(i for i in range(n) if best_sides[i] == 0)
    w = frozenset(i for i in range(n) if best_sides[i] == 1)
    return BisectionResult(best_size, Bisection(u, w))


def orientation_obstruction(graph: Multigraph, p: int) -> bool:
    """True iff the bisection bound proves no in-degree-``{p, d-p}`` orientation exists.

    Such an orientation forces a balanced bisection with at least
    ``(d - 2p) * n / 2`` crossing edges (taking ``p`` as the smaller of the two
    in-degrees), so a maximum bisection below that threshold is conclusive.
    For ``2p == d`` the threshold is 0 and the test never fires.  An odd vertex
    count with ``2p != d`` is itself conclusive (the two in-degree classes
    cannot balance).
    """
    degs = graph.degrees()
    if not degs or any(x != degs[0] for x in degs):
        raise ValueError("graph must be regular")
    d = degs[0]
    if not 0 < p < d:
        raise ValueError(f"need 0 < p < d, got p={p}, d={d}")
    pc = min(p, d - p)
    if 2 * pc == d:
        return False
    if graph.n % 2 != 0:
        return True
    need = (d - 2 * pc) * graph.n // 2
    return max_bisection_exact(graph).size < need


def bollobas_condition(d: int, eta: float) -> bool:
    """Cut-density criterion for random ``d``-regular graphs.

    Returns True when ``(1 - eta) log(1 - eta) + (1 + eta) log(1 + eta)``
    exceeds ``4 log 2 / d``, in which case asymptotically almost every
    ``d``-regular graph has every balanced bisection crossed by fewer than
    ``(1 + eta) / 2`` of its edges.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if not 0 <= eta < 1:
        raise ValueError("eta must lie in [0, 1)")
    if eta == 0:
        return False
    lhs = (1 - eta) * math.log(1 - eta) + (1 + eta) * math.log(1 + eta)
    return lhs > 4 * math.log(2) / d


def pstar_lower_bound(d: int) -> float:
    """Value ``d/4 - sqrt(d log 2)/2``: for ``p`` below it, asymptotically almost
    no ``d``-regular graph admits an in-degree-``{p, d-p}`` orientation."""
    if d < 1:
        raise ValueError("d must be positive")
    return d / 4 - math.sqrt(d * math.log(2)) / 2
