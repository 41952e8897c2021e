"""Bipartite matching services.

Three operations back the width-2 solver and the width computation:

* :func:`max_matching` -- maximum-cardinality matching (Hopcroft-Karp),
* :func:`min_weight_k_matching` -- minimum total weight among matchings of
  cardinality exactly k, by k rounds of shortest augmenting paths under
  reduced costs (potentials keep every round's edge costs nonnegative),
* :func:`chain_partition` -- minimum chain partition of a DAG through a
  maximum matching on the split graph (Fulkerson's construction), whose
  size equals the width by Dilworth's theorem.

Weights are nonnegative integers throughout, so all arithmetic is exact.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from .errors import DuplicateArc, InfeasibleCardinality, InvalidAllocation
from .graph import PreferenceGraph, ReachabilityIndex, iter_bits

_INF = float("inf")


@dataclass(frozen=True)
class BipartiteGraph:
    """Weighted bipartite graph; edges are (left_id, right_id, weight)."""

    left_count: int
    right_count: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        seen: set[tuple[int, int]] = set()
        for l, r, w in self.edges:
            if not (0 <= l < self.left_count) or not (0 <= r < self.right_count):
                raise InvalidAllocation(f"edge ({l}, {r}) out of range")
            if w < 0 or w != int(w):
                raise InvalidAllocation(f"edge ({l}, {r}) has bad weight {w}")
            if (l, r) in seen:
                raise DuplicateArc(l, r)
            seen.add((l, r))

    @staticmethod
    def from_edges(left_count: int, right_count: int, edges) -> "BipartiteGraph":
        return BipartiteGraph(
            left_count,
            right_count,
            tuple(sorted((int(l), int(r), int(w)) for l, r, w in edges)),
        )

    def adjacency(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.left_count)]
        for l, r, w in self.edges:
            adj[l].append((r, w))
        return adj


@dataclass(frozen=True)
class Matching:
    """Vertex-disjoint edge set with its total weight."""

    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        lefts = [l for l, _, _ in self.edges]
        rights = [r for _, r, _ in self.edges]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise InvalidAllocation("matching edges share an endpoint")

    @property
    def cardinality(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)


def _pairs_to_matching(bipartite: BipartiteGraph, match_l: list[int]) -> Matching:
    weight_of = {(l, r): w for l, r, w in bipartite.edges}
    edges = tuple(
        (l, r, weight_of[(l, r)])
        for l, r in sorted((l, r) for l, r in enumerate(match_l) if r >= 0)
    )
    return Matching(edges)


def max_matching(bipartite: BipartiteGraph) -> Matching:
    """Maximum-cardinality matching via Hopcroft-Karp."""
    L = bipartite.left_count
    adj = [sorted(r for r, _ in row) for row in bipartite.adjacency()]
    match_l = [-1] * L
    match_r = [-1] * bipartite.right_count
    dist = [0] * L

    def bfs() -> bool:
        queue = deque()
        for l in range(L):
            if match_l[l] < 0:
                dist[l] = 0
                queue.append(l)
            else:
                dist[l] = -1
        found = False
        while queue:
            l = queue.popleft()
            for r in adj[l]:
                nl = match_r[r]
                if nl < 0:
                    found = True
                elif dist[nl] < 0:
                    dist[nl] = dist[l] + 1
                    queue.append(nl)
        return found

    def dfs(l: int) -> bool:
        for r in adj[l]:
            nl = match_r[r]
            if nl < 0 or (dist[nl] == dist[l] + 1 and dfs(nl)):
                match_l[l] = r
                match_r[r] = l
                return True
        dist[l] = -1
        return False

    while bfs():
        for l in range(L):
            if match_l[l] < 0:
                dfs(l)
    return _pairs_to_matching(bipartite, match_l)


def min_weight_k_matching(bipartite: BipartiteGraph, k: int) -> Matching:
    """Minimum-weight matching of cardinality exactly ``k``.

    Runs k rounds of multi-source Dijkstra over reduced costs, augmenting
    along the cheapest path each round; after round i the matching is a
    minimum-weight matching of cardinality i.  Raises
    :class:`InfeasibleCardinality` when no size-k matching exists.
    """
    if k < 0:
        raise InvalidAllocation("k must be >= 0")
    L, R = bipartite.left_count, bipartite.right_count
    adj = bipartite.adjacency()
    for row in adj:
        row.sort()
    match_l = [-1] * L
    match_r = [-1] * R
    pot_l = [0] * L
    pot_r = [0] * R

    for _round in range(k):
        dist_l: list[float] = [_INF] * L
        dist_r: list[float] = [_INF] * R
        parent_r = [-1] * R
        heap: list[tuple[float, int]] = []
        for l in range(L):
            if match_l[l] < 0:
                dist_l[l] = 0
                heap.append((0, l))
        heapq.heapify(heap)
        while heap:
            d, l = heapq.heappop(heap)
            if d > dist_l[l]:
                continue
            for r, w in adj[l]:
                nd = d + w + pot_l[l] - pot_r[r]
                if nd < dist_r[r]:
                    dist_r[r] = nd
                    parent_r[r] = l
                    nl = match_r[r]
                    if nl >= 0 and nd < dist_l[nl]:
                        dist_l[nl] = nd
                        heapq.heappush(heap, (nd, nl))
        best = -1
        for r in range(R):
            if match_r[r] < 0 and dist_r[r] < _INF:
                if best < 0 or dist_r[r] < dist_r[best]:
                    best = r
        if best < 0:
            raise InfeasibleCardinality(
                f"no matching of cardinality {k} (stuck at {_round})"
            )
        delta = dist_r[best]
        for l in range(L):
            pot_l[l] += min(dist_l[l], delta)
        for r in range(R):
            pot_r[r] += min(dist_r[r], delta)
        r = best
        while r >= 0:
            l = parent_r[r]
            r_prev = match_l[l]
            match_l[l] = r
            match_r[r] = l
            r = r_prev
    return _pairs_to_matching(bipartite, match_l)


@dataclass(frozen=True)
class ChainPartition:
    """Vertex-disjoint chains covering all items; consecutive items are
    comparable (the later one is reachable from the earlier)."""

    chains: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.chains)


def chain_partition(graph: PreferenceGraph, index: ReachabilityIndex) -> ChainPartition:
    """Minimum chain partition via a maximum matching on the split graph.

    The split graph pairs a left copy of u with a right copy of v whenever
    v is a proper successor of u (full reachability, not just arcs); each
    matched pair links consecutive items of a chain.  The number of chains
    is n minus the matching cardinality, which is minimum, and equals the
    width of the graph.
    """
    n = graph.item_count
    edges = []
    for u in range(n):
        for v in iter_bits(index.succ_row(u) & ~(1 << u)):
            edges.append((u, v, 0))
    matching = max_matching(BipartiteGraph.from_edges(n, n, edges))
    nxt = [-1] * n
    has_prev = bytearray(n)
    for l, r, _ in matching.edges:
        nxt[l] = r
        has_prev[r] = 1
    chains = []
    for start in range(n):
        if has_prev[start]:
            continue
        chain = [start]
        v = nxt[start]
        while v >= 0:
            chain.append(v)
            v = nxt[v]
        chains.append(tuple(chain))
    return ChainPartition(tuple(chains))
