"""Core types: the preference DAG, reachability index, allocations.

Items are dense 0-based integer ids; optional display names map through
``item_names``.  An arc ``(a, b)`` means every agent prefers item ``a``
over item ``b``; item ``a`` *dominates* ``b`` when a directed path
(possibly of length 0) runs from ``a`` to ``b``.

Reachability is materialized bit-parallel: one Python integer per item,
bit ``u`` of ``succ_row(v)`` set iff ``v`` dominates ``u``.  This costs
O(n^2 / 8) bytes and makes domination queries, bundle unions and
dissatisfaction counts cheap.  The linear-time polytree solver
deliberately avoids this index and works on plain adjacency.

``PreferenceGraph`` and ``ReachabilityIndex`` are immutable after
construction and safe to share across threads; allocations, labelings and
profiles are plain values.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import (
    CycleDetected,
    DuplicateArc,
    InvalidAllocation,
    OutOfRangeItem,
    SelfLoop,
)

# A labeling maps each item to the agent holding it, or None if unassigned.
Labeling = Sequence[Optional[int]]


class PreferenceGraph:
    """Immutable DAG over items 0..item_count-1, with CSR adjacency.

    Use :func:`build_graph` to construct one with full validation.
    """

    __slots__ = (
        "item_count",
        "item_names",
        "_tails",
        "_heads",
        "_out_flat",
        "_out_start",
        "_in_flat",
        "_in_start",
        "_topo",
        "_np_csr",
    )

    def __init__(
        self,
        item_count: int,
        tails: list[int],
        heads: list[int],
        topo: list[int],
        item_names: tuple[str, ...] | None,
    ):
        self.item_count = item_count
        self.item_names = item_names
        self._tails = tails
        self._heads = heads
        self._topo = topo
        self._np_csr = None

        out_start = [0] * (item_count + 1)
        in_start = [0] * (item_count + 1)
        for t in tails:
            out_start[t + 1] += 1
        for h in heads:
            in_start[h + 1] += 1
        for v in range(item_count):
            out_start[v + 1] += out_start[v]
            in_start[v + 1] += in_start[v]
        m = len(tails)
        out_flat = [0] * m
        in_flat = [0] * m
        op = out_start[:]
        ip = in_start[:]
        for a in range(m):
            t = tails[a]
            h = heads[a]
            out_flat[op[t]] = h
            op[t] += 1
            in_flat[ip[h]] = t
            ip[h] += 1
        self._out_flat = out_flat
        self._out_start = out_start
        self._in_flat = in_flat
        self._in_start = in_start

    # -- basic queries -----------------------------------------------------

    @property
    def arc_count(self) -> int:
        return len(self._tails)

    @property
    def arcs(self) -> list[tuple[int, int]]:
        """Arc list sorted by (tail, head)."""
        return list(zip(self._tails, self._heads))

    def out_neighbors(self, v: int) -> list[int]:
        return self._out_flat[self._out_start[v]:self._out_start[v + 1]]

    def in_neighbors(self, v: int) -> list[int]:
        return self._in_flat[self._in_start[v]:self._in_start[v + 1]]

    def out_degree(self, v: int) -> int:
        return self._out_start[v + 1] - self._out_start[v]

    def in_degree(self, v: int) -> int:
        return self._in_start[v + 1] - self._in_start[v]

    def max_in_degree(self) -> int:
        return max((self.in_degree(v) for v in range(self.item_count)), default=0)

    def sources(self) -> list[int]:
        return [v for v in range(self.item_count) if self.in_degree(v) == 0]

    def sinks(self) -> list[int]:
        return [v for v in range(self.item_count) if self.out_degree(v) == 0]

    def topological_order(self) -> list[int]:
        """A fixed topological order (Kahn with a min-id tie-break)."""
        return list(self._topo)

    def item_name(self, v: int) -> str:
        if self.item_names is not None:
            return self.item_names[v]
        return str(v)

    def csr(self) -> tuple[list[int], list[int], list[int], list[int]]:
        """Compact adjacency: (out_flat, out_start, in_flat, in_start)."""
        return self._out_flat, self._out_start, self._in_flat, self._in_start

    def csr_numpy(self):
        """The CSR arrays as int32 numpy arrays, cached after first use."""
        if self._np_csr is None:
            import numpy as np

            self._np_csr = tuple(
                np.asarray(a, dtype=np.int32)
                for a in (self._out_flat, self._out_start, self._in_flat, self._in_start)
            )
        return self._np_csr

    def __repr__(self) -> str:
        return f"PreferenceGraph(items={self.item_count}, arcs={self.arc_count})"


def _kahn_min_id(item_count: int, out_flat, out_start, in_deg) -> list[int]:
    """Topological order preferring smaller ids (deterministic)."""
    deg = list(in_deg)
    heap = [v for v in range(item_count) if deg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for j in range(out_start[v], out_start[v + 1]):
            u = out_flat[j]
            deg[u] -= 1
            if deg[u] == 0:
                heapq.heappush(heap, u)
    return order


def _find_cycle(tails, heads, remaining: set[int]) -> list[int]:
    """One cycle among the items a topological sort could not process.

    Every such item keeps an unprocessed in-neighbor, so walking backward
    must repeat; the forward-oriented cycle is returned.
    """
    pred_in: dict[int, int] = {}
    for t, h in zip(tails, heads):
        if h in remaining and t in remaining and h not in pred_in:
            pred_in[h] = t
    seen: dict[int, int] = {}
    path: list[int] = []
    v = min(remaining)
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = pred_in[v]
    cycle = path[seen[v]:] + [v]
    cycle.reverse()
    return cycle


def build_graph(
    item_count: int,
    arcs: Iterable[tuple[int, int]],
    item_names: Sequence[str] | None = None,
) -> PreferenceGraph:
    """Validate and build a :class:`PreferenceGraph`.

    Raises :class:`OutOfRangeItem`, :class:`SelfLoop`, :class:`DuplicateArc`
    or :class:`CycleDetected` (reporting one offending cycle) on bad input.
    """
    if item_count < 0:
        raise OutOfRangeItem(item_count, item_count)
    arc_list = sorted(arcs)
    tails = [0] * len(arc_list)
    heads = [0] * len(arc_list)
    prev = None
    for i, arc in enumerate(arc_list):
        t, h = arc
        if not (0 <= t < item_count):
            raise OutOfRangeItem(t, item_count)
        if not (0 <= h < item_count):
            raise OutOfRangeItem(h, item_count)
        if t == h:
            raise SelfLoop(t)
        if arc == prev:
            raise DuplicateArc(t, h)
        prev = arc
        tails[i] = t
        heads[i] = h

    names = None
    if item_names is not None:
        names = tuple(str(s) for s in item_names)
        if len(names) != item_count:
            raise OutOfRangeItem(len(names), item_count)

    # acyclicity via Kahn; on failure, extract one cycle for the error
    out_start = [0] * (item_count + 1)
    for t in tails:
        out_start[t + 1] += 1
    for v in range(item_count):
        out_start[v + 1] += out_start[v]
    out_flat = [0] * len(tails)
    op = out_start[:]
    in_deg = [0] * item_count
    for a in range(len(tails)):
        out_flat[op[tails[a]]] = heads[a]
        op[tails[a]] += 1
        in_deg[heads[a]] += 1
    topo = _kahn_min_id(item_count, out_flat, out_start, in_deg)
    if len(topo) != item_count:
        remaining = set(range(item_count)) - set(topo)
        raise CycleDetected(_find_cycle(tails, heads, remaining))
    return PreferenceGraph(item_count, tails, heads, topo, names)


class ReachabilityIndex:
    """Bit-parallel closed reachability rows for a preference graph.

    ``succ_row(v)`` has bit ``u`` set iff there is a path from v to u
    (reflexive, so bit v itself is always set); ``pred_row`` is the
    transpose.  Built in one topological sweep each way.
    """

    __slots__ = ("item_count", "_succ", "_pred", "_succ_size", "_pred_size")

    def __init__(self, graph: PreferenceGraph):
        n = graph.item_count
        self.item_count = n
        succ = [0] * n
        pred = [0] * n
        topo = graph.topological_order()
        for v in reversed(topo):
            row = 1 << v
            for w in graph.out_neighbors(v):
                row |= succ[w]
            succ[v] = row
        for v in topo:
            row = 1 << v
            for u in graph.in_neighbors(v):
                row |= pred[u]
            pred[v] = row
        self._succ = succ
        self._pred = pred
        self._succ_size = [r.bit_count() for r in succ]
        self._pred_size = [r.bit_count() for r in pred]

    def dominates(self, u: int, v: int) -> bool:
        """True iff item u dominates item v (v is in succ[u])."""
        return (self._succ[u] >> v) & 1 == 1

    def succ_row(self, v: int) -> int:
        return self._succ[v]

    def pred_row(self, v: int) -> int:
        return self._pred[v]

    def succ_closed_size(self, v: int) -> int:
        return self._succ_size[v]

    def pred_closed_size(self, v: int) -> int:
        return self._pred_size[v]

    def comparable(self, u: int, v: int) -> bool:
        """True iff u and v are equal or one dominates the other."""
        return ((self._succ[u] >> v) & 1 or (self._succ[v] >> u) & 1) == 1


def reachability(graph: PreferenceGraph) -> ReachabilityIndex:
    """Materialize the domination relation of ``graph``."""
    return ReachabilityIndex(graph)


@dataclass(frozen=True)
class Allocation:
    """Pairwise-disjoint bundles of items, one per agent.

    ``bundles[i]`` is the set of items held by agent ``i``; items absent
    from every bundle are unassigned.
    """

    agent_count: int
    bundles: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.agent_count < 1:
            raise InvalidAllocation("agent_count must be positive")
        if len(self.bundles) != self.agent_count:
            raise InvalidAllocation(
                f"expected {self.agent_count} bundles, got {len(self.bundles)}"
            )
        union: set[int] = set()
        total = 0
        for bundle in self.bundles:
            union.update(bundle)
            total += len(bundle)
        if union and min(union) < 0:
            raise InvalidAllocation(f"negative item id {min(union)}")
        if total != len(union):
            seen: set[int] = set()
            for bundle in self.bundles:
                dup = seen & bundle
                if dup:
                    raise InvalidAllocation(f"item {min(dup)} assigned to two agents")
                seen |= bundle
            raise InvalidAllocation("bundles overlap")

    @staticmethod
    def from_bundles(agent_count: int, bundles: Iterable[Iterable[int]]) -> "Allocation":
        packed = tuple(frozenset(b) for b in bundles)
        if len(packed) < agent_count:
            packed = packed + tuple(frozenset() for _ in range(agent_count - len(packed)))
        return Allocation(agent_count, packed)

    @staticmethod
    def from_labeling(agent_count: int, labels: Labeling) -> "Allocation":
        buckets: list[set[int]] = [set() for _ in range(agent_count)]
        for v, lab in enumerate(labels):
            if lab is not None:
                buckets[lab].add(v)
        return Allocation(agent_count, tuple(frozenset(b) for b in buckets))

    def to_labeling(self, item_count: int) -> list[Optional[int]]:
        labels: list[Optional[int]] = [None] * item_count
        for i, bundle in enumerate(self.bundles):
            for v in bundle:
                if v >= item_count:
                    raise InvalidAllocation(f"item {v} out of range")
                labels[v] = i
        return labels

    def assigned_items(self) -> frozenset[int]:
        out: set[int] = set()
        for b in self.bundles:
            out |= b
        return frozenset(out)

    def validate_for(self, graph: PreferenceGraph) -> None:
        for b in self.bundles:
            for v in b:
                if v >= graph.item_count:
                    raise InvalidAllocation(
                        f"item {v} out of range for {graph.item_count} items"
                    )


@dataclass(frozen=True)
class DissatisfactionProfile:
    """Per-agent dissatisfaction counts; ``total`` is their sum."""

    per_agent: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.per_agent)

    def satisfactions(self, item_count: int) -> tuple[int, ...]:
        return tuple(item_count - d for d in self.per_agent)


def dissatisfaction(
    graph: PreferenceGraph,
    index: ReachabilityIndex | None,
    bundle: Iterable[int],
) -> int:
    """Number of items not dominated by any item of ``bundle``.

    With ``index=None`` falls back to a BFS over out-arcs, which avoids
    the quadratic index on very large graphs.
    """
    n = graph.item_count
    if index is not None:
        mask = 0
        for v in bundle:
            mask |= index.succ_row(v)
        return n - mask.bit_count()
    seen = bytearray(n)
    stack = []
    for v in bundle:
        if not seen[v]:
            seen[v] = 1
            stack.append(v)
    count = len(stack)
    out_flat, out_start, _, _ = graph.csr()
    while stack:
        v = stack.pop()
        for j in range(out_start[v], out_start[v + 1]):
            u = out_flat[j]
            if not seen[u]:
                seen[u] = 1
                count += 1
                stack.append(u)
    return n - count


def profile(
    graph: PreferenceGraph,
    index: ReachabilityIndex | None,
    allocation: Allocation,
) -> DissatisfactionProfile:
    """Per-agent dissatisfaction of ``allocation`` on ``graph``."""
    allocation.validate_for(graph)
    return DissatisfactionProfile(
        tuple(dissatisfaction(graph, index, b) for b in allocation.bundles)
    )


def weak_components(graph: PreferenceGraph) -> list[list[int]]:
    """Partition of items by connectivity of the underlying undirected graph.

    Components are each sorted and listed in order of their smallest item.
    """
    n = graph.item_count
    seen = bytearray(n)
    out_flat, out_start, in_flat, in_start = graph.csr()
    components: list[list[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = 1
        comp = [start]
        stack = [start]
        while stack:
            v = stack.pop()
            for j in range(out_start[v], out_start[v + 1]):
                u = out_flat[j]
                if not seen[u]:
                    seen[u] = 1
                    comp.append(u)
                    stack.append(u)
            for j in range(in_start[v], in_start[v + 1]):
                u = in_flat[j]
                if not seen[u]:
                    seen[u] = 1
                    comp.append(u)
                    stack.append(u)
        comp.sort()
        components.append(comp)
    return components


def induced_subgraph(
    graph: PreferenceGraph, items: Sequence[int]
) -> tuple[PreferenceGraph, list[int]]:
    """Subgraph on ``items`` with dense re-ids; returns (subgraph, old_ids).

    ``old_ids[new_id]`` recovers the original item id.
    """
    old_ids = sorted(items)
    new_of = {old: new for new, old in enumerate(old_ids)}
    arcs = []
    for old in old_ids:
        for h in graph.out_neighbors(old):
            if h in new_of:
                arcs.append((new_of[old], new_of[h]))
    names = None
    if graph.item_names is not None:
        names = [graph.item_names[old] for old in old_ids]
    return build_graph(len(old_ids), arcs, names), old_ids


class UndirectedGraph:
    """Small simple undirected graph (used for colorability and X-graphs)."""

    __slots__ = ("vertex_count", "edges", "_adj")

    def __init__(self, vertex_count: int, edges: Iterable[tuple[int, int]]):
        norm = set()
        for u, v in edges:
            if u == v:
                raise SelfLoop(u)
            if not (0 <= u < vertex_count) or not (0 <= v < vertex_count):
                raise OutOfRangeItem(max(u, v), vertex_count)
            norm.add((min(u, v), max(u, v)))
        self.vertex_count = vertex_count
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(norm))
        adj: list[list[int]] = [[] for _ in range(vertex_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = [sorted(a) for a in adj]

    def neighbors(self, v: int) -> list[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, UndirectedGraph)
            and self.vertex_count == other.vertex_count
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.vertex_count, self.edges))

    def __repr__(self) -> str:
        return f"UndirectedGraph(vertices={self.vertex_count}, edges={len(self.edges)})"


def iter_bits(mask: int):
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
