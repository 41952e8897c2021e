"""Graph-class recognition and decompositions for solver dispatch.

Recognizes the graph classes with dedicated exact solvers:

* polytrees / polyforests (underlying undirected graph is a forest),
* out-trees / out-forests (polyforest with all in-degrees <= 1),
* two-terminal series-parallel DAGs, recognized by exhaustive reduction:
  an internal vertex with in-degree 1 and out-degree 1 merges its two arcs
  in series, and duplicate arcs created along the way merge in parallel;
  the graph is series-parallel iff this ends with a single arc,
* out-cactus DAGs: the underlying graph's edges decompose into simple
  cycles and bridges (biconnected components), there is a unique global
  source, every cycle has a unique source and sink, and arcs from outside
  a cycle attach only at that cycle's source,
* width <= 2, via the minimum chain partition.

``classify`` evaluates the flags and picks a solver by the fixed priority
canonical > two_agents > polytree > series_parallel > out_cactus >
width_two > oracle_fallback.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import NotOutCactus, NotSeriesParallel
from .graph import (
    PreferenceGraph,
    ReachabilityIndex,
    induced_subgraph,
    reachability,
    weak_components,
)
from .matching import chain_partition


# -- series-parallel decomposition trees --------------------------------------


class SpTree:
    """Node of a series-parallel decomposition; leaves are single arcs."""

    __slots__ = ("source", "sink", "size")

    source: int
    sink: int
    size: int  # number of distinct vertices in the represented subgraph

    def arc_list(self) -> list[tuple[int, int]]:
        """Arcs of the represented subgraph (replayed left-to-right)."""
        arcs: list[tuple[int, int]] = []
        stack: list[SpTree] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, SpLeaf):
                arcs.append((node.source, node.sink))
            else:
                stack.append(node.right)  # type: ignore[attr-defined]
                stack.append(node.left)  # type: ignore[attr-defined]
        return arcs


class SpLeaf(SpTree):
    __slots__ = ()

    def __init__(self, tail: int, head: int):
        self.source = tail
        self.sink = head
        self.size = 2

    def __repr__(self):
        return f"SpLeaf({self.source}->{self.sink})"


class SpSeries(SpTree):
    __slots__ = ("left", "right")

    def __init__(self, left: SpTree, right: SpTree):
        if left.sink != right.source:
            raise ValueError("series composition requires left.sink == right.source")
        self.left = left
        self.right = right
        self.source = left.source
        self.sink = right.sink
        self.size = left.size + right.size - 1

    def __repr__(self):
        return f"SpSeries({self.left!r}, {self.right!r})"


class SpParallel(SpTree):
    __slots__ = ("left", "right")

    def __init__(self, left: SpTree, right: SpTree):
        if left.source != right.source or left.sink != right.sink:
            raise ValueError("parallel composition requires matching terminals")
        self.left = left
        self.right = right
        self.source = left.source
        self.sink = left.sink
        self.size = left.size + right.size - 2

    def __repr__(self):
        return f"SpParallel({self.left!r}, {self.right!r})"


SpDecomposition = SpTree


def sp_decompose(graph: PreferenceGraph) -> SpTree:
    """Decompose ``graph`` as a two-terminal series-parallel DAG.

    Raises :class:`NotSeriesParallel` with the violated condition when the
    graph is not series-parallel (this includes graphs with more than one
    source or sink, and disconnected graphs).
    """
    n = graph.item_count
    if n < 2 or graph.arc_count == 0:
        raise NotSeriesParallel("a series-parallel graph has >= 2 vertices and an arc")
    sources = graph.sources()
    sinks = graph.sinks()
    if len(sources) != 1:
        raise NotSeriesParallel(f"expected a unique source, found {len(sources)}")
    if len(sinks) != 1:
        raise NotSeriesParallel(f"expected a unique sink, found {len(sinks)}")
    s, t = sources[0], sinks[0]

    out: dict[int, dict[int, SpTree]] = {v: {} for v in range(n)}
    inn: dict[int, dict[int, SpTree]] = {v: {} for v in range(n)}
    for tail, head in graph.arcs:
        out[tail][head] = inn[head][tail] = SpLeaf(tail, head)

    def merge_parallel(u: int, w: int, tree: SpTree) -> None:
        existing = out[u].get(w)
        if existing is not None:
            tree = SpParallel(existing, tree)
        out[u][w] = inn[w][u] = tree

    queue = deque(
        v for v in range(n) if len(inn[v]) == 1 and len(out[v]) == 1
    )
    alive = n
    while queue:
        v = queue.popleft()
        if len(inn[v]) != 1 or len(out[v]) != 1:
            continue
        (u, left) = next(iter(inn[v].items()))
        (w, right) = next(iter(out[v].items()))
        del out[u][v]
        del inn[w][v]
        inn[v].clear()
        out[v].clear()
        alive -= 1
        merge_parallel(u, w, SpSeries(left, right))
        for x in (u, w):
            if len(inn[x]) == 1 and len(out[x]) == 1:
                queue.append(x)

    if alive == 2 and len(out[s]) == 1 and t in out[s] and not inn[s] and not out[t]:
        return out[s][t]
    raise NotSeriesParallel(
        f"reduction stuck with {alive} vertices; graph is not series-parallel"
    )


def replay_matches(graph: PreferenceGraph, decomposition: SpTree) -> bool:
    """True iff the decomposition replays to exactly the graph's arc set."""
    return (
        decomposition.size == graph.item_count
        and sorted(decomposition.arc_list()) == graph.arcs
    )


# -- out-cactus decomposition --------------------------------------------------


@dataclass(frozen=True)
class CactusCycle:
    """One cycle of an out-cactus; bridges appear as single-arc cycles.

    ``vertices`` are in topological order (the cycle source first, sink
    last); ``arcs`` is the sorted arc set of the cycle.
    """

    vertices: tuple[int, ...]
    source: int
    sink: int
    arcs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class CactusDecomposition:
    """Cycles of an out-cactus in a valid top-down processing order."""

    root: int
    cycles: tuple[CactusCycle, ...]


def _biconnected_edge_components(
    n: int, edges: list[tuple[int, int]]
) -> list[list[int]]:
    """Edge ids of each biconnected component of a simple undirected graph.

    Iterative Hopcroft-Tarjan lowpoint search with an edge stack.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for eid, (u, v) in enumerate(edges):
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    disc = [-1] * n
    low = [0] * n
    comps: list[list[int]] = []
    estack: list[int] = []
    timer = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        stack: list[tuple[int, int, int]] = [(root, -1, 0)]  # vertex, entry edge, adj pos
        disc[root] = low[root] = timer
        timer += 1
        while stack:
            v, pe, i = stack.pop()
            if i < len(adj[v]):
                stack.append((v, pe, i + 1))
                u, eid = adj[v][i]
                if eid == pe:
                    continue
                if disc[u] < 0:
                    estack.append(eid)
                    disc[u] = low[u] = timer
                    timer += 1
                    stack.append((u, eid, 0))
                elif disc[u] < disc[v]:
                    estack.append(eid)
                    if disc[u] < low[v]:
                        low[v] = disc[u]
            else:
                if pe >= 0:
                    a, b = edges[pe]
                    parent = a if disc[a] < disc[b] else b
                    if low[v] < low[parent]:
                        low[parent] = low[v]
                    if low[v] >= disc[parent]:
                        comp = []
                        while True:
                            eid = estack.pop()
                            comp.append(eid)
                            if eid == pe:
                                break
                        comps.append(comp)
    return comps


def cactus_decompose(graph: PreferenceGraph) -> CactusDecomposition:
    """Decompose ``graph`` as an out-cactus, or refuse with the violated rule.

    The cycles (bridges included as single-arc cycles) are emitted sorted
    by the topological rank of their sources, a valid top-down order.
    """
    n = graph.item_count
    if n == 0:
        raise NotOutCactus("empty graph")
    sources = graph.sources()
    if len(sources) != 1:
        raise NotOutCactus(f"expected a unique source, found {len(sources)}")
    root = sources[0]
    arcs = graph.arcs
    rank = {v: i for i, v in enumerate(graph.topological_order())}

    comps = _biconnected_edge_components(n, arcs)
    cycles: list[CactusCycle] = []
    for comp in comps:
        if len(comp) == 1:
            tail, head = arcs[comp[0]]
            cycles.append(CactusCycle((tail, head), tail, head, ((tail, head),)))
            continue
        verts: set[int] = set()
        for eid in comp:
            verts.update(arcs[eid])
        if len(comp) != len(verts):
            raise NotOutCactus(
                "underlying graph is not a cactus: an edge lies on two cycles"
            )
        out_deg = {v: 0 for v in verts}
        in_deg = {v: 0 for v in verts}
        for eid in comp:
            t, h = arcs[eid]
            out_deg[t] += 1
            in_deg[h] += 1
        cyc_sources = [v for v in verts if in_deg[v] == 0]
        cyc_sinks = [v for v in verts if out_deg[v] == 0]
        if len(cyc_sources) != 1 or len(cyc_sinks) != 1:
            raise NotOutCactus(
                f"cycle lacks a unique source/sink "
                f"({len(cyc_sources)} sources, {len(cyc_sinks)} sinks)"
            )
        s = cyc_sources[0]
        for x in verts:
            if x == s:
                continue
            for u in graph.in_neighbors(x):
                if u not in verts:
                    raise NotOutCactus(
                        f"arc ({u}, {x}) enters a cycle away from its source {s}"
                    )
        ordered = tuple(sorted(verts, key=lambda v: rank[v]))
        cycles.append(
            CactusCycle(
                ordered, s, cyc_sinks[0], tuple(sorted(arcs[eid] for eid in comp))
            )
        )

    cycles.sort(key=lambda c: (rank[c.source], rank[c.sink], c.vertices))
    return CactusDecomposition(root, tuple(cycles))


# -- polytree / out-tree tests, width ------------------------------------------


def is_polytree(graph: PreferenceGraph) -> bool:
    """True iff the underlying undirected graph is a forest.

    Polyforests are accepted; disconnected inputs are solved per weak
    component downstream.
    """
    return graph.arc_count == graph.item_count - len(weak_components(graph))


def is_out_tree(graph: PreferenceGraph) -> bool:
    """True iff every weak component is a rooted tree with arcs pointing
    away from its root (equivalently: a polyforest with in-degrees <= 1)."""
    if not is_polytree(graph):
        return False
    return all(graph.in_degree(v) <= 1 for v in range(graph.item_count))


def width(graph: PreferenceGraph, index: ReachabilityIndex) -> int:
    """Maximum antichain size, computed as the minimum chain-partition size."""
    return chain_partition(graph, index).size


# -- classifier -----------------------------------------------------------------


CANONICAL = "canonical"
TWO_AGENTS = "two_agents"
POLYTREE = "polytree"
SERIES_PARALLEL = "series_parallel"
OUT_CACTUS = "out_cactus"
WIDTH_TWO = "width_two"
ORACLE_FALLBACK = "oracle_fallback"
UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class ClassReport:
    """Structure flags plus the solver chosen by the dispatch priority.

    ``width`` is None when the graph exceeded ``width_limit`` and no
    earlier class applied, i.e. when the quadratic chain-partition check
    was deliberately skipped.
    """

    item_count: int
    agent_count: int
    is_polytree: bool
    is_out_tree: bool
    is_sp: bool
    is_out_cactus: bool
    width: int | None
    has_two_agents_shortcut: bool
    chosen_solver: str

    def to_json_dict(self) -> dict:
        return {
            "item_count": self.item_count,
            "agent_count": self.agent_count,
            "is_polytree": self.is_polytree,
            "is_out_tree": self.is_out_tree,
            "is_sp": self.is_sp,
            "is_out_cactus": self.is_out_cactus,
            "width": self.width,
            "has_two_agents_shortcut": self.has_two_agents_shortcut,
            "chosen_solver": self.chosen_solver,
        }


def _all_components(graph: PreferenceGraph, check) -> bool:
    comps = weak_components(graph)
    if len(comps) == 1:
        return check(graph)
    for comp in comps:
        sub, _ = induced_subgraph(graph, comp)
        if not check(sub):
            return False
    return True


def _component_is_sp(g: PreferenceGraph) -> bool:
    try:
        sp_decompose(g)
        return True
    except NotSeriesParallel:
        return False


def _component_is_cactus(g: PreferenceGraph) -> bool:
    try:
        cactus_decompose(g)
        return True
    except NotOutCactus:
        return False


def classify(
    graph: PreferenceGraph,
    k: int,
    *,
    width_limit: int | None = 1024,
    oracle_limit: int = 12,
) -> ClassReport:
    """Fill the structure flags and choose a solver.

    Priority: canonical (k >= n) > two_agents (k == 2) > polytree >
    series_parallel > out_cactus > width_two > oracle_fallback (n small
    enough for exhaustive search) > unsupported.
    """
    n = graph.item_count
    polytree = is_polytree(graph)
    out_tree = is_out_tree(graph)
    sp = _all_components(graph, _component_is_sp)
    cactus = _all_components(graph, _component_is_cactus)

    w: int | None = None
    if width_limit is None or n <= width_limit:
        w = width(graph, reachability(graph))

    if k >= n:
        chosen = CANONICAL
    elif k == 2:
        chosen = TWO_AGENTS
    elif polytree:
        chosen = POLYTREE
    elif sp:
        chosen = SERIES_PARALLEL
    elif cactus:
        chosen = OUT_CACTUS
    elif w is not None and w <= 2:
        chosen = WIDTH_TWO
    elif n <= oracle_limit:
        chosen = ORACLE_FALLBACK
    else:
        chosen = UNSUPPORTED

    return ClassReport(
        item_count=n,
        agent_count=k,
        is_polytree=polytree,
        is_out_tree=out_tree,
        is_sp=sp,
        is_out_cactus=cactus,
        width=w,
        has_two_agents_shortcut=(k == 2),
        chosen_solver=chosen,
    )
