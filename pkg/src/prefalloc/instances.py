"""Instance generators, the coloring reduction, and bundled fixtures.

All generators draw from :class:`SplitMix64`, a 64-bit PRNG with fixed
published constants, so corpora are reproducible from the seed alone, in
any language.  Each generator constructs membership in its class
directly (tree orientations, composed fragments, cycles glued at their
sources, two covering chains), so the output always passes the matching
recognizer.

``reduce_coloring_to_instance`` subdivides every edge of an undirected
graph and orients both halves toward the new vertex; the result is a
one-way directed bipartite preference graph whose X-graph is the input,
linking k-colorability to the existence of a good allocation for
k > max in-degree.
"""

from __future__ import annotations

from typing import Mapping

from .errors import NotOneWayBipartite, PreconditionViolated
from .graph import Allocation, PreferenceGraph, UndirectedGraph, build_graph


class SplitMix64:
    """splitmix64: state advances by 0x9E3779B97F4A7C15; output is the
    state scrambled by two xor-shift-multiply rounds (0xBF58476D1CE4E5B9,
    0x94D049BB133111EB).  ``randrange`` reduces by remainder, which is
    biased below 2^-32 for the bounds used here."""

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = seed & self._MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & self._MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def randrange(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound

    def chance(self, num: int, den: int) -> bool:
        return self.randrange(den) < num


def random_polytree(n: int, seed: int) -> PreferenceGraph:
    """Random weakly connected polytree: a random recursive tree with each
    edge oriented by a coin flip."""
    if n < 1:
        raise PreconditionViolated("n must be >= 1")
    rng = SplitMix64(seed)
    arcs = []
    for v in range(1, n):
        p = rng.randrange(v)
        arcs.append((p, v) if rng.chance(1, 2) else (v, p))
    return build_graph(n, arcs)


def random_out_tree(n: int, seed: int) -> PreferenceGraph:
    """Random recursive tree with all arcs directed away from the root 0."""
    if n < 1:
        raise PreconditionViolated("n must be >= 1")
    rng = SplitMix64(seed)
    arcs = [(rng.randrange(v), v) for v in range(1, n)]
    return build_graph(n, arcs)


def _sp_fragment(rng: SplitMix64, depth: int):
    """Returns (arcs, source, sink, vertex_count, has_direct_arc)."""
    if depth <= 0 or rng.chance(1, 4):
        return [(0, 1)], 0, 1, 2, True
    a_arcs, sa, ta, na, da = _sp_fragment(rng, depth - 1)
    b_arcs, sb, tb, nb, db = _sp_fragment(rng, depth - 1)
    if rng.chance(1, 2):
        # series: identify b's source with a's sink
        def remap(v: int) -> int:
            if v == sb:
                return ta
            return na + (v if v < sb else v - 1)

        arcs = a_arcs + [(remap(u), remap(v)) for u, v in b_arcs]
        return arcs, sa, remap(tb), na + nb - 1, da
    # parallel: identify both terminals; avoid duplicating a direct arc
    if da and db:
        b_arcs = [(u, v) for u, v in b_arcs] + [(tb, nb)]
        tb, nb, db = nb, nb + 1, False

    def remap_p(v: int) -> int:
        if v == sb:
            return sa
        if v == tb:
            return ta
        return na + v - (1 if v > sb else 0) - (1 if v > tb else 0)

    arcs = a_arcs + [(remap_p(u), remap_p(v)) for u, v in b_arcs]
    return arcs, sa, ta, na + nb - 2, da or db


def random_sp(depth: int, seed: int) -> PreferenceGraph:
    """Random two-terminal series-parallel graph from a random composition
    tree of the given depth (size roughly doubles per level)."""
    rng = SplitMix64(seed)
    arcs, _, _, n, _ = _sp_fragment(rng, depth)
    return build_graph(n, arcs)


def random_out_cactus(n: int, seed: int) -> PreferenceGraph:
    """Random out-cactus grown from a root by attaching bridges and cycles
    (two directed paths glued at a shared source and sink)."""
    if n < 1:
        raise PreconditionViolated("n must be >= 1")
    rng = SplitMix64(seed)
    arcs = []
    count = 1
    while count < n:
        attach = rng.randrange(count)
        remaining = n - count
        if remaining >= 2 and rng.chance(1, 2):
            extra = 2 + rng.randrange(min(remaining, 6) - 1)
            a = 1 + rng.randrange(extra)  # path lengths a >= 1, b >= 1, a + b = extra + 1
            sink = count + extra - 1
            prev = attach
            for i in range(a - 1):
                arcs.append((prev, count + i))
                prev = count + i
            arcs.append((prev, sink))
            prev = attach
            for i in range(extra - a):  # b - 1 interior vertices
                arcs.append((prev, count + a - 1 + i))
                prev = count + a - 1 + i
            arcs.append((prev, sink))
            count += extra
        else:
            arcs.append((attach, count))
            count += 1
    return build_graph(n, arcs)


def random_width_two(n: int, seed: int) -> PreferenceGraph:
    """Random DAG of width <= 2: two chains covering all items plus random
    chain-crossing arcs consistent with the item order."""
    if n < 1:
        raise PreconditionViolated("n must be >= 1")
    rng = SplitMix64(seed)
    chain_of = [rng.randrange(2) for _ in range(n)]
    arcs = []
    last = [-1, -1]
    for v in range(n):
        c = chain_of[v]
        if last[c] >= 0:
            arcs.append((last[c], v))
        last[c] = v
    for u in range(n):
        for v in range(u + 1, n):
            if chain_of[u] != chain_of[v] and rng.chance(1, 4):
                arcs.append((u, v))
    return build_graph(n, sorted(set(arcs)))


def random_dag(n: int, p: float, seed: int) -> PreferenceGraph:
    """Random DAG: arcs follow a hidden random item order with probability
    ``p`` per pair, then ids are shuffled."""
    if n < 0:
        raise PreconditionViolated("n must be >= 0")
    rng = SplitMix64(seed)
    threshold = int(p * (1 << 64))
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.randrange(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    arcs = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.next_u64() < threshold:
                arcs.append((perm[u], perm[v]))
    return build_graph(n, arcs)


def random_undirected(n: int, p: float, seed: int) -> UndirectedGraph:
    """Erdos-Renyi undirected graph on n vertices with edge probability p."""
    rng = SplitMix64(seed)
    threshold = int(p * (1 << 64))
    edges = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if rng.next_u64() < threshold
    ]
    return UndirectedGraph(n, edges)


# -- coloring reduction ---------------------------------------------------------


def reduce_coloring_to_instance(h: UndirectedGraph, k: int) -> PreferenceGraph:
    """Preference graph whose good allocations for k agents correspond to
    proper k-colorings of ``h``.

    Vertices are V(h) followed by one new vertex per edge; each edge
    {u, v} becomes the two arcs (u, w_e) and (v, w_e).  The result is
    one-way directed bipartite with maximum in-degree 2, and its X-graph
    is ``h`` itself.
    """
    if k < 3:
        raise PreconditionViolated("the coloring reduction is stated for k >= 3")
    nv = h.vertex_count
    arcs = []
    for i, (u, v) in enumerate(h.edges):
        arcs.append((u, nv + i))
        arcs.append((v, nv + i))
    return build_graph(nv + len(h.edges), arcs)


def _check_one_way_bipartite(graph: PreferenceGraph) -> list[int]:
    """Return the sorted source side X, or raise :class:`NotOneWayBipartite`."""
    for v in range(graph.item_count):
        if graph.in_degree(v) > 0 and graph.out_degree(v) > 0:
            raise NotOneWayBipartite(
                f"item {v} lies on a directed path of length two"
            )
    return [v for v in range(graph.item_count) if graph.in_degree(v) == 0]


def x_vertices(graph: PreferenceGraph) -> list[int]:
    """The source side X of a one-way directed bipartite graph, ascending."""
    return _check_one_way_bipartite(graph)


def x_graph(graph: PreferenceGraph) -> UndirectedGraph:
    """The undirected co-parent graph on the source side X.

    Vertex i of the result is the i-th smallest source of ``graph``
    (see :func:`x_vertices`); two sources are adjacent iff they share an
    out-neighbor.
    """
    xs = _check_one_way_bipartite(graph)
    xid = {v: i for i, v in enumerate(xs)}
    edges = set()
    for y in range(graph.item_count):
        parents = graph.in_neighbors(y)
        for i in range(len(parents)):
            for j in range(i + 1, len(parents)):
                a, b = xid[parents[i]], xid[parents[j]]
                edges.add((min(a, b), max(a, b)))
    return UndirectedGraph(len(xs), sorted(edges))


def good_allocation_from_coloring(
    graph: PreferenceGraph,
    coloring: Mapping[int, int],
    agent_count: int,
) -> Allocation:
    """Turn a proper coloring of the X-graph into a good allocation.

    ``coloring`` maps each source item to a color < ``agent_count``;
    sources colored c go to agent c, and every sink goes to the smallest
    agent distinct from all of its parents' agents.  Requires
    ``agent_count`` to exceed the maximum in-degree.
    """
    xs = _check_one_way_bipartite(graph)
    k = agent_count
    if k <= graph.max_in_degree():
        raise PreconditionViolated(
            f"need more agents ({k}) than the maximum in-degree "
            f"({graph.max_in_degree()})"
        )
    labels: list[int | None] = [None] * graph.item_count
    for v in xs:
        c = coloring[v]
        if not 0 <= c < k:
            raise PreconditionViolated(f"color {c} out of range for {k} agents")
        labels[v] = c
    for y in range(graph.item_count):
        parents = graph.in_neighbors(y)
        if not parents:
            continue
        parent_agents = {labels[p] for p in parents}
        if len(parent_agents) != len(parents):
            raise PreconditionViolated("coloring is not proper on the X-graph")
        labels[y] = next(a for a in range(k) if a not in parent_agents)
    return Allocation.from_labeling(k, labels)


# -- bundled fixtures -------------------------------------------------------------

_FIG1_NAMES = ["tablet"] + [chr(ord("a") + i) for i in range(13)]
_FIG1_ARCS = [
    (0, 1), (0, 2), (0, 3),   # tablet -> a, b, c
    (1, 4),                   # a -> d
    (2, 8), (2, 9),           # b -> h, i
    (3, 10), (3, 12),         # c -> j, l
    (4, 5),                   # d -> e
    (5, 6), (5, 7),           # e -> f, g
    (10, 11),                 # j -> k
    (12, 13),                 # l -> m
]

_FIG2_NAMES = [str(i) for i in range(1, 9)]
_FIG2_ARCS = [(0, 2), (1, 5), (2, 5), (3, 5), (3, 6), (4, 6), (5, 7)]

_FIG3_NAMES = ["x1", "x2", "x3", "x4", "y12", "y13", "y14", "y23", "y24", "y34"]
_FIG3_ARCS = [
    (0, 4), (1, 4),
    (0, 5), (2, 5),
    (0, 6), (3, 6),
    (1, 7), (2, 7),
    (1, 8), (3, 8),
    (2, 9), (3, 9),
]


def fixtures() -> dict[str, PreferenceGraph]:
    """Three bundled sample instances.

    * ``fig1``: a 14-item out-tree (a toy-preference hierarchy),
    * ``fig2``: an 8-item polytree,
    * ``fig3``: a 10-item one-way directed bipartite graph whose X-graph
      is the complete graph on 4 vertices (so no good allocation exists
      for 3 agents, but one does for 4).
    """
    return {
        "fig1": build_graph(14, _FIG1_ARCS, _FIG1_NAMES),
        "fig2": build_graph(8, _FIG2_ARCS, _FIG2_NAMES),
        "fig3": build_graph(10, _FIG3_ARCS, _FIG3_NAMES),
    }


def fig2_reference_allocation() -> Allocation:
    """The worked 3-agent split of ``fig2`` with profile (2, 5, 4).

    Not optimal (total 11 against a lower bound of 9); useful as a known
    not-good allocation in tests and demos.
    """
    return Allocation.from_bundles(3, [{1, 3, 4}, {5, 6}, {0, 2, 7}])
