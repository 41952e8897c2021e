"""Exact allocation solvers, one per supported graph class.

Every solver returns an :class:`~prefalloc.graph.Allocation`; the
certificates module verifies optimality independently.  The tree, two-
agent, series-parallel, out-cactus and canonical constructions always
produce good allocations (hence meet the lower bound exactly); the
width-2 solver is exact through a minimum-weight matching reduction and
the oracle fallback through exhaustive search, neither of which needs a
good allocation to exist.

Solver tags used by :func:`solve_auto` match the classifier's constants.
"""

from __future__ import annotations

from dataclasses import dataclass

from .certificates import Certificate, certify
from .errors import (
    DecompositionMismatch,
    InternalInconsistency,
    NotOutTree,
    NotPolytree,
    PreconditionViolated,
    Unsupported,
    WidthExceeded,
)
from .graph import (
    Allocation,
    PreferenceGraph,
    ReachabilityIndex,
    induced_subgraph,
    reachability,
    weak_components,
)
from .matching import BipartiteGraph, chain_partition, min_weight_k_matching
from .recognize import (
    CANONICAL,
    ORACLE_FALLBACK,
    OUT_CACTUS,
    POLYTREE,
    SERIES_PARALLEL,
    TWO_AGENTS,
    WIDTH_TWO,
    CactusDecomposition,
    ClassReport,
    SpLeaf,
    SpSeries,
    SpTree,
    cactus_decompose,
    classify,
    is_out_tree,
    replay_matches,
    sp_decompose,
)

# Below this size the pure-Python polytree loop beats JIT dispatch overhead.
_NUMBA_MIN_ITEMS = 5000


def solve_canonical_many_agents(graph: PreferenceGraph, k: int) -> Allocation:
    """With at least as many agents as items, give each item to its own agent.

    Optimal independently of the arcs; agents n..k-1 receive empty bundles.
    """
    n = graph.item_count
    if k < n or k < 1:
        raise PreconditionViolated(f"canonical solver needs k >= n, got k={k}, n={n}")
    bundles = [frozenset((v,)) for v in range(n)]
    bundles.extend(frozenset() for _ in range(k - n))
    return Allocation(k, tuple(bundles))


def solve_two_agents(graph: PreferenceGraph) -> Allocation:
    """Two agents: agent 0 takes all sources, agent 1 the sources of the rest.

    Always a good allocation, in O(n + m).
    """
    n = graph.item_count
    if n < 2:
        raise PreconditionViolated("two-agent solver needs n >= 2")
    src = set(graph.sources())
    second = [
        v
        for v in range(n)
        if v not in src and all(u in src for u in graph.in_neighbors(v))
    ]
    return Allocation(2, (frozenset(src), frozenset(second)))


def solve_out_tree(graph: PreferenceGraph, k: int) -> Allocation:
    """On out-trees (or out-forests): items at depth d < k go to agent d.

    Depth is the distance from the component root; deeper items stay
    unassigned.  The result is good.
    """
    if k < 1:
        raise PreconditionViolated("k must be >= 1")
    if not is_out_tree(graph):
        raise NotOutTree("graph is not an out-tree or out-forest")
    n = graph.item_count
    depth = [0] * n
    order = graph.topological_order()
    for v in order:
        for u in graph.out_neighbors(v):
            depth[u] = depth[v] + 1
    buckets: list[set[int]] = [set() for _ in range(k)]
    for v in range(n):
        if depth[v] < k:
            buckets[depth[v]].add(v)
    return Allocation(k, tuple(frozenset(b) for b in buckets))


def _polytree_core_py(n, k, s, out_flat, out_start, in_flat, in_start):
    q = [-1] * n
    label = [-1] * n
    cur = in_start[:n]
    work = [0] * (2 * n + 2)
    head = n
    tail = n + 1
    work[head] = s
    q[s] = k - 1
    while head < tail:
        v = work[head]
        c = cur[v]
        end = in_start[v + 1]
        while c < end and q[in_flat[c]] >= 0:
            c += 1
        cur[v] = c
        if c < end:
            u = in_flat[c]
            q[u] = q[v]
            head -= 1
            work[head] = u
        else:
            qv = q[v]
            label[v] = qv
            qn = qv + 1
            if qn == k:
                qn = 0
            for j in range(out_start[v], out_start[v + 1]):
                u = out_flat[j]
                if q[u] < 0:
                    work[tail] = u
                    tail += 1
                q[u] = qn
            head += 1
    return label


def solve_polytree(graph: PreferenceGraph, k: int, *, _impl: str | None = None) -> Allocation:
    """List-driven linear-time solver for weakly connected polytrees.

    Starting from the smallest source s with agent counter k-1, the work
    list repeatedly either pulls an unvisited in-neighbor of its first
    item to the front (inheriting the counter), or assigns the first item
    to its counter's agent and appends unvisited out-neighbors with the
    counter advanced by one mod k.  A per-item cursor over the in-neighbor
    list keeps the unvisited-in-neighbor test amortized O(1), so the whole
    run is O(n).  The result is a good allocation.

    ``_impl`` forces the "python" or "numba" code path (both produce
    identical output); by default large instances use the compiled path
    when numba is importable.
    """
    if k < 1:
        raise PreconditionViolated("k must be >= 1")
    n = graph.item_count
    if n == 0:
        return Allocation(k, tuple(frozenset() for _ in range(k)))
    if graph.arc_count != n - 1:
        raise NotPolytree(
            f"a polytree on {n} items has {n - 1} arcs, got {graph.arc_count}"
        )
    s = next(v for v in range(n) if graph.in_degree(v) == 0)

    use_numba = _impl == "numba" or (
        _impl is None and n >= _NUMBA_MIN_ITEMS
    )
    labels = None
    if use_numba:
        try:
            from ._polytree_fast import polytree_core
        except ImportError:
            if _impl == "numba":
                raise
        else:
            out_flat, out_start, in_flat, in_start = graph.csr_numpy()
            labels_np = polytree_core(n, k, s, out_flat, out_start, in_flat, in_start)
            if int(labels_np.min()) < 0:
                raise NotPolytree("graph is not weakly connected")
            import numpy as np

            buckets = [
                frozenset(np.flatnonzero(labels_np == a).tolist()) for a in range(k)
            ]
            return Allocation(k, tuple(buckets))
    labels = _polytree_core_py(n, k, s, *graph.csr())
    if min(labels) < 0:
        raise NotPolytree("graph is not weakly connected")
    buckets_py: list[list[int]] = [[] for _ in range(k)]
    for v, a in enumerate(labels):
        buckets_py[a].append(v)
    return Allocation(k, tuple(frozenset(b) for b in buckets_py))


# -- series-parallel -------------------------------------------------------------


def _sp_family_labeling(root: SpTree, k: int) -> dict[int, int]:
    """Good labeling of a series-parallel graph for k <= |V| agents.

    Labels are -1 for the reserved source agent and 0..k-2 otherwise;
    unlabeled items are omitted.  Built bottom-up over the decomposition:
    each subgraph carries a good labeling using all of its own agent
    budget, the source always holding the reserved label.  A series node
    splits the budget between its parts and shifts the lower part's
    numeric labels past the upper part's; a parallel node relabels the
    second part's interior injectively so that, together with the first
    part, all k agents receive an item.
    """
    # top-down pass: per-node budgets
    order: list[tuple[SpTree, int]] = []
    splits: dict[int, tuple[int, int]] = {}
    stack: list[tuple[SpTree, int]] = [(root, k)]
    while stack:
        node, kap = stack.pop()
        if kap < 1 or kap > node.size:
            raise InternalInconsistency(f"budget {kap} out of range for node size {node.size}")
        order.append((node, kap))
        if isinstance(node, SpLeaf):
            continue
        k1 = min(kap, node.left.size)  # type: ignore[attr-defined]
        if isinstance(node, SpSeries):
            k2 = min(kap - k1 + 1, node.right.size)
        else:
            k2 = min(kap, node.right.size)  # type: ignore[attr-defined]
        splits[id(node)] = (k1, k2)
        stack.append((node.left, k1))  # type: ignore[attr-defined]
        stack.append((node.right, k2))  # type: ignore[attr-defined]

    # bottom-up pass: children appear after their parent in `order`
    results: dict[int, dict[int, int]] = {}
    for node, kap in reversed(order):
        if isinstance(node, SpLeaf):
            lam = {node.source: -1}
            if kap == 2:
                lam[node.sink] = 0
            results[id(node)] = lam
            continue
        k1, k2 = splits[id(node)]
        lam = results.pop(id(node.left))
        lam2 = results.pop(id(node.right))
        if isinstance(node, SpSeries):
            c = node.left.sink
            if k2 >= 2:
                for v, lab in lam2.items():
                    if v != c and lab >= 0:
                        lam[v] = lab + k1 - 1
        else:
            s, t = node.source, node.sink
            if k2 >= 2:
                inner = sorted(
                    {lab for v, lab in lam2.items() if v != s and v != t and lab >= 0}
                )
                need = kap - k1
                if need > len(inner):
                    raise InternalInconsistency(
                        f"parallel relabeling short of agents: need {need}, have {len(inner)}"
                    )
                sigma: dict[int, int] = {}
                for i in range(need):
                    sigma[inner[i]] = k1 - 1 + i
                free = iter(
                    a for a in range(kap - 1) if not (k1 - 1 <= a < k1 - 1 + need)
                )
                for lab in range(k2 - 1):
                    if lab not in sigma:
                        sigma[lab] = next(free)
                for v, lab in lam2.items():
                    if v != s and v != t and lab >= 0:
                        lam[v] = sigma[lab]
        results[id(node)] = lam
    return results.pop(id(root))


def solve_series_parallel(
    graph: PreferenceGraph, decomposition: SpTree, k: int
) -> Allocation:
    """Good allocation on a two-terminal series-parallel graph, 1 <= k <= n.

    The reserved source label maps to agent 0 and numeric label j to
    agent j+1.
    """
    n = graph.item_count
    if not 1 <= k <= n:
        raise PreconditionViolated(f"series-parallel solver needs 1 <= k <= n, got k={k}")
    if not replay_matches(graph, decomposition):
        raise DecompositionMismatch("decomposition does not replay to the graph")
    lam = _sp_family_labeling(decomposition, k)
    buckets: list[set[int]] = [set() for _ in range(k)]
    for v, lab in lam.items():
        buckets[0 if lab == -1 else lab + 1].add(v)
    return Allocation(k, tuple(frozenset(b) for b in buckets))


# -- out-cactus ------------------------------------------------------------------


def solve_out_cactus(
    graph: PreferenceGraph, decomposition: CactusDecomposition, k: int
) -> Allocation:
    """Good allocation on an out-cactus, 1 <= k <= n.

    The root goes to agent 0.  Cycles are processed top-down; within a
    cycle with source s, the agents holding nothing above s get the cycle
    vertices in topological order, one each; any remaining vertices go to
    the smallest such agent holding none of their predecessors, or stay
    unassigned.
    """
    n = graph.item_count
    if not 1 <= k <= n:
        raise PreconditionViolated(f"out-cactus solver needs 1 <= k <= n, got k={k}, n={n}")
    cycle_arcs = sorted(arc for cyc in decomposition.cycles for arc in cyc.arcs)
    if cycle_arcs != graph.arcs or not (0 <= decomposition.root < n):
        raise DecompositionMismatch("decomposition does not replay to the graph")
    if graph.in_degree(decomposition.root) != 0:
        raise DecompositionMismatch("decomposition root is not a source")
    index = reachability(graph)
    labels: list[int | None] = [None] * n
    held = [0] * k  # bitmask of items per agent
    labels[decomposition.root] = 0
    held[0] = 1 << decomposition.root
    for cyc in decomposition.cycles:
        pred_s = index.pred_row(cyc.source)
        fresh = [a for a in range(k) if held[a] & pred_s == 0]
        others = [x for x in cyc.vertices if x != cyc.source]
        for i, x in enumerate(others):
            if i < len(fresh):
                agent = fresh[i]
            else:
                pred_x = index.pred_row(x) & ~(1 << x)
                agent = next((a for a in fresh if held[a] & pred_x == 0), -1)
                if agent < 0:
                    continue
            labels[x] = agent
            held[agent] |= 1 << x
    return Allocation.from_labeling(k, labels)


# -- width two -------------------------------------------------------------------


def solve_width_two(
    graph: PreferenceGraph, index: ReachabilityIndex, k: int
) -> Allocation:
    """Exact solver for graphs of width at most 2 via min-weight matching.

    Builds the auxiliary bipartite graph on items plus one primed copy per
    item: an edge {x, y} for every two-item antichain and an edge {v, v'}
    for every item, weighted by the dissatisfaction of an agent holding
    exactly that bundle.  A minimum-weight matching of cardinality k
    translates edge-for-bundle into an optimal allocation.
    """
    n = graph.item_count
    cp = chain_partition(graph, index)
    if cp.size > 2:
        raise WidthExceeded(f"graph has width {cp.size} > 2")
    if not 1 <= k <= n:
        raise PreconditionViolated(f"width-2 solver needs 1 <= k <= n, got k={k}")
    side = [0] * n
    for ci, chain in enumerate(cp.chains):
        for v in chain:
            side[v] = ci
    # node u < n is item u; node u >= n is the primed copy of u - n
    left_nodes = [u for u in range(2 * n) if (side[u] if u < n else 1 - side[u - n]) == 0]
    right_nodes = [u for u in range(2 * n) if (side[u] if u < n else 1 - side[u - n]) == 1]
    lid = {u: i for i, u in enumerate(left_nodes)}
    rid = {u: i for i, u in enumerate(right_nodes)}
    edges = []
    for x in range(n):
        for y in range(x + 1, n):
            if not index.comparable(x, y):
                w = n - (index.succ_row(x) | index.succ_row(y)).bit_count()
                a, b = (x, y) if side[x] == 0 else (y, x)
                edges.append((lid[a], rid[b], w))
    for v in range(n):
        w = n - index.succ_closed_size(v)
        if side[v] == 0:
            edges.append((lid[v], rid[v + n], w))
        else:
            edges.append((lid[v + n], rid[v], w))
    matching = min_weight_k_matching(
        BipartiteGraph.from_edges(len(left_nodes), len(right_nodes), edges), k
    )
    bundles = sorted(
        (frozenset({left_nodes[l] % n, right_nodes[r] % n}) for l, r, _ in matching.edges),
        key=min,
    )
    return Allocation(k, tuple(bundles))


# -- composition and dispatch ------------------------------------------------------


def solve_by_components(graph: PreferenceGraph, k: int, per_component_solver) -> Allocation:
    """Solve each weak component with ``per_component_solver`` and take
    per-agent unions; the total is the sum of the per-component totals."""
    comps = weak_components(graph)
    if len(comps) == 1:
        return per_component_solver(graph, k)
    merged: list[set[int]] = [set() for _ in range(k)]
    for comp in comps:
        sub, old_ids = induced_subgraph(graph, comp)
        alloc = per_component_solver(sub, k)
        if alloc.agent_count != k:
            raise InternalInconsistency("component solver changed the agent count")
        for agent, bundle in enumerate(alloc.bundles):
            merged[agent].update(old_ids[v] for v in bundle)
    return Allocation(k, tuple(frozenset(b) for b in merged))


def _solve_sp_component(g: PreferenceGraph, k: int) -> Allocation:
    if k >= g.item_count:
        return solve_canonical_many_agents(g, k)
    return solve_series_parallel(g, sp_decompose(g), k)


def _solve_cactus_component(g: PreferenceGraph, k: int) -> Allocation:
    if k >= g.item_count:
        return solve_canonical_many_agents(g, k)
    return solve_out_cactus(g, cactus_decompose(g), k)


_GOODNESS_GUARANTEED = {CANONICAL, TWO_AGENTS, POLYTREE, SERIES_PARALLEL, OUT_CACTUS}


@dataclass(frozen=True)
class SolveResult:
    """Allocation plus provenance: certificate, solver tag, class report.

    ``certificate`` is None when the graph was too large for the quadratic
    reachability index (``certificate_item_limit``).
    """

    allocation: Allocation
    certificate: Certificate | None
    solver_used: str
    report: ClassReport


def solve_auto(
    graph: PreferenceGraph,
    k: int,
    *,
    oracle_limit: int = 12,
    width_limit: int | None = 1024,
    certificate_item_limit: int = 20000,
) -> SolveResult:
    """Classify, dispatch to the matching solver per weak component,
    certify, and cross-check.

    Raises :class:`Unsupported` when no polynomial solver applies and the
    instance exceeds the exhaustive-search limit.
    """
    if k < 1:
        raise PreconditionViolated("k must be >= 1")
    report = classify(graph, k, width_limit=width_limit, oracle_limit=oracle_limit)
    chosen = report.chosen_solver
    if chosen == CANONICAL:
        alloc = solve_canonical_many_agents(graph, k)
    elif chosen == TWO_AGENTS:
        alloc = solve_two_agents(graph)
    elif chosen == POLYTREE:
        alloc = solve_by_components(graph, k, solve_polytree)
    elif chosen == SERIES_PARALLEL:
        alloc = solve_by_components(graph, k, _solve_sp_component)
    elif chosen == OUT_CACTUS:
        alloc = solve_by_components(graph, k, _solve_cactus_component)
    elif chosen == WIDTH_TWO:
        alloc = solve_width_two(graph, reachability(graph), k)
    elif chosen == ORACLE_FALLBACK:
        from .oracle import brute_force_optimum

        alloc = brute_force_optimum(
            graph, reachability(graph), k, limit=oracle_limit
        ).best_allocation
    else:
        raise Unsupported(
            f"no exact solver applies: n={graph.item_count}, k={k}, "
            f"width={report.width}, oracle limit {oracle_limit}"
        )
    certificate = None
    if graph.item_count <= certificate_item_limit:
        certificate = certify(graph, reachability(graph), alloc)
        if chosen in _GOODNESS_GUARANTEED and not certificate.matches_bound:
            raise InternalInconsistency(
                f"solver {chosen} must produce a good allocation but "
                f"total {certificate.total} != bound {certificate.lower_bound}"
            )
    return SolveResult(alloc, certificate, chosen, report)
