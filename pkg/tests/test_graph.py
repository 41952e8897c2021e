from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import prefalloc as pa
from prefalloc.graph import iter_bits

from .conftest import path_graph


def brute_successors(graph: pa.PreferenceGraph, v: int) -> set[int]:
    """Plain DFS; the independent check for the bit-parallel index."""
    seen = {v}
    stack = [v]
    while stack:
        x = stack.pop()
        for u in graph.out_neighbors(x):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


class TestBuildGraph:
    def test_single_arc(self):
        g = pa.build_graph(2, [(0, 1)])
        assert g.sources() == [0] and g.sinks() == [1]

    def test_fig2_is_valid_polytree(self, fig2):
        assert fig2.item_count == 8
        assert fig2.arcs == [(0, 2), (1, 5), (2, 5), (3, 5), (3, 6), (4, 6), (5, 7)]
        assert pa.is_polytree(fig2)

    def test_two_cycle_rejected(self):
        with pytest.raises(pa.CycleDetected) as exc:
            pa.build_graph(2, [(0, 1), (1, 0)])
        cycle = exc.value.cycle
        assert cycle[0] == cycle[-1] and len(cycle) >= 3

    def test_longer_cycle_reported(self):
        with pytest.raises(pa.CycleDetected) as exc:
            pa.build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 1)])
        assert set(exc.value.cycle) == {1, 2, 3}

    def test_cycle_found_despite_dead_end_tail(self):
        # the unprocessed region contains a sink-bound tail; the reported
        # cycle must still be a real one
        with pytest.raises(pa.CycleDetected) as exc:
            pa.build_graph(4, [(2, 3), (3, 2), (3, 0), (0, 1)])
        cycle = exc.value.cycle
        assert cycle[0] == cycle[-1] and set(cycle) == {2, 3}
        arc_set = {(2, 3), (3, 2), (3, 0), (0, 1)}
        assert all((a, b) in arc_set for a, b in zip(cycle, cycle[1:]))

    def test_duplicate_arc_rejected(self):
        with pytest.raises(pa.DuplicateArc):
            pa.build_graph(3, [(0, 1), (0, 1)])

    def test_self_loop_rejected(self):
        with pytest.raises(pa.SelfLoop):
            pa.build_graph(2, [(1, 1)])

    def test_out_of_range_rejected(self):
        with pytest.raises(pa.OutOfRangeItem):
            pa.build_graph(2, [(0, 2)])

    def test_adjacency_mirrors_arcs(self, fig2):
        for t, h in fig2.arcs:
            assert h in fig2.out_neighbors(t)
            assert t in fig2.in_neighbors(h)
        assert sum(fig2.out_degree(v) for v in range(8)) == fig2.arc_count
        assert sum(fig2.in_degree(v) for v in range(8)) == fig2.arc_count

    def test_topological_order_respects_arcs(self, fig2):
        pos = {v: i for i, v in enumerate(fig2.topological_order())}
        assert all(pos[t] < pos[h] for t, h in fig2.arcs)


class TestReachability:
    def test_path_transitivity(self):
        g = path_graph(3)
        idx = pa.reachability(g)
        assert set(iter_bits(idx.succ_row(0))) == {0, 1, 2}

    def test_fig2_pred_size(self, fig2_index):
        # item "6" (id 5) is dominated by items 1, 2, 3, 4, 6 (ids 0..3, 5)
        assert fig2_index.pred_closed_size(5) == 5
        assert set(iter_bits(fig2_index.pred_row(5))) == {0, 1, 2, 3, 5}

    def test_edgeless_rows_are_reflexive(self):
        g = pa.build_graph(3, [])
        idx = pa.reachability(g)
        for v in range(3):
            assert set(iter_bits(idx.succ_row(v))) == {v}

    @given(st.integers(0, 2**32))
    @settings(max_examples=60, deadline=None)
    def test_index_agrees_with_dfs(self, seed):
        g = pa.random_dag(3 + seed % 48, 0.15, seed)
        idx = pa.reachability(g)
        for v in range(g.item_count):
            assert set(iter_bits(idx.succ_row(v))) == brute_successors(g, v)

    def test_pred_is_transpose_of_succ(self):
        g = pa.random_dag(20, 0.2, 99)
        idx = pa.reachability(g)
        for u in range(20):
            for v in range(20):
                assert idx.dominates(u, v) == ((idx.pred_row(v) >> u) & 1 == 1)

    def test_row_is_union_of_out_neighbor_rows(self):
        g = pa.random_dag(15, 0.25, 12)
        idx = pa.reachability(g)
        for v in range(15):
            row = 1 << v
            for w in g.out_neighbors(v):
                row |= idx.succ_row(w)
            assert idx.succ_row(v) == row

    def test_closed_sizes_are_popcounts(self, fig2_index):
        for v in range(8):
            assert fig2_index.succ_closed_size(v) == fig2_index.succ_row(v).bit_count()
            assert fig2_index.pred_closed_size(v) == fig2_index.pred_row(v).bit_count()


class TestDissatisfaction:
    def test_fig2_bundle_values(self, fig2, fig2_index):
        # fixture item names are 1-based, ids 0-based: name "2" is id 1, etc.
        assert pa.dissatisfaction(fig2, fig2_index, {1, 3, 4}) == 2
        assert pa.dissatisfaction(fig2, fig2_index, {5, 6}) == 5

    def test_empty_bundle_misses_everything(self, fig2, fig2_index):
        assert pa.dissatisfaction(fig2, fig2_index, set()) == 8

    def test_bfs_fallback_matches_index(self):
        g = pa.random_dag(25, 0.2, 5)
        idx = pa.reachability(g)
        bundle = {0, 3, 7}
        assert pa.dissatisfaction(g, None, bundle) == pa.dissatisfaction(g, idx, bundle)

    @given(st.integers(0, 2**32))
    @settings(max_examples=60, deadline=None)
    def test_complement_identity_and_monotonicity(self, seed):
        g = pa.random_dag(2 + seed % 10, 0.3, seed)
        idx = pa.reachability(g)
        n = g.item_count
        rng = pa.instances.SplitMix64(seed ^ 0xABCDE)
        bundle = {v for v in range(n) if rng.chance(1, 3)}
        union = 0
        for v in bundle:
            union |= idx.succ_row(v)
        d = pa.dissatisfaction(g, idx, bundle)
        assert d + union.bit_count() == n
        extra = rng.randrange(n)
        assert pa.dissatisfaction(g, idx, bundle | {extra}) <= d
        # adding an item the bundle already dominates changes nothing
        if bundle:
            dominated = next(iter_bits(union))
            assert pa.dissatisfaction(g, idx, bundle | {dominated}) == d


class TestProfile:
    def test_reference_split(self, fig2, fig2_index):
        prof = pa.profile(fig2, fig2_index, pa.fig2_reference_allocation())
        assert prof.per_agent == (2, 5, 4)
        assert prof.total == 11
        assert prof.satisfactions(8) == (6, 3, 4)

    def test_single_agent_root_bundle(self):
        g = pa.random_out_tree(9, 4)
        idx = pa.reachability(g)
        alloc = pa.Allocation.from_bundles(1, [set(g.sources())])
        assert pa.profile(g, idx, alloc).per_agent == (0,)

    def test_all_empty(self, fig2, fig2_index):
        alloc = pa.Allocation.from_bundles(3, [set(), set(), set()])
        prof = pa.profile(fig2, fig2_index, alloc)
        assert prof.per_agent == (8, 8, 8) and prof.total == 24


class TestAllocation:
    def test_overlapping_bundles_rejected(self):
        with pytest.raises(pa.InvalidAllocation):
            pa.Allocation.from_bundles(2, [{0, 1}, {1}])

    def test_labeling_round_trip(self):
        alloc = pa.Allocation.from_bundles(3, [{0, 2}, set(), {1}])
        labels = alloc.to_labeling(4)
        assert labels == [0, 2, 0, None]
        assert pa.Allocation.from_labeling(3, labels) == alloc


class TestComponents:
    def test_fig2_connected(self, fig2):
        assert pa.weak_components(fig2) == [list(range(8))]

    def test_two_disjoint_arcs(self):
        g = pa.build_graph(4, [(0, 1), (2, 3)])
        assert pa.weak_components(g) == [[0, 1], [2, 3]]

    def test_edgeless_singletons(self):
        g = pa.build_graph(3, [])
        assert pa.weak_components(g) == [[0], [1], [2]]

    def test_induced_subgraph_round_trip(self):
        g = pa.build_graph(5, [(0, 2), (2, 4), (1, 3)])
        sub, old_ids = pa.induced_subgraph(g, [0, 2, 4])
        assert old_ids == [0, 2, 4]
        assert sub.arcs == [(0, 1), (1, 2)]
