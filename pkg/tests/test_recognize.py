from __future__ import annotations

import pytest

import prefalloc as pa
from prefalloc.recognize import SpLeaf, SpParallel, SpSeries

from .conftest import diamond_graph, path_graph


class TestPolytree:
    def test_fig2(self, fig2):
        assert pa.is_polytree(fig2)
        assert not pa.is_out_tree(fig2)  # item "6" has three dominating arcs

    def test_diamond_is_not(self):
        assert not pa.is_polytree(diamond_graph())

    def test_single_vertex(self):
        assert pa.is_polytree(pa.build_graph(1, []))

    def test_polyforest_accepted(self):
        g = pa.build_graph(6, [(0, 1), (2, 3), (4, 5)])
        assert pa.is_polytree(g)

    def test_arc_count_characterization(self):
        for seed in range(30):
            g = pa.random_polytree(2 + seed % 12, seed)
            assert g.arc_count == g.item_count - len(pa.weak_components(g))

    def test_fig1_out_tree(self, figs):
        assert pa.is_out_tree(figs["fig1"])


class TestSpDecompose:
    def test_single_arc_is_leaf(self):
        d = pa.sp_decompose(pa.build_graph(2, [(0, 1)]))
        assert isinstance(d, SpLeaf) and (d.source, d.sink) == (0, 1)

    def test_path_is_series_of_leaves(self):
        d = pa.sp_decompose(path_graph(3))
        assert isinstance(d, SpSeries)
        assert isinstance(d.left, SpLeaf) and isinstance(d.right, SpLeaf)
        assert d.left.sink == d.right.source == 1

    def test_diamond_is_parallel_of_series(self):
        g = diamond_graph()
        d = pa.sp_decompose(g)
        assert isinstance(d, SpParallel)
        assert isinstance(d.left, SpSeries) and isinstance(d.right, SpSeries)
        assert sorted(d.arc_list()) == g.arcs

    def test_multi_source_refused(self, fig3):
        with pytest.raises(pa.NotSeriesParallel):
            pa.sp_decompose(fig3)

    def test_stuck_reduction_refused(self):
        # single source/sink but a complete bipartite core in the middle
        g = pa.build_graph(
            8,
            [(0, 1), (0, 2), (0, 3)]
            + [(t, h) for t in (1, 2, 3) for h in (4, 5, 6)]
            + [(4, 7), (5, 7), (6, 7)],
        )
        with pytest.raises(pa.NotSeriesParallel):
            pa.sp_decompose(g)

    def test_replay_reproduces_arcs(self):
        for seed in range(60):
            g = pa.random_sp(3, seed)
            d = pa.sp_decompose(g)
            assert sorted(d.arc_list()) == g.arcs
            assert d.size == g.item_count

    def test_terminal_validation(self):
        with pytest.raises(ValueError):
            SpSeries(SpLeaf(0, 1), SpLeaf(2, 3))
        with pytest.raises(ValueError):
            SpParallel(SpLeaf(0, 1), SpLeaf(0, 2))


class TestCactusDecompose:
    def test_out_tree_becomes_bridges(self):
        g = pa.random_out_tree(7, 5)
        dec = pa.cactus_decompose(g)
        assert all(len(c.arcs) == 1 for c in dec.cycles)
        assert sorted(arc for c in dec.cycles for arc in c.arcs) == g.arcs

    def test_diamond_single_cycle(self):
        dec = pa.cactus_decompose(diamond_graph())
        assert len(dec.cycles) == 1
        cyc = dec.cycles[0]
        assert cyc.source == 0 and cyc.sink == 3
        assert set(cyc.vertices) == {0, 1, 2, 3}

    def test_chained_diamonds_ordered(self):
        g = pa.build_graph(
            7, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6)]
        )
        dec = pa.cactus_decompose(g)
        assert [(c.source, c.sink) for c in dec.cycles] == [(0, 3), (3, 6)]

    def test_arc_partition(self):
        for seed in range(40):
            g = pa.random_out_cactus(2 + seed % 14, seed)
            dec = pa.cactus_decompose(g)
            assert sorted(arc for c in dec.cycles for arc in c.arcs) == g.arcs

    def test_two_sources_refused(self):
        with pytest.raises(pa.NotOutCactus):
            pa.cactus_decompose(pa.build_graph(4, [(0, 1), (2, 3)]))

    def test_theta_refused(self):
        g = pa.build_graph(4, [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)])
        with pytest.raises(pa.NotOutCactus):
            pa.cactus_decompose(g)

    def test_cycle_with_two_sources_refused(self):
        g = pa.build_graph(6, [(5, 0), (5, 2), (0, 1), (2, 1), (2, 3), (0, 3)])
        with pytest.raises(pa.NotOutCactus):
            pa.cactus_decompose(g)


class TestWidth:
    def test_path(self):
        g = path_graph(5)
        assert pa.width(g, pa.reachability(g)) == 1

    def test_edgeless(self):
        g = pa.build_graph(6, [])
        assert pa.width(g, pa.reachability(g)) == 6

    def test_fig2(self, fig2, fig2_index):
        assert pa.width(fig2, fig2_index) == 4

    def test_matches_brute_antichain(self):
        for seed in range(60):
            g = pa.random_dag(1 + seed % 10, 0.3, seed + 777)
            idx = pa.reachability(g)
            assert pa.width(g, idx) == len(pa.max_antichain_brute(g, idx))


class TestClassify:
    def test_fig2_routes_to_polytree(self, fig2):
        report = pa.classify(fig2, 3)
        assert report.is_polytree and not report.is_out_tree
        assert report.chosen_solver == "polytree"
        assert report.width == 4

    def test_many_agents_routes_to_canonical(self):
        g = pa.build_graph(2, [(0, 1)])
        assert pa.classify(g, 5).chosen_solver == "canonical"

    def test_two_agents_shortcut(self, fig3):
        report = pa.classify(fig3, 2)
        assert report.has_two_agents_shortcut
        assert report.chosen_solver == "two_agents"

    def test_fig3_routes_to_oracle(self, fig3):
        report = pa.classify(fig3, 3)
        assert not (report.is_polytree or report.is_sp or report.is_out_cactus)
        assert report.width == 6
        assert report.chosen_solver == "oracle_fallback"

    def test_hard_instance_unsupported(self):
        # width 3, connected, not a polytree / sp / out-cactus, too big to enumerate
        arcs = [(0, 1), (0, 11), (0, 21)]
        arcs += [(i, i + 1) for i in range(1, 10)]
        arcs += [(i, i + 1) for i in range(11, 20)]
        arcs += [(i, i + 1) for i in range(21, 29)]
        arcs += [(1, 12), (11, 22), (21, 2)]
        g = pa.build_graph(30, arcs)
        report = pa.classify(g, 3)
        assert report.width == 3
        assert report.chosen_solver == "unsupported"

    def test_width_skipped_above_limit(self):
        g = pa.random_polytree(40, 1)
        report = pa.classify(g, 3, width_limit=10)
        assert report.width is None and report.chosen_solver == "polytree"

    def test_sp_flag_per_component(self):
        one = diamond_graph()
        two = pa.build_graph(
            8, one.arcs + [(t + 4, h + 4) for t, h in one.arcs]
        )
        report = pa.classify(two, 3)
        assert report.is_sp and not report.is_polytree
        assert report.chosen_solver == "series_parallel"
