"""Shared fixtures: bundled instances and small helper builders."""

from __future__ import annotations

import pytest

import prefalloc as pa


@pytest.fixture(scope="session")
def figs() -> dict[str, pa.PreferenceGraph]:
    return pa.fixtures()


@pytest.fixture(scope="session")
def fig2(figs):
    return figs["fig2"]


@pytest.fixture(scope="session")
def fig2_index(fig2):
    return pa.reachability(fig2)


@pytest.fixture(scope="session")
def fig3(figs):
    return figs["fig3"]


@pytest.fixture(scope="session")
def fig3_index(fig3):
    return pa.reachability(fig3)


def path_graph(n: int) -> pa.PreferenceGraph:
    return pa.build_graph(n, [(i, i + 1) for i in range(n - 1)])


def diamond_graph() -> pa.PreferenceGraph:
    return pa.build_graph(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
