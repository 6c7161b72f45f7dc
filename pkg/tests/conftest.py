"""Shared fixtures: small named graphs and seeded family instances."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from graph_model import Graph, GraphFamilySpec, generate  # noqa: E402


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def forest_union(n: int, k: int, seed: int = 0) -> Graph:
    return generate(GraphFamilySpec("forest_union", n=n, k=k, seed=seed))


def grid(rows: int, cols: int) -> Graph:
    return generate(GraphFamilySpec("grid", rows=rows, cols=cols))


@pytest.fixture
def p5() -> Graph:
    return path_graph(5)


@pytest.fixture
def c4() -> Graph:
    return cycle_graph(4)


@pytest.fixture
def triangle() -> Graph:
    return complete_graph(3)


@pytest.fixture
def empty4() -> Graph:
    return Graph(4, frozenset())


@pytest.fixture(autouse=True)
def _isolated_data_dirs(tmp_path, monkeypatch):
    """Keep default database / log paths inside the test's temp dir."""

    import config

    monkeypatch.setattr(config, "DATA_DIR", tmp_path / "data")
    monkeypatch.setattr(config, "RESULTS_DIR", tmp_path / "data" / "results")
    monkeypatch.setattr(config, "LOGS_DIR", tmp_path / "logs")
