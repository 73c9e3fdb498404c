import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from walkloss import Graph, load_edge_list

TOY = "1 2\n2 3\n3 4\n4 1\n1 5\n2 5\n3 5\n4 5"


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def random_graph(rng, n, p):
    iu = np.triu_indices(n, 1)
    keep = rng.random(len(iu[0])) < p
    return Graph.from_edges(n, np.column_stack([iu[0][keep], iu[1][keep]]))


def random_tree(rng, n):
    return Graph.from_edges(n, [(int(rng.integers(i)), i) for i in range(1, n)])


def dense_katz(g, alpha, seed=None):
    seed = np.ones(g.n) if seed is None else seed
    return np.linalg.solve(np.eye(g.n) - alpha * g.to_dense(), seed)


def dense_rho(g):
    return float(np.max(np.abs(np.linalg.eigvalsh(g.to_dense()))))


@st.composite
def small_graphs(draw, min_n=2, max_n=12):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=len(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


@pytest.fixture
def toy():
    return load_edge_list(TOY)


@pytest.fixture
def p2():
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def c4():
    return cycle_graph(4)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
