import pytest

from congest_mincut.graph import Graph, RootedTree, load_graph

G1_TEXT = "0 1 1\n1 2 2\n2 3 1\n0 3 3\n1 3 1"


def path_tree(n: int) -> RootedTree:
    return RootedTree([None] + list(range(n - 1)))


def binary_tree() -> RootedTree:
    return RootedTree([None, 0, 0, 1, 1, 2, 2])


def path_graph(n: int, extra=()) -> Graph:
    return Graph(n, [(i, i + 1, 1) for i in range(n - 1)] + list(extra))


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n, 1) for i in range(n)])


@pytest.fixture
def g1() -> Graph:
    return load_graph(G1_TEXT)


@pytest.fixture
def two_node() -> Graph:
    return Graph(2, [(0, 1, 5)])


@pytest.fixture
def binary_graph() -> Graph:
    tree = [(p, v, 1) for p, v in binary_tree().edges()]
    return Graph(7, tree + [(3, 5, 1)])
