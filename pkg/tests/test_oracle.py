import pytest

from congest_mincut.graph import Graph, RootedTree
from congest_mincut.oracle import (
    OracleMismatch,
    all_min_cuts_brute_force,
    brute_force_min_cut,
    global_min_cut_oracle,
    lca_naive,
    min_one_respecting_cut_oracle,
    one_respect_table,
    tree_crossings,
)

from conftest import binary_tree, cycle_graph, path_tree


def test_lca_naive():
    assert lca_naive(path_tree(4), 2, 3) == 2
    assert lca_naive(binary_tree(), 3, 5) == 0
    assert lca_naive(binary_tree(), 3, 4) == 1
    assert lca_naive(binary_tree(), 4, 4) == 4


def test_one_respect_table_g1(g1):
    rows = one_respect_table(g1, path_tree(4))
    assert (rows[1].delta_down, rows[1].rho_down, rows[1].cut_down) == (12, 4, 4)
    assert (rows[3].delta_down, rows[3].rho_down, rows[3].cut_down) == (5, 0, 5)
    assert (rows[0].delta_down, rows[0].rho_down, rows[0].cut_down) == (16, 8, 0)
    assert [r.cut_down for r in rows] == [0, 4, 6, 5]


def test_min_one_respecting_examples(g1, two_node):
    assert min_one_respecting_cut_oracle(g1, path_tree(4)) == (4, 1)
    assert min_one_respecting_cut_oracle(two_node, RootedTree([None, 0])) == (5, 1)
    star = Graph(5, [(0, i, 1) for i in range(1, 5)])
    assert min_one_respecting_cut_oracle(star, RootedTree([None, 0, 0, 0, 0])) == (1, 1)


def test_global_min_cut_examples(g1, two_node):
    lam, side = global_min_cut_oracle(g1)
    assert lam == 3
    assert 0 in side
    from congest_mincut.graph import cut_value
    assert cut_value(g1, side) == 3
    assert global_min_cut_oracle(cycle_graph(5))[0] == 2
    assert global_min_cut_oracle(two_node)[0] == 5


def test_g1_min_cuts_enumerated(g1):
    value, sides = all_min_cuts_brute_force(g1)
    assert value == 3
    # complements of {2}, {1,2} and {0,3} as seen from node 0
    assert set(sides) == {frozenset({0, 1, 3}), frozenset({0, 3})}


def test_brute_force_limits():
    with pytest.raises(ValueError):
        brute_force_min_cut(Graph(1, []))


def test_tree_crossings():
    T = path_tree(4)
    assert tree_crossings(T, frozenset({0, 1})) == 1
    assert tree_crossings(T, frozenset({0, 2})) == 3


def test_mismatch_type_is_assertion():
    assert issubclass(OracleMismatch, AssertionError)
