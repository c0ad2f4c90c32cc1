import json
import math

import pytest

from congest_mincut.fragments import (
    contract,
    decompose,
    forest_from_labels,
    partition_reference,
    size_parameter,
)
from congest_mincut.generators import random_tree, tree_graph
from congest_mincut.graph import Graph, RootedTree, graph_to_dot

from conftest import binary_tree, path_graph, path_tree


def groups(forest):
    return sorted(sorted(forest.members(f)) for f in forest.ids)


def test_size_parameter():
    assert [size_parameter(n) for n in (1, 4, 5, 9, 10)] == [1, 2, 3, 3, 4]


def test_path_of_nine():
    d = decompose(path_graph(9), path_tree(9), k=3)
    assert groups(d.forest) == [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    assert d.views[0].parent == {0: None, 3: 0, 6: 3}
    loc = d.locals[4]
    assert (loc.fid, loc.fragment_root) == (3, 3)


def test_binary_tree():
    T = binary_tree()
    d = decompose(tree_graph(T), T, k=3)
    assert groups(d.forest) == [[0], [1, 3, 4], [2, 5, 6]]
    assert d.views[6].parent == {0: None, 1: 0, 2: 0}
    assert (d.locals[5].fid, d.locals[5].fragment_root) == (2, 2)
    assert (d.locals[0].fid, d.locals[0].fragment_root) == (0, 0)


def test_k_equal_n_gives_one_fragment():
    T = binary_tree()
    d = decompose(tree_graph(T), T, k=7)
    assert d.forest.count == 1
    assert d.views[0].inter_edges == ()


def test_k_above_n_is_allowed():
    T = path_tree(5)
    assert partition_reference(T, 50).count == 1


def test_k_must_be_positive():
    with pytest.raises(ValueError):
        partition_reference(path_tree(3), 0)


def test_default_k_from_census():
    T = random_tree(50, seed=1)
    d = decompose(tree_graph(T), T)
    assert d.forest.k == 8 and set(d.n_known) == {50}


def test_fid_is_min_member_and_root_is_topmost():
    T = random_tree(120, seed=4, shape="uniform")
    d = decompose(tree_graph(T), T)
    for fid in d.forest.ids:
        members = d.forest.members(fid)
        assert fid == min(members)
        root = d.forest.root[fid]
        assert T.parent[root] is None or d.forest.label[T.parent[root]] != fid
        assert all(d.locals[v].fragment_root == root for v in members)


def test_contract_matches_broadcast():
    T = random_tree(200, seed=9, shape="caterpillar")
    d = decompose(tree_graph(T), T)
    assert contract(T, d.forest.label).parent == d.views[0].parent
    assert len({id(v) for v in d.views}) == T.n
    assert all(v == d.views[0] for v in d.views)


def test_partition_on_non_tree_graph_uses_only_tree_edges():
    G = Graph(6, [(i, i + 1, 1) for i in range(5)] + [(0, 5, 1), (1, 4, 2)])
    d = decompose(G, path_tree(6), k=2)
    assert d.forest.label == partition_reference(path_tree(6), 2).label


def test_forest_json_and_dot():
    T = binary_tree()
    forest = partition_reference(T, 3)
    assert json.loads(forest.to_json()) == {"0": 0, "1": 1, "2": 2, "3": 1, "4": 1, "5": 2, "6": 2}
    dot = graph_to_dot(tree_graph(T), T, forest.label)
    assert dot.count("fillcolor") == 7


def test_forest_from_labels_measures_diameter():
    forest = forest_from_labels(path_tree(6), 3, [0, 0, 0, 3, 3, 3])
    assert forest.diameter == {0: 2, 3: 2}
    assert forest.size == {0: 3, 3: 3}


@pytest.mark.parametrize("shape", ["recursive", "uniform", "caterpillar"])
def test_bounds_on_random_trees(shape):
    for seed in range(5):
        n = 300 + 97 * seed
        T = random_tree(n, seed=seed, shape=shape)
        k = size_parameter(n)
        forest = partition_reference(T, k)
        root_fid = forest.label[T.root]
        assert forest.count <= math.ceil(math.sqrt(n)) + 2
        assert all(forest.size[f] >= k for f in forest.ids if f != root_fid)
        assert all(forest.diameter[f] <= 4 * k for f in forest.ids)
