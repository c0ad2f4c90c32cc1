from fractions import Fraction

import pytest

from congest_mincut.graph import Graph, cut_value
from congest_mincut.oracle import global_min_cut_oracle
from congest_mincut.packing import (
    PackingConfig,
    SamplingError,
    default_tree_count,
    greedy_tree_packing,
    min_cut_pipeline,
    pack_trees,
    sample_graph,
    sample_graph_detailed,
    sampling_probability,
)

from conftest import cycle_graph


def undirected(T):
    return frozenset((min(p, v), max(p, v)) for p, v in T.edges())


def complete(n, w=1):
    return Graph(n, [(u, v, w) for u in range(n) for v in range(u + 1, n)])


def test_triangle_rotates():
    G = complete(3)
    trees = greedy_tree_packing(G, 3)
    sets = [undirected(T) for T in trees]
    assert len(set(sets)) == 3
    for e in [(0, 1), (0, 2), (1, 2)]:
        assert sum(e in s for s in sets) == 2
    assert all(T.root == 0 for T in trees)


def test_two_nodes_repeat(two_node):
    trees = greedy_tree_packing(two_node, 5)
    assert len(trees) == 5 and all(undirected(T) == {(0, 1)} for T in trees)


def test_g1_first_tree_is_mst(g1):
    assert undirected(greedy_tree_packing(g1, 1)[0]) == {(0, 1), (1, 3), (2, 3)}


def test_load_accounting(g1):
    for t in (1, 4, 9):
        packing = pack_trees(g1, t)
        total = sum(load * w for load, (_, _, w) in zip(packing.loads, g1.edges))
        assert total == t * (g1.n - 1)
        assert max(packing.loads) <= t


def test_unit_load_rule(g1):
    packing = pack_trees(g1, 4, load_rule="unit")
    assert sum(packing.loads) == 4 * (g1.n - 1)
    assert all(isinstance(x, (int, Fraction)) for x in packing.loads)


def test_heavy_edges_absorb_more_trees():
    G = Graph(3, [(0, 1, 10), (1, 2, 1), (0, 2, 1)])
    counts = {e: 0 for e in [(0, 1), (1, 2), (0, 2)]}
    for T in greedy_tree_packing(G, 20):
        for e in undirected(T):
            counts[e] += 1
    assert counts[(0, 1)] > counts[(1, 2)]


def test_count_must_be_positive(g1):
    with pytest.raises(ValueError):
        greedy_tree_packing(g1, 0)


def test_default_tree_count(g1, two_node):
    assert default_tree_count(Graph(2, [(0, 1, 1)])) == 1
    assert default_tree_count(g1) == 64
    assert default_tree_count(g1, cap=5) == 5


def test_config_validation():
    with pytest.raises(ValueError):
        PackingConfig(tree_count=0)
    with pytest.raises(ValueError):
        PackingConfig(epsilon=1.5)
    with pytest.raises(ValueError):
        PackingConfig(load_rule="other")


def test_probability_one_returns_input(g1):
    assert sampling_probability(g1, 0.5) == 1.0
    assert sample_graph(g1, 0.5, seed=3) is g1


def test_two_node_sample_kept_or_exhausted():
    G = Graph(2, [(0, 1, 1)])
    for seed in range(20):
        try:
            H = sample_graph(G, 1.0, seed, lambda_hat=50)
        except SamplingError:
            continue
        assert H == G


def test_sampling_is_seeded():
    G = complete(6, w=30)
    a = sample_graph_detailed(G, 0.5, seed=4)
    b = sample_graph_detailed(G, 0.5, seed=4)
    assert a.p < 1 and a.graph == b.graph
    assert all(H_w <= G.weight(u, v) for u, v, H_w in a.graph.edges)


def test_sampled_min_cut_concentrates():
    G = complete(5, w=20)
    lam = global_min_cut_oracle(G)[0]
    hits = 0
    for seed in range(200):
        s = sample_graph_detailed(G, 0.5, seed)
        scaled = global_min_cut_oracle(s.graph)[0] / s.p
        hits += (1 - 0.5) * lam <= scaled <= (1 + 0.5) * lam
    assert hits >= 180


def test_pipeline_examples(g1, two_node):
    res = min_cut_pipeline(g1, PackingConfig(tree_count=8, exact_mode=True))
    assert res.value >= 3 and cut_value(g1, res.witness) == res.value
    assert res.certified and res.value == 3 == res.oracle_lambda
    assert min_cut_pipeline(two_node, PackingConfig(tree_count=1)).value == 5
    assert min_cut_pipeline(cycle_graph(5), PackingConfig(tree_count=1)).value == 2


def test_pipeline_dedupes_trees(two_node):
    res = min_cut_pipeline(two_node, PackingConfig(tree_count=6))
    assert len(res.reports) == 1


def test_pipeline_deterministic(g1):
    cfg = PackingConfig(tree_count=5, epsilon=0.9, seed=2)
    a, b = min_cut_pipeline(g1, cfg), min_cut_pipeline(g1, cfg)
    assert a.to_json() == b.to_json()
    assert [undirected(T) for T in a.trees] == [undirected(T) for T in b.trees]


def test_pipeline_with_sampling_is_sound():
    G = complete(7, w=25)
    res = min_cut_pipeline(G, PackingConfig(tree_count=4, epsilon=0.5, seed=1))
    assert res.sampled and res.p < 1
    assert cut_value(G, res.witness) == res.value >= global_min_cut_oracle(G)[0]


def test_pipeline_json_schema(g1):
    doc = min_cut_pipeline(g1, PackingConfig(tree_count=2, exact_mode=True)).to_dict()
    assert {"value", "witness_nodes", "trees_run", "per_tree", "sampled"} <= set(doc)
    assert set(doc["per_tree"][0]) == {"c_star", "v_star", "rounds"}
