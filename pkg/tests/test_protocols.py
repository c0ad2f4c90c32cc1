import math
import random

import pytest

from congest_mincut.congest import Network
from congest_mincut.generators import generate
from congest_mincut.graph import Graph, bfs_levels, bfs_tree
from congest_mincut.protocols import (
    broadcast_all,
    build_bfs,
    census,
    convergecast_min,
    convergecast_sum,
    subtree_sum,
)

from conftest import path_graph


def star(leaves):
    return Graph(leaves + 1, [(0, i, 1) for i in range(1, leaves + 1)])


def test_bfs_path():
    bfs = build_bfs(Network(path_graph(5)), 0)
    assert bfs.depth == (0, 1, 2, 3, 4)
    assert bfs.parent == (None, 0, 1, 2, 3)


def test_bfs_complete():
    K4 = Graph(4, [(u, v, 1) for u in range(4) for v in range(u + 1, 4)])
    bfs = build_bfs(Network(K4), 2)
    assert bfs.depth[2] == 0 and max(bfs.depth) == 1


def test_bfs_g1_matches_central(g1):
    net = Network(g1)
    bfs = build_bfs(net, 0)
    assert bfs.depth == (0, 1, 2, 1)
    assert bfs.parent == bfs_tree(g1, 0).parent
    assert net.metrics.rounds <= 2 * max(bfs.depth) + 2


def test_bfs_children_consistent():
    G = generate("random-gnp", 60, seed=3)
    bfs = build_bfs(Network(G), 5)
    for v in range(G.n):
        for c in bfs.children[v]:
            assert bfs.parent[c] == v
    assert list(bfs.depth) == bfs_levels(G, 5)


def test_broadcast_single_token_from_root():
    G = path_graph(5)
    net = Network(G)
    bfs = build_bfs(net, 0)
    before = net.metrics.rounds
    out = broadcast_all(net, bfs, [[(9,)], [], [], [], []], known_count=1)
    assert all(toks == [(9,)] for toks in out)
    # four hops, plus the round in which the last node reads its inbox
    assert net.metrics.rounds - before == 5


def test_broadcast_three_leaves_of_star():
    G = star(5)
    net = Network(G)
    bfs = build_bfs(net, 0)
    before = net.metrics.rounds
    tokens = [[], [(3, 1)], [], [(1, 2)], [], [(2, 3)]]
    out = broadcast_all(net, bfs, tokens)
    assert all(toks == [(1, 2), (2, 3), (3, 1)] for toks in out)
    assert net.metrics.rounds - before <= 4 * (1 + 3)


def test_broadcast_nothing_costs_nothing():
    net = Network(path_graph(5))
    bfs = build_bfs(net, 0)
    before = net.metrics.rounds
    assert broadcast_all(net, bfs, [[]] * 5, known_count=0) == [[]] * 5
    assert net.metrics.rounds == before


def test_broadcast_rejects_oversized_token():
    net = Network(path_graph(3))
    bfs = build_bfs(net, 0)
    with pytest.raises(ValueError):
        broadcast_all(net, bfs, [[(1, 2, 3, 4, 5)], [], []])


def test_keyed_sum_examples():
    net = Network(path_graph(5))
    bfs = build_bfs(net, 0)
    out = convergecast_sum(net, bfs.parent, bfs.children, [7], [{7: 1}] * 5)
    assert out[0] == {7: 5} and out[1] is None

    net = Network(star(3))
    bfs = build_bfs(net, 0)
    contrib = [{}] + [{1: 1, 2: 2}] * 3
    assert convergecast_sum(net, bfs.parent, bfs.children, [1, 2], contrib)[0] == {1: 3, 2: 6}
    assert convergecast_sum(net, bfs.parent, bfs.children, [1, 2], [{}] * 4)[0] == {1: 0, 2: 0}


def test_keyed_sum_unknown_key():
    net = Network(path_graph(3))
    bfs = build_bfs(net, 0)
    with pytest.raises(ValueError):
        convergecast_sum(net, bfs.parent, bfs.children, [1], [{2: 1}, {}, {}])


def test_convergecast_min_examples(g1):
    net = Network(g1)
    bfs = build_bfs(net, 0)
    vals = [None, (4, 1, 0), (6, 2, 1), (5, 3, 2)]
    out = convergecast_min(net, bfs.parent, bfs.children, vals)
    assert all(x == (4, 1, 0) for x in out)
    out = convergecast_min(net, bfs.parent, bfs.children, [(7, v, 0) for v in range(4)])
    assert out[2] == (7, 0, 0)


def test_convergecast_min_single_node():
    net = Network(Graph(1, []))
    bfs = build_bfs(net, 0)
    assert convergecast_min(net, bfs.parent, bfs.children, [(3, 0, 0)]) == [(3, 0, 0)]


def test_census_and_subtree_sum():
    G = generate("random-regular", 40, seed=2)
    net = Network(G)
    bfs = build_bfs(net, 0)
    ecc = max(bfs_levels(G, 0))
    assert set(census(net, bfs)) == {(40, ecc)}
    sums = subtree_sum(net, bfs.parent, bfs.children, [1] * 40)
    assert sums[0] == 40


@pytest.mark.parametrize("n", [16, 64, 256])
def test_primitive_round_bounds(n):
    G = generate("random-gnp", n, seed=n)
    net = Network(G)
    bfs = build_bfs(net, 0)
    ecc = bfs.height
    assert net.metrics.rounds <= 4 * (2 * ecc + 2)

    rng = random.Random(n)
    k = int(math.isqrt(n))
    tokens = [[] for _ in range(n)]
    for i in range(k):
        tokens[rng.randrange(n)].append((i, rng.randrange(100)))
    before = net.metrics.rounds
    out = broadcast_all(net, bfs, tokens)
    assert net.metrics.rounds - before <= 4 * (ecc + k)
    assert all(o == out[0] for o in out) and len(out[0]) == k

    keys = list(range(k))
    contrib = [{rng.randrange(k): rng.randrange(5)} for _ in range(n)]
    before = net.metrics.rounds
    totals = convergecast_sum(net, bfs.parent, bfs.children, keys, contrib)[0]
    assert net.metrics.rounds - before <= 4 * (ecc + k)
    expect = {key: sum(c.get(key, 0) for c in contrib) for key in keys}
    assert totals == expect
