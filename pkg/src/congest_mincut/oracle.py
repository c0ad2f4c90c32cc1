"""Centralized reference computations used as ground truth for the distributed code."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from .graph import Graph, RootedTree, cut_value, descendants, subtree_sums, weighted_degree


@dataclass(frozen=True)
class OneRespectRow:
    v: int
    delta_down: int
    rho_down: int
    cut_down: int


class OracleMismatch(AssertionError):
    pass


def lca_naive(T: RootedTree, x: int, y: int) -> int:
    """Lowest common ancestor by walking parent pointers."""
    while T.depth[x] > T.depth[y]:
        x = T.parent[x]
    while T.depth[y] > T.depth[x]:
        y = T.parent[y]
    while x != y:
        x, y = T.parent[x], T.parent[y]
    return x


def one_respect_table(G: Graph, T: RootedTree) -> list[OneRespectRow]:
    """Per-node delta-down, rho-down and the cut of each subtree.

    The cut is computed twice, from ``delta_down - 2 * rho_down`` and directly
    as ``cut_value(G, descendants(T, v))``; a disagreement raises OracleMismatch.
    """
    T.check_spans(G)
    delta_down = subtree_sums(T, [weighted_degree(G, v) for v in range(G.n)])
    rho = [0] * G.n
    for u, v, w in G.edges:
        rho[lca_naive(T, u, v)] += w
    rho_down = subtree_sums(T, rho)

    rows = []
    for v in range(G.n):
        by_identity = delta_down[v] - 2 * rho_down[v]
        side = descendants(T, v)
        direct = 0 if len(side) == G.n else cut_value(G, side)
        if by_identity != direct:
            raise OracleMismatch(f"node {v}: identity gives {by_identity}, direct cut gives {direct}")
        rows.append(OneRespectRow(v, delta_down[v], rho_down[v], direct))
    return rows


def min_one_respecting_cut_oracle(G: Graph, T: RootedTree) -> tuple[int, int]:
    """Smallest subtree cut over non-root nodes; ties go to the smaller node ID."""
    if G.n < 2:
        raise ValueError("need at least two nodes")
    table = one_respect_table(G, T)
    best = min((row.cut_down, row.v) for row in table if row.v != T.root)
    return best


def global_min_cut_oracle(G: Graph) -> tuple[int, frozenset[int]]:
    """Exact global minimum cut (Stoer-Wagner) and one side of it."""
    if G.n < 2:
        raise ValueError("need at least two nodes")
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_weighted_edges_from(G.edges)
    value, (side, _) = nx.stoer_wagner(H)
    side = frozenset(side)
    if 0 not in side:
        side = frozenset(range(G.n)) - side
    return int(value), side


def brute_force_min_cut(G: Graph) -> tuple[int, frozenset[int]]:
    """Exhaustive search over every side containing node 0; exponential, small n only."""
    if G.n < 2:
        raise ValueError("need at least two nodes")
    if G.n > 20:
        raise ValueError("brute force limited to 20 nodes")
    best = None
    rest = range(1, G.n)
    for size in range(0, G.n - 1):
        for extra in combinations(rest, size):
            side = frozenset((0,) + extra)
            value = cut_value(G, side)
            if best is None or value < best[0]:
                best = (value, side)
    return best


def all_min_cuts_brute_force(G: Graph) -> tuple[int, list[frozenset[int]]]:
    """Every minimum cut, each given by its side containing node 0."""
    value, _ = brute_force_min_cut(G)
    sides = []
    rest = range(1, G.n)
    for size in range(0, G.n - 1):
        for extra in combinations(rest, size):
            side = frozenset((0,) + extra)
            if cut_value(G, side) == value:
                sides.append(side)
    return value, sides


def tree_crossings(T: RootedTree, side: frozenset[int]) -> int:
    """Number of tree edges with exactly one endpoint in ``side``."""
    return sum((p in side) != (v in side) for p, v in T.edges())
