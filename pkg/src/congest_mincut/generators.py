"""Seeded instance generators for graphs and rooted trees."""

from __future__ import annotations

import math
import random
from typing import Optional

import networkx as nx

from .graph import Graph, RootedTree

KINDS = ("path", "cycle", "star", "random-gnp", "random-regular", "complete")
CONNECT_ATTEMPTS = 64


class GenerationError(RuntimeError):
    pass


def _weights(rng: random.Random, count: int, wmin: int, wmax: int) -> list[int]:
    if not 1 <= wmin <= wmax:
        raise ValueError("weights need 1 <= wmin <= wmax")
    return [rng.randint(wmin, wmax) for _ in range(count)]


def _weighted(n: int, pairs, rng: random.Random, wmin: int, wmax: int) -> Graph:
    pairs = sorted((min(u, v), max(u, v)) for u, v in pairs)
    return Graph(n, [(u, v, w) for (u, v), w in zip(pairs, _weights(rng, len(pairs), wmin, wmax))])


def generate(kind: str, n: int, seed: int = 0, wmin: int = 1, wmax: int = 1,
             p: Optional[float] = None, degree: int = 3) -> Graph:
    """Build a connected graph of the given kind; deterministic for a fixed seed.

    ``p`` defaults to 2 ln(n) / n for gnp graphs, comfortably above the
    connectivity threshold.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = random.Random(seed)
    if kind == "path":
        return _weighted(n, [(i, i + 1) for i in range(n - 1)], rng, wmin, wmax)
    if kind == "cycle":
        if n < 3:
            raise ValueError("a cycle needs at least 3 nodes")
        return _weighted(n, [(i, (i + 1) % n) for i in range(n)], rng, wmin, wmax)
    if kind == "star":
        return _weighted(n, [(0, i) for i in range(1, n)], rng, wmin, wmax)
    if kind == "complete":
        return _weighted(n, [(u, v) for u in range(n) for v in range(u + 1, n)], rng, wmin, wmax)
    if kind == "random-gnp":
        if p is None:
            p = min(1.0, 2 * max(1.0, math.log(n)) / n)
        for _ in range(CONNECT_ATTEMPTS):
            H = nx.gnp_random_graph(n, p, seed=rng.randrange(2**32))
            if nx.is_connected(H):
                return _weighted(n, H.edges(), rng, wmin, wmax)
        raise GenerationError(f"no connected G(n={n}, p={p}) in {CONNECT_ATTEMPTS} attempts")
    if kind == "random-regular":
        if degree >= n or (n * degree) % 2:
            raise ValueError(f"no {degree}-regular graph on {n} nodes")
        for _ in range(CONNECT_ATTEMPTS):
            H = nx.random_regular_graph(degree, n, seed=rng.randrange(2**32))
            if nx.is_connected(H):
                return _weighted(n, H.edges(), rng, wmin, wmax)
        raise GenerationError(f"no connected {degree}-regular graph on {n} nodes in {CONNECT_ATTEMPTS} attempts")
    raise ValueError(f"unknown graph kind {kind!r}; expected one of {', '.join(KINDS)}")


def random_spanning_tree(G: Graph, seed: int = 0, root: Optional[int] = None) -> RootedTree:
    """A spanning tree grown from a random frontier; shapes range from bushy to deep."""
    rng = random.Random(seed)
    root = rng.randrange(G.n) if root is None else root
    parent: list[Optional[int]] = [None] * G.n
    seen = {root}
    frontier = [root]
    while frontier:
        x = frontier.pop(rng.randrange(len(frontier)))
        for u in G.neighbors(x):
            if u not in seen:
                seen.add(u)
                parent[u] = x
                frontier.append(u)
    return RootedTree(parent)


def random_tree(n: int, seed: int = 0, shape: str = "recursive") -> RootedTree:
    """Random rooted tree on 0..n-1 rooted at 0.

    ``recursive`` attaches each node to a uniform earlier node (depth about
    log n), ``uniform`` draws a uniform labeled tree (depth about sqrt n),
    ``caterpillar`` hangs leaves off a long spine.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    if n == 1:
        return RootedTree([None])
    if shape == "recursive":
        perm = list(range(n))
        rng.shuffle(perm)
        edges = [(perm[i], perm[rng.randrange(i)]) for i in range(1, n)]
    elif shape == "uniform":
        H = nx.random_labeled_tree(n, seed=rng.randrange(2**32))
        edges = list(H.edges())
    elif shape == "caterpillar":
        spine = max(1, n // 3)
        edges = [(i, i - 1) for i in range(1, spine)]
        edges += [(i, rng.randrange(spine)) for i in range(spine, n)]
    else:
        raise ValueError(f"unknown tree shape {shape!r}")
    return RootedTree.from_edges(n, edges, 0)


def tree_graph(T: RootedTree) -> Graph:
    return Graph(T.n, [(min(p, v), max(p, v), 1) for p, v in T.edges()])
