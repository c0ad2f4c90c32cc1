"""Centralized tree packing, edge sampling, and the min-cut pipeline built on them.

The pipeline packs spanning trees greedily (each one an MST with respect to
the loads left by the previous ones), runs the distributed one-respecting
cut computation on every distinct tree, and keeps the best cut found.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from networkx.utils import UnionFind

from .congest import Metrics
from .graph import Graph, GraphError, RootedTree, cut_value, descendants, weighted_degree
from .onecut import CutReport, run_one_respecting
from .oracle import global_min_cut_oracle, one_respect_table

SAMPLING_CONSTANT = 3
SAMPLE_ATTEMPTS = 16
DEFAULT_TREE_CAP = 64


class SamplingError(RuntimeError):
    pass


def min_degree_bound(G: Graph) -> int:
    """Cheap upper bound on the min cut: the smallest weighted degree."""
    return min(weighted_degree(G, v) for v in range(G.n))


def default_tree_count(G: Graph, cap: int = DEFAULT_TREE_CAP) -> int:
    lam = min_degree_bound(G)
    log_n = math.log(max(G.n, 2))
    # lam**7 overflows floats long before it matters; compare in log space
    if 7 * math.log(lam) + 3 * math.log(log_n) >= math.log(cap):
        return cap
    return max(1, min(cap, math.ceil(lam ** 7 * log_n ** 3)))


@dataclass
class PackingConfig:
    tree_count: Optional[int] = None
    cap: int = DEFAULT_TREE_CAP
    # None disables sampling
    epsilon: Optional[float] = None
    seed: int = 0
    exact_mode: bool = False
    # "inverse-weight" adds 1/w(e) per use; "unit" adds 1
    load_rule: str = "inverse-weight"

    def __post_init__(self):
        if self.tree_count is not None and self.tree_count < 1:
            raise ValueError("tree_count must be at least 1")
        if self.cap < 1:
            raise ValueError("cap must be at least 1")
        if self.epsilon is not None and not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.load_rule not in ("inverse-weight", "unit"):
            raise ValueError(f"unknown load rule {self.load_rule!r}")

    def resolved_tree_count(self, G: Graph) -> int:
        return self.tree_count if self.tree_count is not None else default_tree_count(G, self.cap)


@dataclass
class Packing:
    trees: list[RootedTree]
    # edge index -> load after all trees were chosen
    loads: list[Fraction]


def pack_trees(G: Graph, count: int, load_rule: str = "inverse-weight") -> Packing:
    """Greedy packing that also returns the final edge loads."""
    if count < 1:
        raise ValueError("count must be at least 1")
    loads = [Fraction(0)] * G.m
    trees = []
    for _ in range(count):
        order = sorted(range(G.m), key=lambda i: (loads[i], G.edges[i][2], i))
        uf = UnionFind(range(G.n))
        chosen = []
        for i in order:
            u, v, _ = G.edges[i]
            if uf[u] != uf[v]:
                uf.union(u, v)
                chosen.append(i)
                if len(chosen) == G.n - 1:
                    break
        for i in chosen:
            w = G.edges[i][2]
            loads[i] += Fraction(1, w) if load_rule == "inverse-weight" else 1
        trees.append(RootedTree.from_edges(G.n, [G.edges[i][:2] for i in chosen], 0))
    return Packing(trees, loads)


def greedy_tree_packing(G: Graph, count: int, load_rule: str = "inverse-weight") -> list[RootedTree]:
    """``count`` spanning trees rooted at 0, each an MST under key (load, weight, edge index)."""
    return pack_trees(G, count, load_rule).trees


def sampling_probability(G: Graph, epsilon: float, lambda_hat: Optional[int] = None) -> float:
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    lam = min_degree_bound(G) if lambda_hat is None else lambda_hat
    return min(1.0, SAMPLING_CONSTANT * math.log(G.n) / (epsilon ** 2 * lam))


@dataclass
class Sample:
    graph: Graph
    p: float
    seed: int
    attempts: int


def sample_graph_detailed(G: Graph, epsilon: float, seed: int,
                          lambda_hat: Optional[int] = None) -> Sample:
    """Keep each unit of weight independently with probability p; resample until connected."""
    p = sampling_probability(G, epsilon, lambda_hat)
    if p >= 1.0:
        return Sample(G, 1.0, seed, 0)
    weights = np.array([w for _, _, w in G.edges], dtype=np.int64)
    for attempt in range(SAMPLE_ATTEMPTS):
        rng = np.random.default_rng(seed + attempt)
        kept = rng.binomial(weights, p)
        edges = [(u, v, int(k)) for (u, v, _), k in zip(G.edges, kept) if k > 0]
        try:
            return Sample(Graph(G.n, edges), p, seed + attempt, attempt + 1)
        except GraphError:
            continue
    raise SamplingError(f"{SAMPLE_ATTEMPTS} consecutive samples with p={p:.4g} were disconnected")


def sample_graph(G: Graph, epsilon: float, seed: int, lambda_hat: Optional[int] = None) -> Graph:
    return sample_graph_detailed(G, epsilon, seed, lambda_hat).graph


@dataclass
class PipelineResult:
    value: int
    witness: frozenset[int]
    reports: list[CutReport]
    trees: list[RootedTree]
    metrics: Metrics
    sampled: bool
    p: float
    oracle_lambda: Optional[int] = None
    # some packed tree has a subtree whose cut equals lambda
    certified: Optional[bool] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "value": self.value,
            "witness_nodes": sorted(self.witness),
            "trees_run": len(self.reports),
            "per_tree": [{"c_star": r.c_star, "v_star": r.v_star, "rounds": r.metrics.rounds}
                         for r in self.reports],
            "sampled": self.sampled,
            "p": self.p,
            "total_rounds": self.metrics.rounds,
            "total_messages": self.metrics.messages_sent,
        }
        if self.oracle_lambda is not None:
            out["oracle_lambda"] = self.oracle_lambda
            out["certified"] = self.certified
        return out

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def min_cut_pipeline(G: Graph, config: Optional[PackingConfig] = None) -> PipelineResult:
    """Pack trees (optionally on a sampled graph) and take the best one-respecting cut of G."""
    config = config or PackingConfig()
    if G.n < 2:
        raise ValueError("need at least two nodes")
    H, p = G, 1.0
    if config.epsilon is not None:
        try:
            s = sample_graph_detailed(G, config.epsilon, config.seed)
            H, p = s.graph, s.p
        except SamplingError:
            H, p = G, 1.0
    sampled = H is not G

    packed = greedy_tree_packing(H, config.resolved_tree_count(H), config.load_rule)
    trees: list[RootedTree] = []
    seen: set[RootedTree] = set()
    for T in packed:
        if T not in seen:
            seen.add(T)
            trees.append(T)

    # trees of the sample are subgraphs of G, so cuts are always evaluated on G itself
    reports = [run_one_respecting(G, T) for T in trees]
    best = min(range(len(reports)), key=lambda i: (reports[i].c_star, i))
    value = reports[best].c_star
    witness = frozenset(descendants(trees[best], reports[best].v_star))
    if cut_value(G, witness) != value:
        raise RuntimeError("pipeline witness does not realize the reported value")

    metrics = Metrics()
    for r in reports:
        metrics = metrics.merged(r.metrics)
    result = PipelineResult(value, witness, reports, trees, metrics, sampled, p)

    if config.exact_mode:
        lam, _ = global_min_cut_oracle(G)
        certified = any(
            min(row.cut_down for row in one_respect_table(G, T) if row.v != T.root) == lam
            for T in trees)
        if value < lam:
            raise RuntimeError(f"pipeline value {value} is below the min cut {lam}")
        if certified and value != lam:
            raise RuntimeError(f"a packed tree 1-respects a min cut but the pipeline found {value} > {lam}")
        result.oracle_lambda = lam
        result.certified = certified
    return result
