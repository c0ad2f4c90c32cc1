"""Distributed one-respecting minimum cut on a simulated CONGEST network."""

from .graph import Graph, GraphError, RootedTree, cut_value, descendants, load_graph, load_tree
from .congest import Metrics, Network, Tag
from .onecut import CutReport, run_one_respecting
from .oracle import global_min_cut_oracle, min_one_respecting_cut_oracle, one_respect_table
from .packing import PackingConfig, greedy_tree_packing, min_cut_pipeline, sample_graph

__all__ = [
    "CutReport",
    "Graph",
    "GraphError",
    "Metrics",
    "Network",
    "PackingConfig",
    "RootedTree",
    "Tag",
    "cut_value",
    "descendants",
    "global_min_cut_oracle",
    "greedy_tree_packing",
    "load_graph",
    "load_tree",
    "min_cut_pipeline",
    "min_one_respecting_cut_oracle",
    "one_respect_table",
    "run_one_respecting",
    "sample_graph",
]
