"""Command-line entry point: ``congest-mincut {gen,onecut,mincut,verify}``.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .congest import CongestError
from .fragments import decompose
from .generators import KINDS, GenerationError, generate
from .graph import Graph, GraphError, RootedTree, graph_to_dot, load_graph, load_tree
from .onecut import run_one_respecting
from .packing import PackingConfig, greedy_tree_packing, min_cut_pipeline
from .verify import corrupt_rho, verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
ORACLE_LIMIT = 300


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(path: str) -> Graph:
    try:
        return load_graph(_read(path))
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_tree(source: str, G: Graph, root: int) -> RootedTree:
    if not 0 <= root < G.n:
        raise InputError(f"root {root} is outside 0..{G.n - 1}")
    if source == "mst":
        T = greedy_tree_packing(G, 1)[0]
        return T if root == 0 else RootedTree.from_edges(G.n, T.edges(), root)
    try:
        T = load_tree(_read(source), G.n, root)
        T.check_spans(G)
    except GraphError as exc:
        raise InputError(f"{source}: {exc}") from None
    return T


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--sizes expects comma-separated integers, got {text!r}") from None
    if not sizes or min(sizes) < 2:
        raise InputError("--sizes entries must be at least 2")
    return sizes


def cmd_gen(args) -> int:
    try:
        G = generate(args.kind, args.n, seed=args.seed, wmin=args.wmin, wmax=args.wmax,
                     p=args.p, degree=args.degree)
    except (ValueError, GenerationError) as exc:
        raise InputError(str(exc)) from None
    text = G.to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_onecut(args) -> int:
    G = _load_graph(args.graph)
    T = _load_tree(args.tree, G, args.root)
    report = run_one_respecting(G, T)
    if args.emit == "json":
        print(report.to_json(indent=2))
    elif args.emit == "dot":
        print(graph_to_dot(G, T, decompose(G, T).forest.label), end="")
    else:
        print(f"{'v':>6} {'delta_down':>11} {'rho_down':>9} {'cut_down':>9}")
        for row in report.per_node:
            print(f"{row.v:>6} {row.delta_down:>11} {row.rho_down:>9} {row.cut_down:>9}")
        print(f"c* = {report.c_star} at v* = {report.v_star} (tree edge {report.cut_edge[0]}-{report.cut_edge[1]}), "
              f"{report.metrics.rounds} rounds")
    return EXIT_OK


def cmd_mincut(args) -> int:
    G = _load_graph(args.graph)
    if G.n < 2:
        raise InputError("graph needs at least two nodes")
    config = PackingConfig(tree_count=args.trees, epsilon=args.epsilon, seed=args.seed,
                           exact_mode=G.n <= ORACLE_LIMIT)
    result = min_cut_pipeline(G, config)
    if args.emit == "dot":
        print(graph_to_dot(G, result.trees[0], [int(v in result.witness) for v in range(G.n)]), end="")
    elif args.emit == "table":
        print(f"value {result.value}  witness {sorted(result.witness)}")
        for i, r in enumerate(result.reports):
            print(f"tree {i}: c* = {r.c_star} at v* = {r.v_star}, {r.metrics.rounds} rounds")
        if result.oracle_lambda is not None:
            print(f"oracle lambda {result.oracle_lambda}, certified {result.certified}")
    else:
        print(result.to_json(indent=2))
    return EXIT_OK


def cmd_verify(args) -> int:
    tamper = corrupt_rho if args.inject_rho_fault else None
    report = verify(_sizes(args.sizes), seed=args.seed, per_size=args.per_size,
                    repro_dir=Path(args.repro_dir), tamper=tamper)
    if args.emit == "json":
        print(json.dumps({
            "passed": report.passed,
            "instances": report.instances,
            "suites": {s.name: {"passed": s.passed, "checks": s.checked, "failures": s.failures}
                       for s in report.suites.values()},
            "reproducers": [str(p) for p in report.reproducers],
        }, indent=2))
    else:
        print(report.summary())
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="congest-mincut",
                                     description="Distributed one-respecting min cut on a simulated CONGEST network.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated graph as an edge list")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("n", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--wmin", type=int, default=1)
    g.add_argument("--wmax", type=int, default=1)
    g.add_argument("--p", type=float, default=None, help="edge probability for random-gnp")
    g.add_argument("--degree", type=int, default=3, help="degree for random-regular")
    g.add_argument("--out", help="output file (default stdout)")
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("onecut", help="every subtree cut of one spanning tree")
    o.add_argument("--graph", required=True)
    o.add_argument("--tree", default="mst", help="tree edge-list file, or 'mst'")
    o.add_argument("--root", type=int, default=0)
    o.add_argument("--emit", choices=("json", "dot", "table"), default="json")
    o.set_defaults(func=cmd_onecut)

    m = sub.add_parser("mincut", help="tree packing pipeline")
    m.add_argument("--graph", required=True)
    m.add_argument("--trees", type=int, default=None)
    m.add_argument("--epsilon", type=float, default=None)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--emit", choices=("json", "dot", "table"), default="json")
    m.set_defaults(func=cmd_mincut)

    v = sub.add_parser("verify", help="run the property suites on generated instances")
    v.add_argument("--sizes", default="16,64")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--per-size", type=int, default=3)
    v.add_argument("--repro-dir", default="verify-repro")
    v.add_argument("--emit", choices=("json", "table"), default="table")
    v.add_argument("--inject-rho-fault", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CongestError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
