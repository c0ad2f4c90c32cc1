"""Property suites that compare distributed runs against the centralized references.

Each generated (G, T) instance is run once with the message log enabled and
checked by six suites. Failing instances are dumped as graph and tree files
so they can be replayed from the command line.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

from .congest import MAX_FIELDS, congestion_violations
from .fragments import contract, partition_reference
from .generators import generate, random_spanning_tree
from .graph import Graph, RootedTree, bfs_tree, cut_value, descendants, tree_to_text
from .onecut import (
    CASE_INSIDE_ENDPOINT,
    CASE_MERGING,
    CASE_SAME_FRAGMENT,
    OTHER,
    SELF,
    CutReport,
    NodeState,
    Trace,
    run_one_respecting,
)
from .oracle import lca_naive, one_respect_table
from .packing import greedy_tree_packing

SUITES = ("oracle-equivalence", "cut-identity", "lca-exactness", "fragment-bounds",
          "congestion", "round-scaling")
ROUND_CONSTANT = 50


@dataclass
class Instance:
    name: str
    G: Graph
    T: RootedTree


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class VerifyReport:
    suites: dict[str, SuiteResult]
    instances: int
    reproducers: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites.values())

    def summary(self) -> str:
        lines = []
        for s in self.suites.values():
            status = "pass" if s.passed else f"FAIL ({len(s.failures)})"
            lines.append(f"{s.name:20s} {status:10s} {s.checked} checks")
            lines.extend(f"    {f}" for f in s.failures[:5])
        for p in self.reproducers:
            lines.append(f"reproducer: {p}")
        if self.passed:
            lines.append(f"all {len(self.suites)} suites pass on {self.instances} instances")
        else:
            bad = sum(not s.passed for s in self.suites.values())
            lines.append(f"{bad} of {len(self.suites)} suites failed on {self.instances} instances")
        return "\n".join(lines)


def corpus(sizes: Sequence[int], seed: int = 0, per_size: int = 3) -> Iterator[Instance]:
    """Mixed instances per size: gnp and regular graphs, unit and random weights, several tree shapes."""
    for n in sizes:
        for i in range(per_size):
            s = seed * 7919 + n * 31 + i
            if n < 4:
                G = generate("path", max(n, 2), seed=s, wmax=1 + i)
            elif i % 2 == 0:
                G = generate("random-gnp", n, seed=s, wmax=1 if i % 4 == 0 else 10)
            else:
                G = generate("random-regular", n if n % 2 == 0 else n + 1, seed=s, wmax=10)
            shape = i % 3
            if shape == 0:
                T = random_spanning_tree(G, seed=s)
            elif shape == 1:
                T = bfs_tree(G, s % G.n)
            else:
                T = greedy_tree_packing(G, 1)[0]
            yield Instance(f"n{G.n}-s{seed}-i{i}", G, T)


def check_instance(inst: Instance, results: dict[str, SuiteResult],
                   tamper: Optional[Callable[[list[NodeState]], None]] = None) -> bool:
    """Run one instance through every suite; returns True when all checks passed."""
    G, T = inst.G, inst.T
    before = {name: len(r.failures) for name, r in results.items()}

    def fail(suite: str, msg: str) -> None:
        results[suite].failures.append(f"{inst.name}: {msg}")

    try:
        report, trace = run_one_respecting(G, T, record=True, trace=True, tamper=tamper)
    except Exception as exc:  # any crash counts against the headline suite
        fail("oracle-equivalence", f"run raised {type(exc).__name__}: {exc}")
        return False

    _check_oracle(G, T, report, results["oracle-equivalence"], fail)
    _check_identity(G, T, trace, results["cut-identity"], fail)
    _check_lca(G, T, trace, results["lca-exactness"], fail)
    _check_fragments(G, T, trace, results["fragment-bounds"], fail)
    _check_congestion(G, trace, results["congestion"], fail)
    results["round-scaling"].checked += 1
    bound = ROUND_CONSTANT * (math.sqrt(G.n) + report.diameter)
    if report.metrics.rounds > bound:
        fail("round-scaling", f"{report.metrics.rounds} rounds exceeds {bound:.0f}")
    return all(len(r.failures) == before[name] for name, r in results.items())


def _check_oracle(G, T, report: CutReport, res, fail):
    table = one_respect_table(G, T)
    for row, ref in zip(report.per_node, table):
        res.checked += 1
        got = (row.delta_down, row.rho_down, row.cut_down)
        want = (ref.delta_down, ref.rho_down, ref.cut_down)
        if got != want:
            fail(res.name, f"node {row.v}: distributed {got} != oracle {want}")
            return
    best = min((r.cut_down, r.v) for r in table if r.v != T.root)
    res.checked += 1
    if (report.c_star, report.v_star) != best:
        fail(res.name, f"(c*, v*) = {(report.c_star, report.v_star)}, oracle {best}")


def _check_identity(G, T, trace: Trace, res, fail):
    for s in trace.states:
        res.checked += 1
        side = descendants(T, s.v)
        direct = 0 if len(side) == G.n else cut_value(G, side)
        if s.delta_down - 2 * s.rho_down != direct:
            fail(res.name, f"node {s.v}: {s.delta_down} - 2*{s.rho_down} != cut {direct}")
            return


def _check_lca(G, T, trace: Trace, res, fail):
    label = trace.forest.label
    for e in trace.edge_lca:
        res.checked += 1
        want = lca_naive(T, e.x, e.y)
        if e.lca != want:
            fail(res.name, f"edge ({e.x}, {e.y}): lca {e.lca}, expected {want}")
            return
        fx, fy, fz = label[e.x], label[e.y], label[e.lca]
        if e.case == CASE_SAME_FRAGMENT:
            ok = fx == fy == fz
        elif e.case == CASE_INSIDE_ENDPOINT:
            ok = fx != fy and fz == (fx if e.where == SELF else fy if e.where == OTHER else None)
        elif e.case == CASE_MERGING:
            ok = fz not in (fx, fy) and e.lca in trace.merge_tree.merging
        else:
            ok = False
        if not ok:
            fail(res.name, f"edge ({e.x}, {e.y}): case {e.case} inconsistent with fragments {fx}, {fy}, {fz}")
            return
    limit = 2 * trace.forest.max_size + 2
    per_edge = Counter((min(e.src, e.dst), max(e.src, e.dst))
                       for e in trace.network.log if e.phase == "edge-lca")
    res.checked += 1
    worst = max(per_edge.values(), default=0)
    if worst > limit:
        fail(res.name, f"{worst} messages on one edge during the LCA phase (limit {limit})")


def _check_fragments(G, T, trace: Trace, res, fail):
    forest = trace.forest
    n, k = G.n, forest.k
    root_fid = forest.label[T.root]
    res.checked += 1
    if forest.count > math.ceil(math.sqrt(n)) + 2:
        fail(res.name, f"{forest.count} fragments for n={n}")
    for fid in forest.ids:
        res.checked += 1
        if fid != root_fid and forest.size[fid] < k:
            fail(res.name, f"fragment {fid} has {forest.size[fid]} < k={k} nodes")
        if forest.diameter[fid] > 4 * k:
            fail(res.name, f"fragment {fid} has diameter {forest.diameter[fid]} > 4k")
    res.checked += 2
    contracted = contract(T, forest.label)
    if contracted.parent != trace.fragment_trees[0].parent:
        fail(res.name, "broadcast fragment tree differs from the contraction of T")
    if partition_reference(T, k).label != forest.label:
        fail(res.name, "distributed partition differs from the centralized twin")


def _check_congestion(G, trace: Trace, res, fail):
    log = trace.network.log
    m = trace.network.metrics
    res.checked += 1
    bad = congestion_violations(log)
    if bad:
        fail(res.name, f"{bad} congestion violations in the message log")
    if m.max_fields_per_message > MAX_FIELDS:
        fail(res.name, f"a message carried {m.max_fields_per_message} fields")
    if m.messages_sent > m.rounds * 2 * G.m:
        fail(res.name, "more messages than rounds * 2|E|")


def dump_reproducer(inst: Instance, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    gpath = directory / f"{inst.name}.graph.txt"
    gpath.write_text(inst.G.to_text())
    (directory / f"{inst.name}.tree.txt").write_text(tree_to_text(inst.T))
    return gpath


def verify(sizes: Sequence[int], seed: int = 0, per_size: int = 3,
           repro_dir: Optional[Path] = None,
           tamper: Optional[Callable[[list[NodeState]], None]] = None) -> VerifyReport:
    results = {name: SuiteResult(name) for name in SUITES}
    report = VerifyReport(results, 0)
    for inst in corpus(sizes, seed, per_size):
        report.instances += 1
        ok = check_instance(inst, results, tamper)
        if not ok and repro_dir is not None:
            report.reproducers.append(dump_reproducer(inst, Path(repro_dir)))
    return report


def corrupt_rho(states: list[NodeState]) -> None:
    """Fault injection: understate rho_down at the deepest non-root node."""
    victim = max((s for s in states if s.tparent is not None), key=lambda s: (len(s.anc), s.v))
    victim.rho_down -= 1
