"""Distributed computation of every subtree cut of a rooted spanning tree.

Each node v ends up knowing delta_down(v) (total weighted degree of its
subtree), rho_down(v) (total weight of edges whose endpoints' LCA lies in
its subtree) and therefore cut(v_down) = delta_down - 2 * rho_down. The
minimum over non-root nodes is then found by one convergecast.

The heavy lifting runs per fragment (height below sqrt(n)) or over the BFS
tree with pipelining, so no step waits on the full depth of T except the
bottom-up partition itself.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .congest import Handler, Metrics, Network, Tag
from .fragments import (
    FragmentForest,
    FragmentLocal,
    FragmentTree,
    build_fragment_tree,
    elect_fragment_ids,
    forest_from_labels,
    partition,
    size_parameter,
)
from .graph import Graph, RootedTree, hop_diameter
from .protocols import (
    BfsTree,
    broadcast_all,
    build_bfs,
    census,
    convergecast_min,
    convergecast_sum,
    subtree_sum,
)

CASE_SAME_FRAGMENT = 1
CASE_MERGING = 2
CASE_INSIDE_ENDPOINT = 3

SELF, OTHER, NEITHER = "self", "other", "neither"

# end-marker scopes for the ancestor streams
OWN_DONE, ALL_DONE = 0, 1


@dataclass
class NodeState:
    """Everything one node knows. Handlers for node v only ever read ``states[v]``."""

    v: int
    weights: dict[int, int]
    tparent: Optional[int]
    tchildren: tuple[int, ...]
    bfs_parent: Optional[int] = None
    bfs_children: tuple[int, ...] = ()
    n: int = 0
    ecc: int = 0
    k: int = 0
    frag: Optional[FragmentLocal] = None
    ftree: Optional[FragmentTree] = None
    # (ancestor, its fid, hops from v); hops 0 is v itself
    anc: list[tuple[int, int, int]] = field(default_factory=list)
    direct_child_frags: frozenset[int] = frozenset()
    frags_below: frozenset[int] = frozenset()
    # fid -> lowest known ancestor whose subtree contains that fragment
    low: dict[int, int] = field(default_factory=dict)
    delta_sub: int = 0
    delta_frag: dict[int, int] = field(default_factory=dict)
    delta_down: int = 0
    merging: bool = False
    merging_nodes: frozenset[int] = frozenset()
    merge_parent: dict[int, int] = field(default_factory=dict)
    merge_members: frozenset[int] = frozenset()
    # neighbor -> (lca, case, where relative to this node)
    lca: dict[int, tuple[int, int, str]] = field(default_factory=dict)
    rho_merging: dict[int, int] = field(default_factory=dict)
    rho_sub: int = 0
    rho_frag: dict[int, int] = field(default_factory=dict)
    rho_down: int = 0
    cut_down: int = 0
    best: Optional[tuple[int, int, int]] = None

    @property
    def fid(self) -> int:
        return self.frag.fid

    @property
    def frag_parent(self) -> Optional[int]:
        return None if self.frag.is_fragment_root else self.tparent

    def own_chain(self) -> list[int]:
        """v and its ancestors inside v's fragment, lowest first."""
        return [a for a, f, _ in self.anc if f == self.fid]

    def fragment_roots_known(self) -> set[int]:
        tops: dict[int, tuple[int, int]] = {}
        for a, f, h in self.anc:
            if f not in tops or h > tops[f][1]:
                tops[f] = (a, h)
        roots = {a for a, _ in tops.values()}
        roots.update(e[0] for e in self.ftree.inter_edges)
        return roots

    def in_merge_tree(self, a: int) -> bool:
        return a in self.merging_nodes or a in self.fragment_roots_known()

    def lowest_merge_node(self) -> int:
        """Lowest ancestor-or-self of v that belongs to the merge tree."""
        roots = self.fragment_roots_known()
        for a, _, _ in self.anc:
            if a in self.merging_nodes or a in roots:
                return a
        raise RuntimeError(f"node {self.v}: no merge-tree member among its ancestors")


# ---------------------------------------------------------------------------
# Fragments below each node, nearby ancestors, lowest ancestor per fragment


class _ChildFragments(Handler):
    def __init__(self, parent, children, own: Sequence[int]):
        self.parent = parent
        self.children = children
        self.queue = deque(own)
        self.seen = set(own)
        self.ended = 0
        if parent is None and not children:
            self._finish()

    def _finish(self):
        self.done = True
        self.output = frozenset(self.seen)

    def step(self, rnd, inbox, send):
        for u, msg in inbox.items():
            if msg.tag == Tag.CHILD_FRAG:
                self.seen.add(msg.fields[0])
                self.queue.append(msg.fields[0])
            else:
                self.ended += 1
        if self.parent is None:
            if self.ended == len(self.children):
                self._finish()
            return
        if self.queue:
            send(self.parent, Tag.CHILD_FRAG, self.queue.popleft())
        elif self.ended == len(self.children):
            send(self.parent, Tag.CHILD_FRAG_END)
            self._finish()


class _ScopedDowncast(Handler):
    """Stream items down T, one per child edge per round, then end markers.

    Children in the sender's own fragment get everything; roots of child
    fragments only get items tagged with the sender's own fragment ID.
    Two end markers keep termination local: ``OWN_DONE`` says every item
    tagged with the sender's fragment has been sent, ``ALL_DONE`` says the
    stream is over. A fragment root learns its own fragment's items
    locally, so no marker ever waits on anything above the parent fragment.
    """

    item_tag = Tag.ANC
    end_tag = Tag.ANC_END

    def __init__(self, state: NodeState):
        self.state = state
        self.fid = state.fid
        inner = set(state.frag.in_fragment_children)
        self.children = [(c, c in inner) for c in state.tchildren]
        self.queues = {c: deque() for c, _ in self.children}
        self.own_done = state.frag.is_fragment_root
        self.all_done = state.tparent is None
        self.own_marked = self.all_marked = False
        self.received: list[tuple[int, ...]] = []
        for item in self.initial_items():
            self.push(item)
        self._mark()

    def initial_items(self):
        return []

    def relay(self, fields):
        """Record an item from the parent; return the item to push further, or None."""
        raise NotImplementedError

    def item_fid(self, item) -> int:
        raise NotImplementedError

    def push(self, item):
        item_fid = self.item_fid(item)
        for c, inner in self.children:
            if inner or item_fid == self.fid:
                self.queues[c].append(item)

    def _mark(self):
        # markers go behind every item they vouch for
        if self.own_done and not self.own_marked:
            self.own_marked = True
            for c, inner in self.children:
                self.queues[c].append((OWN_DONE,) if inner else (ALL_DONE,))
        if self.all_done and not self.all_marked:
            self.all_marked = True
            for c, inner in self.children:
                if inner:
                    self.queues[c].append((ALL_DONE,))

    def step(self, rnd, inbox, send):
        for u, msg in inbox.items():
            if msg.tag == self.end_tag:
                if msg.fields[0] == OWN_DONE:
                    self.own_done = True
                else:
                    self.own_done = self.all_done = True
            else:
                self.received.append(msg.fields)
                out = self.relay(msg.fields)
                if out is not None:
                    self.push(out)
        self._mark()
        for c, _ in self.children:
            q = self.queues[c]
            if q:
                item = q.popleft()
                if len(item) == 1:
                    send(c, self.end_tag, item[0])
                else:
                    send(c, self.item_tag, *item)
        if self.all_done and not any(self.queues.values()):
            self.done = True
            self.output = self.received


class _Ancestors(_ScopedDowncast):
    item_tag = Tag.ANC
    end_tag = Tag.ANC_END

    def initial_items(self):
        return [(self.state.v, self.fid, 1)]

    def item_fid(self, item):
        return item[1]

    def relay(self, fields):
        a, f, hops = fields
        return (a, f, hops + 1)


class _LowAncestors(_ScopedDowncast):
    item_tag = Tag.LOW
    end_tag = Tag.LOW_END

    def initial_items(self):
        return [(self.state.v, f, self.fid) for f in sorted(self.state.frags_below)]

    def item_fid(self, item):
        return item[2]

    def relay(self, fields):
        a, f, afid = fields
        if f in self.state.frags_below:
            return None
        return (a, f, afid)


@dataclass(frozen=True)
class AncestorInfo:
    anc: tuple[tuple[tuple[int, int, int], ...], ...]
    frags_below: tuple[frozenset[int], ...]
    low: tuple[dict[int, int], ...]

    def ancestors(self, v: int) -> list[int]:
        return [a for a, _, _ in self.anc[v]]

    def frags_below_ancestor(self, v: int, u: int) -> frozenset[int]:
        """Fragments below ancestor ``u`` of ``v``, rebuilt from ``v``'s lowest-ancestor map."""
        hops = {a: h for a, _, h in self.anc[v]}
        if u not in hops:
            raise KeyError(f"{u} is not in A({v})")
        return frozenset(f for f, a in self.low[v].items() if hops[a] <= hops[u])


def compute_ancestor_info(net: Network, states: Sequence[NodeState]) -> AncestorInfo:
    """Every node learns the fragments inside its subtree, its ancestors in its own and
    parent fragment, and for each fragment the lowest such ancestor containing it.
    """
    n = net.G.n
    handlers = []
    for s in states:
        own = sorted(s.frag.neighbor_fid[c] for c in s.tchildren if c in s.frag.neighbor_fid)
        handlers.append(_ChildFragments(s.frag_parent, s.frag.in_fragment_children, own))
    direct = net.run_phase("child-fragments", handlers)
    for s, d in zip(states, direct):
        below = set()
        for f in d:
            below |= s.ftree.descendants(f)
        if s.frag.is_fragment_root:
            below.add(s.fid)
        s.direct_child_frags = d
        s.frags_below = frozenset(below)

    received = net.run_phase("ancestors", [_Ancestors(s) for s in states])
    for s, items in zip(states, received):
        s.anc = [(s.v, s.fid, 0)] + sorted((tuple(x) for x in items), key=lambda t: t[2])

    received = net.run_phase("low-ancestors", [_LowAncestors(s) for s in states])
    for s, items in zip(states, received):
        low = {f: s.v for f in s.frags_below}
        for a, f, _ in items:
            if f not in s.frags_below:
                low[f] = a
        s.low = low

    return AncestorInfo(tuple(tuple(s.anc) for s in states), tuple(s.frags_below for s in states),
                        tuple(dict(s.low) for s in states))


# ---------------------------------------------------------------------------
# Subtree degree sums


def compute_delta_down(net: Network, states: Sequence[NodeState], bfs: BfsTree) -> list[int]:
    """Intra-fragment suffix sums plus broadcast per-fragment degree totals."""
    n = net.G.n
    sums = subtree_sum(net, [s.frag_parent for s in states],
                       [s.frag.in_fragment_children for s in states],
                       [sum(s.weights.values()) for s in states], phase="delta-fragment")
    tokens = []
    for s, x in zip(states, sums):
        s.delta_sub = x
        tokens.append([(s.fid, x)] if s.frag.is_fragment_root else [])
    received = broadcast_all(net, bfs, tokens, phase="delta-broadcast")
    for s, toks in zip(states, received):
        s.delta_frag = dict(toks)
        s.delta_down = s.delta_sub + sum(s.delta_frag[f] for f in s.frags_below if f != s.fid)
    return [s.delta_down for s in states]


# ---------------------------------------------------------------------------
# Merging nodes and the merge tree over fragment roots and merging nodes


class _MergeCheck(Handler):
    def __init__(self, parent, children, has_fragments: bool):
        self.parent = parent
        self.expect = len(children)
        self.flag = int(has_fragments)
        self.bearing = 0
        self.heard = 0
        self.sent = False

    def step(self, rnd, inbox, send):
        for u, msg in inbox.items():
            self.heard += 1
            self.bearing += msg.fields[0]
        if not self.sent:
            if self.parent is not None:
                send(self.parent, Tag.HAS_FRAG, self.flag)
            self.sent = True
        if self.heard == self.expect:
            self.done = True
            self.output = self.bearing >= 2


@dataclass(frozen=True)
class MergingStructure:
    merging: frozenset[int]
    parent: dict[int, Optional[int]]
    root: int

    @property
    def members(self) -> frozenset[int]:
        return frozenset(self.parent)

    def ancestors(self, a: int) -> list[int]:
        out = [a]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out

    def lca(self, a: int, b: int) -> int:
        up = set(self.ancestors(a))
        for x in self.ancestors(b):
            if x in up:
                return x
        raise ValueError(f"{a} and {b} share no merge-tree ancestor")


def _merge_tree_from_edges(root_hint: int, edges: Sequence[tuple[int, ...]]) -> MergingStructure:
    parent: dict[int, Optional[int]] = {}
    for c, p in edges:
        parent[c] = p
        parent.setdefault(p, None)
    if not parent:
        parent[root_hint] = None
    roots = [a for a, p in parent.items() if p is None]
    if len(roots) != 1:
        raise RuntimeError(f"merge-tree edges give {len(roots)} roots")
    return MergingStructure(frozenset(), parent, roots[0])


def compute_merging_structure(net: Network, states: Sequence[NodeState], bfs: BfsTree) -> MergingStructure:
    """Detect merging nodes, then broadcast them and every merge-tree edge."""
    flags = net.run_phase("merge-check", [
        _MergeCheck(s.tparent, s.tchildren, bool(s.frags_below)) for s in states])
    tokens = []
    for s, flag in zip(states, flags):
        s.merging = flag
        tokens.append([(s.v,)] if flag else [])
    received = broadcast_all(net, bfs, tokens, phase="merging-broadcast")
    edge_tokens = []
    for s, toks in zip(states, received):
        s.merging_nodes = frozenset(t[0] for t in toks)
        mine = []
        if s.in_merge_tree(s.v) and s.tparent is not None:
            for a, _, h in s.anc[1:]:
                if s.in_merge_tree(a):
                    mine.append((s.v, a))
                    break
            else:
                raise RuntimeError(f"node {s.v}: merge-tree parent not found among its ancestors")
        edge_tokens.append(mine)
    received = broadcast_all(net, bfs, edge_tokens, phase="merge-tree-broadcast")
    views = []
    for s, toks in zip(states, received):
        # the merge-tree root is the root of T; with no edges the only member is that root
        view = _merge_tree_from_edges(s.anc[-1][0] if s.tparent is not None else s.v, toks)
        s.merge_parent = {c: p for c, p in view.parent.items() if p is not None}
        s.merge_members = view.members
        views.append(view)
    first = views[0]
    for view in views[1:]:
        if view.parent != first.parent:
            raise RuntimeError("nodes disagree on the merge tree")
    for s in states:
        if s.merging and s.v not in first.parent:
            raise RuntimeError(f"merging node {s.v} missing from the merge tree")
    return MergingStructure(states[0].merging_nodes, first.parent, first.root)


# ---------------------------------------------------------------------------
# LCA of every edge


class _EdgeLca(Handler):
    """Runs the three-case LCA exchange on every incident edge in parallel."""

    def __init__(self, state: NodeState, merge_tree: MergingStructure):
        self.s = state
        self.merge_tree = merge_tree
        self.fid = state.fid
        self.chain = state.own_chain()
        self.low_own = {f: a for f, a in state.low.items() if a in set(self.chain)}
        self.anchor = state.lowest_merge_node()
        self.edges = sorted(state.weights)
        self.other_fid: dict[int, int] = {}
        self.queue: dict[int, deque] = {u: deque() for u in self.edges}
        self.other_chain: dict[int, list[int]] = {u: [] for u in self.edges}
        self.other_complete: dict[int, bool] = {u: False for u in self.edges}
        self.other_info: dict[int, tuple[int, int]] = {}
        self.result: dict[int, tuple[int, int, str]] = {}
        self.started = False
        if not self.edges:
            self.done = True
            self.output = {}

    def step(self, rnd, inbox, send):
        if not self.started:
            for u in self.edges:
                send(u, Tag.LCA_FID, self.fid)
            self.started = True
            return
        for u, msg in inbox.items():
            if msg.tag == Tag.LCA_FID:
                f = msg.fields[0]
                self.other_fid[u] = f
                if f == self.fid:
                    last = len(self.chain) - 1
                    self.queue[u].extend((a, last - i) for i, a in enumerate(self.chain))
                else:
                    self.queue[u].append(("info", self.low_own.get(f, -1), self.anchor))
            elif msg.tag == Tag.LCA_ANC:
                a, remaining = msg.fields
                self.other_chain[u].append(a)
                if remaining == 0:
                    self.other_complete[u] = True
            else:
                self.other_info[u] = msg.fields
                self.other_complete[u] = True
        for u in self.edges:
            q = self.queue[u]
            if q:
                item = q.popleft()
                if item[0] == "info":
                    send(u, Tag.LCA_INFO, item[1], item[2])
                else:
                    send(u, Tag.LCA_ANC, *item)
            if u not in self.result and not q and self.other_complete[u] and u in self.other_fid:
                self.result[u] = self._resolve(u)
        if len(self.result) == len(self.edges):
            self.done = True
            self.output = self.result

    def _resolve(self, u: int) -> tuple[int, int, str]:
        if self.other_fid[u] == self.fid:
            theirs = set(self.other_chain[u])
            for a in self.chain:
                if a in theirs:
                    return (a, CASE_SAME_FRAGMENT, SELF)
            raise RuntimeError(f"edge ({self.s.v}, {u}): no common ancestor inside the fragment")
        mine = self.low_own.get(self.other_fid[u], -1)
        their_low, their_anchor = self.other_info[u]
        if mine >= 0 and their_low >= 0:
            raise RuntimeError(f"edge ({self.s.v}, {u}): both fragments claim the LCA")
        if mine >= 0:
            return (mine, CASE_INSIDE_ENDPOINT, SELF)
        if their_low >= 0:
            return (their_low, CASE_INSIDE_ENDPOINT, OTHER)
        return (self.merge_tree.lca(self.anchor, their_anchor), CASE_MERGING, NEITHER)


@dataclass(frozen=True)
class EdgeLca:
    x: int
    y: int
    lca: int
    case: int
    # fragment holding the LCA, relative to x
    where: str


def compute_edge_lca(net: Network, states: Sequence[NodeState], merge_tree: MergingStructure) -> list[EdgeLca]:
    """Both endpoints of every edge learn its LCA and case."""
    views = [MergingStructure(s.merging_nodes, {**{m: None for m in s.merge_members}, **s.merge_parent},
                              merge_tree.root) for s in states]
    out = net.run_phase("edge-lca", [_EdgeLca(s, views[s.v]) for s in states])
    flip = {SELF: OTHER, OTHER: SELF, NEITHER: NEITHER}
    results = []
    for s, res in zip(states, out):
        s.lca = res
    for x, y, _ in net.G.edges:
        zx, cx, wx = states[x].lca[y]
        zy, cy, wy = states[y].lca[x]
        if (zx, cx) != (zy, cy) or (cx != CASE_SAME_FRAGMENT and flip[wx] != wy):
            raise RuntimeError(f"endpoints of edge ({x}, {y}) disagree on its LCA")
        results.append(EdgeLca(x, y, zx, cx, wx))
    return results


# ---------------------------------------------------------------------------
# Subtree sums of LCA-attributed weight


class _RhoPipeline(Handler):
    """Pipelined per-ancestor sums inside a fragment, followed by the plain subtree total.

    A child's stream carries, for each in-fragment ancestor of the child from
    the fragment root downwards, the held weight keyed at that ancestor, then
    the child's subtree total of rho.
    """

    def __init__(self, state: NodeState, own_rho: int, hold: dict[int, int]):
        self.v = state.v
        self.parent = state.frag_parent
        self.children = list(state.frag.in_fragment_children)
        # strict in-fragment ancestors, fragment root first
        self.keys = [a for a in reversed(state.own_chain()[1:])]
        self.hold = hold
        self.sums = {a: hold.get(a, 0) for a in self.keys}
        self.own = own_rho + hold.get(self.v, 0)
        self.progress = {c: 0 for c in self.children}
        self.subs = 0
        self.subs_seen = 0
        self.next = 0

    def step(self, rnd, inbox, send):
        for u, msg in inbox.items():
            if msg.tag == Tag.RHO_KEY:
                key, value = msg.fields
                if key == self.v:
                    self.own += value
                else:
                    self.sums[key] += value
                self.progress[u] += 1
            else:
                self.subs += msg.fields[0]
                self.subs_seen += 1
        if self.next < len(self.keys):
            if all(p > self.next for p in self.progress.values()):
                key = self.keys[self.next]
                send(self.parent, Tag.RHO_KEY, key, self.sums[key])
                self.next += 1
            return
        if self.subs_seen == len(self.children):
            total = self.own + self.subs
            if self.parent is not None:
                send(self.parent, Tag.RHO_SUB, total)
            self.done = True
            self.output = total


def compute_rho_down(net: Network, states: Sequence[NodeState], bfs: BfsTree) -> list[int]:
    """Split edge weights by LCA type and accumulate rho_down."""
    keys = sorted(states[0].merging_nodes)
    contrib = []
    holds = []
    for s in states:
        c: dict[int, int] = {}
        hold: dict[int, int] = {}
        for u, (z, case, where) in s.lca.items():
            w = s.weights[u]
            if where == NEITHER:
                if s.v < u:
                    c[z] = c.get(z, 0) + w
            elif where == SELF and (case == CASE_INSIDE_ENDPOINT or s.v < u):
                hold[z] = hold.get(z, 0) + w
        contrib.append(c)
        holds.append(hold)

    totals = convergecast_sum(net, bfs.parent, bfs.children, keys, contrib, phase="rho-merging-sum")
    root_tokens = [[] for _ in states]
    root_tokens[bfs.source] = [(m, t) for m, t in sorted(totals[bfs.source].items())] if keys else []
    received = broadcast_all(net, bfs, root_tokens, known_count=len(keys), phase="rho-merging-broadcast")
    for s, toks in zip(states, received):
        s.rho_merging = dict(toks)

    subs = net.run_phase("rho-fragment", [
        _RhoPipeline(s, s.rho_merging.get(s.v, 0), h) for s, h in zip(states, holds)])
    tokens = []
    for s, x in zip(states, subs):
        s.rho_sub = x
        tokens.append([(s.fid, x)] if s.frag.is_fragment_root else [])
    received = broadcast_all(net, bfs, tokens, phase="rho-broadcast")
    for s, toks in zip(states, received):
        s.rho_frag = dict(toks)
        s.rho_down = s.rho_sub + sum(s.rho_frag[f] for f in s.frags_below if f != s.fid)
    return [s.rho_down for s in states]


# ---------------------------------------------------------------------------
# Top level


@dataclass(frozen=True)
class CutRow:
    v: int
    delta_down: int
    rho_down: int
    cut_down: int


@dataclass
class CutReport:
    per_node: list[CutRow]
    c_star: int
    v_star: int
    cut_edge: tuple[int, int]
    metrics: Metrics
    n: int
    diameter: int

    @property
    def round_constant(self) -> float:
        """Measured rounds divided by sqrt(n) + D."""
        return self.metrics.rounds / (math.sqrt(self.n) + self.diameter)

    def to_dict(self) -> dict:
        return {
            "c_star": self.c_star,
            "v_star": self.v_star,
            "cut_edge": list(self.cut_edge),
            "per_node": [{"v": r.v, "delta_down": r.delta_down, "rho_down": r.rho_down,
                          "cut_down": r.cut_down} for r in self.per_node],
            "metrics": {**self.metrics.to_dict(), "round_constant": self.round_constant},
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


@dataclass
class Trace:
    """Intermediate structures of one run, for inspection and tests."""
    network: Network
    states: list[NodeState]
    bfs: BfsTree
    forest: FragmentForest
    fragment_trees: list[FragmentTree]
    ancestors: AncestorInfo
    merge_tree: MergingStructure
    edge_lca: list[EdgeLca]


def run_one_respecting(G: Graph, T: RootedTree, k: Optional[int] = None,
                       round_cap: Optional[int] = None, record: bool = False,
                       node_order: Optional[Sequence[int]] = None,
                       trace: bool = False,
                       tamper: Optional[Callable[[list[NodeState]], None]] = None):
    """Run every step on a fresh network and return a :class:`CutReport`.

    With ``trace=True`` returns ``(report, Trace)`` instead. ``tamper`` is a
    fault-injection hook called on the node states right after rho_down is
    known, so tests can check that verification notices corrupted values.
    """
    if G.n < 2:
        raise ValueError("need at least two nodes")
    T.check_spans(G)
    net = Network(G, round_cap=round_cap, record=record, node_order=node_order)
    states = [NodeState(v, {u: w for u, w, _ in G.adjacency[v]}, T.parent[v], T.children[v])
              for v in range(G.n)]

    bfs = build_bfs(net, T.root)
    for s in states:
        s.bfs_parent, s.bfs_children = bfs.parent[s.v], bfs.children[s.v]
    for s, (n_seen, ecc) in zip(states, census(net, bfs)):
        s.n, s.ecc = n_seen, ecc
        s.k = size_parameter(n_seen) if k is None else k

    # fragments and the fragment tree
    parts = partition(net, T.parent, T.children, [s.k for s in states])
    for s, loc in zip(states, elect_fragment_ids(net, T.parent, T.children, parts)):
        s.frag = loc
    views = build_fragment_tree(net, bfs, T.parent, [s.frag for s in states])
    for s, view in zip(states, views):
        s.ftree = view
    forest = forest_from_labels(T, states[0].k, [s.fid for s in states])
    if views[0].parent.keys() != forest.root.keys() or len(views[0].inter_edges) != forest.count - 1:
        raise RuntimeError("fragment tree broadcast is inconsistent with the partition")

    # per-node cut values
    info = compute_ancestor_info(net, states)
    compute_delta_down(net, states, bfs)
    merge_tree = compute_merging_structure(net, states, bfs)
    lcas = compute_edge_lca(net, states, merge_tree)
    compute_rho_down(net, states, bfs)
    if tamper is not None:
        tamper(states)

    total = G.total_weight()
    if sum(states[0].rho_frag.values()) != total:
        raise RuntimeError("rho contributions do not add up to the total edge weight")

    values = []
    for s in states:
        s.cut_down = s.delta_down - 2 * s.rho_down
        if s.cut_down < 0:
            raise RuntimeError(f"node {s.v}: negative cut value {s.cut_down}")
        values.append(None if s.tparent is None else (s.cut_down, s.v, s.tparent))
    best = convergecast_min(net, bfs.parent, bfs.children, values, phase="min-cut")
    for s, b in zip(states, best):
        s.best = b
    c_star, v_star, p_star = best[T.root]

    report = CutReport(
        per_node=[CutRow(s.v, s.delta_down, s.rho_down, s.cut_down) for s in states],
        c_star=c_star,
        v_star=v_star,
        cut_edge=(p_star, v_star),
        metrics=net.metrics,
        n=G.n,
        diameter=hop_diameter(G),
    )
    if trace:
        mstruct = MergingStructure(states[0].merging_nodes, merge_tree.parent, merge_tree.root)
        return report, Trace(net, states, bfs, forest, views, info, mstruct, lcas)
    return report
