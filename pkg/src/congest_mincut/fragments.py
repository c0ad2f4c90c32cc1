"""Partition a rooted spanning tree into fragments and spread the fragment tree.

A fragment is a connected piece of T with at least ``k`` nodes (except
possibly the piece holding the root) and height below ``k``. Its ID is the
smallest node ID it contains and its root is the member closest to the root
of T. Contracting fragments gives the fragment tree, which every node
learns through one pipelined broadcast.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from math import isqrt
from typing import Optional, Sequence

from .congest import Handler, Metrics, Network, Tag
from .graph import Graph, RootedTree
from .protocols import BfsTree, broadcast_all, build_bfs, census


def size_parameter(n: int) -> int:
    """Ceiling of sqrt(n)."""
    r = isqrt(n)
    return r if r * r == n else r + 1


@dataclass(frozen=True)
class PartitionLocal:
    """What a node knows right after the bottom-up partition."""
    is_fragment_root: bool
    fid: Optional[int]
    in_fragment_children: tuple[int, ...]


@dataclass(frozen=True)
class FragmentLocal:
    """A node's view of its own fragment after ID election."""
    fid: int
    fragment_root: int
    fragment_depth: int
    is_fragment_root: bool
    in_fragment_children: tuple[int, ...]
    # fragment IDs of T-neighbors in other fragments
    neighbor_fid: dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class FragmentForest:
    k: int
    label: tuple[int, ...]
    root: dict[int, int]
    size: dict[int, int]
    diameter: dict[int, int]

    @property
    def count(self) -> int:
        return len(self.root)

    @property
    def ids(self) -> list[int]:
        return sorted(self.root)

    def members(self, fid: int) -> list[int]:
        return [v for v, f in enumerate(self.label) if f == fid]

    @property
    def max_size(self) -> int:
        return max(self.size.values())

    def to_json(self) -> str:
        return json.dumps({str(v): f for v, f in enumerate(self.label)})


@dataclass(frozen=True)
class FragmentTree:
    root: int
    parent: dict[int, Optional[int]]
    # (child endpoint, parent endpoint, child fid, parent fid)
    inter_edges: tuple[tuple[int, int, int, int], ...]

    @property
    def ids(self) -> list[int]:
        return sorted(self.parent)

    def children(self, fid: int) -> list[int]:
        return sorted(f for f, p in self.parent.items() if p == fid)

    def descendants(self, fid: int) -> set[int]:
        """``fid`` and every fragment below it in the fragment tree."""
        out = {fid}
        queue = [fid]
        kids: dict[int, list[int]] = {}
        for f, p in self.parent.items():
            if p is not None:
                kids.setdefault(p, []).append(f)
        while queue:
            for c in kids.get(queue.pop(), ()):
                out.add(c)
                queue.append(c)
        return out


class _Partition(Handler):
    def __init__(self, v: int, parent: Optional[int], children: Sequence[int], k: int):
        self.v = v
        self.parent = parent
        self.children = sorted(children)
        self.k = k
        self.resid: dict[int, tuple[int, int]] = {}

    def step(self, rnd, inbox, send):
        for u, msg in inbox.items():
            self.resid[u] = msg.fields
        if len(self.resid) < len(self.children):
            return
        acc = 1
        smallest = self.v
        group = []
        for c in self.children:
            size, low = self.resid[c]
            if size > 0:
                acc += size
                smallest = min(smallest, low)
                group.append(c)
        close = acc >= self.k or self.parent is None
        if self.parent is not None:
            if close:
                send(self.parent, Tag.RESID, 0, -1)
            else:
                send(self.parent, Tag.RESID, acc, smallest)
        self.output = PartitionLocal(close, smallest if close else None, tuple(group))
        self.done = True


def partition(net: Network, tparent: Sequence[Optional[int]], tchildren: Sequence[Sequence[int]],
              k: Sequence[int] | int, phase: str = "partition") -> list[PartitionLocal]:
    """Bottom-up grouping: a node closes a fragment once its residual subtree reaches ``k`` nodes.

    Residual subtrees passed upward have fewer than ``k`` nodes; whatever
    reaches the root of T forms the root fragment. Takes height(T) + 1 rounds.
    """
    n = net.G.n
    ks = [k] * n if isinstance(k, int) else list(k)
    if any(x < 1 for x in ks):
        raise ValueError("k must be at least 1")
    return net.run_phase(phase, [_Partition(v, tparent[v], tchildren[v], ks[v]) for v in range(n)])


class _Elect(Handler):
    """Downcast (fid, fragment root, depth) inside each fragment; swap fids across fragment borders."""

    def __init__(self, v, parent, children, part: PartitionLocal):
        self.v = v
        self.part = part
        self.inner = part.in_fragment_children
        self.outer = [c for c in children if c not in set(self.inner)]
        if part.is_fragment_root and parent is not None:
            self.outer.append(parent)
        self.neighbor_fid: dict[int, int] = {}
        self.info = (part.fid, v, 0) if part.is_fragment_root else None
        self.announced = False

    def step(self, rnd, inbox, send):
        for u, msg in inbox.items():
            if msg.tag == Tag.FRAG:
                fid, root, depth = msg.fields
                self.info = (fid, root, depth)
            else:
                self.neighbor_fid[u] = msg.fields[0]
        if self.info is not None and not self.announced:
            fid, root, depth = self.info
            for c in self.inner:
                send(c, Tag.FRAG, fid, root, depth + 1)
            for u in self.outer:
                send(u, Tag.FRAG_ID, fid)
            self.announced = True
        if self.announced and len(self.neighbor_fid) == len(self.outer):
            fid, root, depth = self.info
            self.output = FragmentLocal(fid, root, depth, self.part.is_fragment_root,
                                        self.inner, dict(self.neighbor_fid))
            self.done = True


def elect_fragment_ids(net: Network, tparent, tchildren, parts: Sequence[PartitionLocal],
                       phase: str = "elect") -> list[FragmentLocal]:
    """Every node learns its fragment's ID and root, and the fragment IDs of T-neighbors across a border.

    The minimum ID was already folded into the partition upcast, so one
    downcast per fragment suffices.
    """
    handlers = [_Elect(v, tparent[v], tchildren[v], parts[v]) for v in range(net.G.n)]
    return net.run_phase(phase, handlers)


def inter_fragment_tokens(v: int, tparent: Optional[int], local: FragmentLocal) -> list[tuple[int, int, int, int]]:
    """Tokens node ``v`` emits for inter-fragment tree edges where it is the smaller endpoint."""
    tokens = []
    for u, ufid in sorted(local.neighbor_fid.items()):
        if v < u:
            if u == tparent:
                tokens.append((v, u, local.fid, ufid))
            else:
                tokens.append((u, v, ufid, local.fid))
    return tokens


def fragment_tree_from_tokens(own_fid: int, tokens: Sequence[tuple[int, ...]]) -> FragmentTree:
    parent: dict[int, Optional[int]] = {}
    for child_node, parent_node, cf, pf in tokens:
        if cf in parent and parent[cf] is not None:
            raise ValueError(f"fragment {cf} has two parents")
        parent[cf] = pf
        parent.setdefault(pf, None)
    parent.setdefault(own_fid, None)
    roots = [f for f, p in parent.items() if p is None]
    if len(roots) != 1:
        raise ValueError(f"inter-fragment edges do not form a tree ({len(roots)} roots)")
    if len(tokens) != len(parent) - 1:
        raise ValueError(f"{len(tokens)} inter-fragment edges for {len(parent)} fragments")
    return FragmentTree(roots[0], dict(sorted(parent.items())),
                        tuple(tuple(t) for t in sorted(tokens)))


def build_fragment_tree(net: Network, bfs: BfsTree, tparent, locals_: Sequence[FragmentLocal],
                        phase: str = "fragment-tree") -> list[FragmentTree]:
    """Broadcast every inter-fragment tree edge; each node rebuilds the fragment tree from the tokens."""
    n = net.G.n
    tokens = [inter_fragment_tokens(v, tparent[v], locals_[v]) for v in range(n)]
    received = broadcast_all(net, bfs, tokens, phase=phase)
    return [fragment_tree_from_tokens(locals_[v].fid, received[v]) for v in range(n)]


def _tree_diameter(members: Sequence[int], T: RootedTree, label: Sequence[int], fid: int) -> int:
    if len(members) == 1:
        return 0
    adj: dict[int, list[int]] = {v: [] for v in members}
    for v in members:
        p = T.parent[v]
        if p is not None and label[p] == fid:
            adj[v].append(p)
            adj[p].append(v)

    def far(src):
        dist = {src: 0}
        queue = deque([src])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        if len(dist) != len(members):
            raise ValueError(f"fragment {fid} is not connected in T")
        end = max(dist, key=lambda x: (dist[x], -x))
        return end, dist[end]

    a, _ = far(members[0])
    _, d = far(a)
    return d


def forest_from_labels(T: RootedTree, k: int, label: Sequence[int]) -> FragmentForest:
    """Centralized summary of a labeling: roots, sizes and measured hop diameters."""
    groups: dict[int, list[int]] = {}
    for v, f in enumerate(label):
        groups.setdefault(f, []).append(v)
    root = {}
    for f, members in groups.items():
        tops = [v for v in members if T.parent[v] is None or label[T.parent[v]] != f]
        if len(tops) != 1:
            raise ValueError(f"fragment {f} has {len(tops)} topmost nodes")
        if min(members) != f:
            raise ValueError(f"fragment {f} is not labeled by its smallest member")
        root[f] = tops[0]
    return FragmentForest(
        k=k,
        label=tuple(label),
        root=dict(sorted(root.items())),
        size={f: len(m) for f, m in sorted(groups.items())},
        diameter={f: _tree_diameter(m, T, label, f) for f, m in sorted(groups.items())},
    )


def partition_reference(T: RootedTree, k: int) -> FragmentForest:
    """Centralized twin of :func:`partition` + :func:`elect_fragment_ids`."""
    if k < 1:
        raise ValueError("k must be at least 1")
    n = T.n
    resid = [0] * n
    smallest = list(range(n))
    closed = [False] * n
    for v in reversed(T.order):
        acc = 1
        for c in T.children[v]:
            if resid[c] > 0:
                acc += resid[c]
                smallest[v] = min(smallest[v], smallest[c])
        if acc >= k or T.parent[v] is None:
            closed[v] = True
        else:
            resid[v] = acc
    label = [0] * n
    for v in T.order:
        label[v] = smallest[v] if closed[v] else label[T.parent[v]]
    return forest_from_labels(T, k, label)


def contract(T: RootedTree, label: Sequence[int]) -> FragmentTree:
    """Fragment tree obtained by contracting each fragment of T (centralized)."""
    parent: dict[int, Optional[int]] = {f: None for f in set(label)}
    edges = []
    for p, v in T.edges():
        if label[p] != label[v]:
            parent[label[v]] = label[p]
            edges.append((v, p, label[v], label[p]))
    return FragmentTree(label[T.root], dict(sorted(parent.items())), tuple(sorted(edges)))


@dataclass
class Decomposition:
    bfs: BfsTree
    n_known: list[int]
    parts: list[PartitionLocal]
    locals: list[FragmentLocal]
    views: list[FragmentTree]
    forest: FragmentForest
    metrics: Metrics


def decompose(G: Graph, T: RootedTree, k: Optional[int] = None, net: Optional[Network] = None) -> Decomposition:
    """Run BFS, census, partition, election and the fragment tree broadcast on ``G``.

    ``k`` defaults to the ceiling of sqrt(n), computed by each node from the census.
    """
    T.check_spans(G)
    if net is None:
        net = Network(G)
    bfs = build_bfs(net, T.root)
    counts = census(net, bfs)
    n_known = [c[0] for c in counts]
    ks = [size_parameter(x) if k is None else k for x in n_known]
    parts = partition(net, T.parent, T.children, ks)
    locals_ = elect_fragment_ids(net, T.parent, T.children, parts)
    views = build_fragment_tree(net, bfs, T.parent, locals_)
    forest = forest_from_labels(T, ks[0], [loc.fid for loc in locals_])
    return Decomposition(bfs, n_known, parts, locals_, views, forest, net.metrics)
