"""Weighted graphs, rooted spanning trees and the centralized queries on them."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional, Sequence

MAX_WEIGHT = 2**32
MAX_TOTAL_WEIGHT = 2**63 - 1


class GraphError(ValueError):
    """Raised for malformed graph or tree input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Graph:
    """Simple connected undirected graph with positive integer weights.

    Nodes are ``0..n-1``. Edges are stored as ``(u, v, w)`` with ``u < v``,
    sorted, so edge indices are stable for a given edge set. Parallel input
    edges are merged by summing weights.
    """

    __slots__ = ("n", "edges", "adjacency", "_weight")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, int]]):
        if n < 1:
            raise GraphError("graph needs at least one node")
        merged: dict[tuple[int, int], int] = {}
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not isinstance(w, int) or w < 1:
                raise GraphError(f"weight of edge ({u}, {v}) must be a positive integer")
            key = (u, v) if u < v else (v, u)
            merged[key] = merged.get(key, 0) + w
        for (u, v), w in merged.items():
            if w > MAX_WEIGHT:
                raise GraphError(f"weight of edge ({u}, {v}) exceeds 2^32")
        if sum(merged.values()) > MAX_TOTAL_WEIGHT:
            raise GraphError("total weight does not fit in 63 bits")

        self.n = n
        self.edges: tuple[tuple[int, int, int], ...] = tuple(
            (u, v, w) for (u, v), w in sorted(merged.items())
        )
        adjacency: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        for i, (u, v, w) in enumerate(self.edges):
            adjacency[u].append((v, w, i))
            adjacency[v].append((u, w, i))
        self.adjacency = tuple(tuple(sorted(a)) for a in adjacency)
        self._weight = {(u, v): w for u, v, w in self.edges}

        if not _connected(n, self.adjacency):
            raise GraphError("graph is disconnected")

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={len(self.edges)})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight(self, u: int, v: int) -> int:
        """Weight of edge ``{u, v}``, or 0 if absent."""
        return self._weight.get((u, v) if u < v else (v, u), 0)

    def neighbors(self, v: int) -> list[int]:
        return [u for u, _, _ in self.adjacency[v]]

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)

    def to_text(self) -> str:
        return "".join(f"{u} {v} {w}\n" for u, v, w in self.edges)


def _connected(n: int, adjacency: Sequence[Sequence[tuple[int, int, int]]]) -> bool:
    seen = [False] * n
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        v = stack.pop()
        for u, _, _ in adjacency[v]:
            if not seen[u]:
                seen[u] = True
                count += 1
                stack.append(u)
    return count == n


def load_graph(text: str) -> Graph:
    """Parse an edge list: one ``u v w`` per line, ``#`` starts a comment line.

    Node count is one more than the largest ID seen.
    """
    edges = []
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"expected 'u v w', got {line!r}", lineno)
        try:
            u, v, w = (int(p) for p in parts)
        except ValueError:
            raise GraphError(f"non-integer token in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphError("node IDs must be non-negative", lineno)
        if u == v:
            raise GraphError(f"self-loop at node {u}", lineno)
        if w < 1:
            raise GraphError(f"weight {w} is below 1", lineno)
        max_id = max(max_id, u, v)
        edges.append((u, v, w))
    if max_id < 0:
        raise GraphError("no edges")
    return Graph(max_id + 1, edges)


def cut_value(G: Graph, X: Iterable[int]) -> int:
    """Total weight of edges with exactly one endpoint in ``X``."""
    side = set(X)
    if any(not 0 <= v < G.n for v in side):
        raise ValueError("cut side contains a node outside the graph")
    if not side or len(side) == G.n:
        raise ValueError("cut side must be a non-empty proper subset of V")
    return sum(w for u, v, w in G.edges if (u in side) != (v in side))


def weighted_degree(G: Graph, v: int) -> int:
    if not 0 <= v < G.n:
        raise IndexError(f"node {v} out of range")
    return sum(w for _, w, _ in G.adjacency[v])


def bfs_levels(G: Graph, source: int) -> list[int]:
    """Unweighted hop distance from ``source`` to every node."""
    dist = [-1] * G.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u, _, _ in G.adjacency[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def bfs_diameter_bound(G: Graph, source: int = 0) -> int:
    """Eccentricity of ``source``; lies between D/2 and D."""
    return max(bfs_levels(G, source))


def hop_diameter(G: Graph) -> int:
    """Exact unweighted diameter (all-pairs BFS)."""
    if G.n <= 1:
        return 0
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    rows = [u for u, v, _ in G.edges] + [v for u, v, _ in G.edges]
    cols = [v for u, v, _ in G.edges] + [u for u, v, _ in G.edges]
    mat = csr_matrix(([1] * len(rows), (rows, cols)), shape=(G.n, G.n))
    return int(shortest_path(mat, unweighted=True, directed=False).max())


class RootedTree:
    """Spanning tree given by parent pointers, rooted at ``root``."""

    __slots__ = ("root", "parent", "children", "depth", "order")

    def __init__(self, parent: Sequence[Optional[int]]):
        n = len(parent)
        roots = [v for v in range(n) if parent[v] is None]
        if len(roots) != 1:
            raise GraphError(f"tree needs exactly one root, found {len(roots)}")
        self.root = roots[0]
        self.parent: tuple[Optional[int], ...] = tuple(parent)
        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(parent):
            if p is not None:
                if not 0 <= p < n:
                    raise GraphError(f"parent {p} of node {v} out of range")
                children[p].append(v)
        self.children = tuple(tuple(sorted(c)) for c in children)

        depth = [-1] * n
        depth[self.root] = 0
        order = [self.root]
        for v in order:
            for c in self.children[v]:
                depth[c] = depth[v] + 1
                order.append(c)
        if len(order) != n:
            missing = next(v for v in range(n) if depth[v] < 0)
            raise GraphError(f"node {missing} is not reachable from the root (cycle in parent pointers)")
        self.depth = tuple(depth)
        # BFS order: parents before children
        self.order = tuple(order)

    @property
    def n(self) -> int:
        return len(self.parent)

    def __repr__(self) -> str:
        return f"RootedTree(n={self.n}, root={self.root})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RootedTree) and self.parent == other.parent

    def __hash__(self) -> int:
        return hash(self.parent)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], root: int = 0) -> "RootedTree":
        """Orient an undirected edge set away from ``root``.

        Raises GraphError naming the first node the edges fail to reach.
        """
        if not 0 <= root < n:
            raise GraphError(f"root {root} out of range")
        adj: list[list[int]] = [[] for _ in range(n)]
        count = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"tree edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            adj[u].append(v)
            adj[v].append(u)
            count += 1
        parent: list[Optional[int]] = [None] * n
        seen = [False] * n
        seen[root] = True
        stack = [root]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    parent[u] = v
                    stack.append(u)
        for v in range(n):
            if not seen[v]:
                raise GraphError(f"tree does not span node {v}")
        if count != n - 1:
            raise GraphError(f"tree has {count} edges, expected {n - 1}")
        return cls(parent)

    def edges(self) -> list[tuple[int, int]]:
        """Tree edges as ``(parent, child)``."""
        return [(p, v) for v, p in enumerate(self.parent) if p is not None]

    def check_spans(self, G: Graph) -> None:
        if self.n != G.n:
            raise GraphError(f"tree has {self.n} nodes but graph has {G.n}")
        for p, v in self.edges():
            if G.weight(p, v) == 0:
                raise GraphError(f"tree edge ({p}, {v}) is not an edge of the graph")

    def height(self) -> int:
        return max(self.depth)

    def ancestors(self, v: int) -> list[int]:
        """``v`` and its ancestors, from ``v`` up to the root."""
        out = [v]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out


def descendants(T: RootedTree, v: int) -> set[int]:
    """Nodes in the subtree of ``v``, including ``v``."""
    out = {v}
    stack = [v]
    while stack:
        for c in T.children[stack.pop()]:
            out.add(c)
            stack.append(c)
    return out


def subtree_sums(T: RootedTree, values: Sequence[int]) -> list[int]:
    """Sum of ``values`` over each node's subtree."""
    acc = list(values)
    for v in reversed(T.order):
        p = T.parent[v]
        if p is not None:
            acc[p] += acc[v]
    return acc


def load_tree(text: str, n: int, root: int = 0) -> RootedTree:
    """Parse tree edges, one ``u v`` per line (an optional third token is ignored)."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphError(f"expected 'u v', got {line!r}", lineno)
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphError(f"non-integer token in {line!r}", lineno) from None
    return RootedTree.from_edges(n, edges, root)


def tree_to_text(T: RootedTree) -> str:
    lines = [f"# root {T.root}"] + [f"{p} {v}" for p, v in T.edges()]
    return "\n".join(lines) + "\n"


def bfs_tree(G: Graph, root: int = 0) -> RootedTree:
    """Breadth-first spanning tree; each node's parent is its smallest-ID neighbor one level up."""
    dist = bfs_levels(G, root)
    parent: list[Optional[int]] = [None] * G.n
    for v in range(G.n):
        if v != root:
            parent[v] = min(u for u, _, _ in G.adjacency[v] if dist[u] == dist[v] - 1)
    return RootedTree(parent)


def graph_to_dot(G: Graph, tree: Optional[RootedTree] = None,
                 colors: Optional[Sequence[int]] = None) -> str:
    """Graphviz rendering; tree edges are drawn bold, nodes optionally grouped by color label."""
    tree_edges = set()
    if tree is not None:
        tree_edges = {(min(p, v), max(p, v)) for p, v in tree.edges()}
    lines = ["graph G {"]
    if colors is not None:
        palette = sorted(set(colors))
        for v in range(G.n):
            lines.append(f'  {v} [colorscheme=set312, style=filled, '
                         f'fillcolor={palette.index(colors[v]) % 12 + 1}];')
    for u, v, w in G.edges:
        style = ", style=bold, penwidth=3" if (u, v) in tree_edges else ""
        lines.append(f'  {u} -- {v} [label="{w}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_dot(T: RootedTree) -> str:
    lines = ["digraph T {", f"  {T.root} [shape=doublecircle];"]
    for p, v in T.edges():
        lines.append(f"  {p} -> {v} [style=bold];")
    lines.append("}")
    return "\n".join(lines) + "\n"
