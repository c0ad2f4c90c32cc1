"""Distributed building blocks run on top of :mod:`congest`.

BFS tree construction, convergecast/downcast over a tree, pipelined
broadcast of many tokens to the whole network, and keyed pipelined sums.
Each function builds one handler per node from that node's own inputs only,
runs a phase, and hands back the per-node outputs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .congest import Handler, Network, Tag

Token = tuple[int, ...]


@dataclass(frozen=True)
class BfsTree:
    source: int
    parent: tuple[Optional[int], ...]
    depth: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]

    @property
    def height(self) -> int:
        return max(self.depth)


class _Bfs(Handler):
    def __init__(self, v: int, nbrs: Sequence[int], is_source: bool):
        self.v = v
        self.nbrs = sorted(nbrs)
        self.depth = 0 if is_source else None
        self.parent = None
        self.children: list[int] = []
        self.heard = 0
        self.announced = False

    def step(self, rnd, inbox, send):
        for u, msg in inbox.items():
            self.heard += 1
            if msg.fields[1]:
                self.children.append(u)
        if self.depth is None and inbox:
            # every sender reached in round rnd - 1, so this node sits one level below
            self.depth = rnd
            self.parent = min(inbox)
        if self.depth is not None and not self.announced:
            for u in self.nbrs:
                send(u, Tag.BFS, self.depth, int(u == self.parent))
            self.announced = True
        if self.announced and self.heard == len(self.nbrs):
            self.done = True
            self.output = (self.parent, self.depth, tuple(sorted(self.children)))


def build_bfs(net: Network, source: int = 0, phase: str = "bfs") -> BfsTree:
    """BFS tree rooted at ``source``; parent is the smallest-ID neighbor one level up."""
    G = net.G
    if G.n == 1:
        return BfsTree(source, (None,), (0,), ((),))
    out = net.run_phase(phase, [_Bfs(v, G.neighbors(v), v == source) for v in range(G.n)])
    parent, depth, children = zip(*out)
    return BfsTree(source, tuple(parent), tuple(depth), tuple(children))


class _Aggregate(Handler):
    """Convergecast with ``combine``; the root's result is optionally sent back down."""

    def __init__(self, parent, children, value, combine, downcast):
        self.parent = parent
        self.children = list(children)
        self.acc = tuple(value)
        self.combine = combine
        self.downcast = downcast
        self.pending = len(self.children)
        self.sent_up = False
        if self.pending == 0 and parent is None and not downcast:
            self.done = True
            self.output = (self.acc, None)

    def step(self, rnd, inbox, send):
        for u, msg in inbox.items():
            if msg.tag == Tag.AGG_UP:
                self.acc = self.combine(self.acc, msg.fields)
                self.pending -= 1
            else:
                self._finish(msg.fields, send)
                return
        if self.pending == 0 and not self.sent_up:
            self.sent_up = True
            if self.parent is not None:
                send(self.parent, Tag.AGG_UP, *self.acc)
                if not self.downcast:
                    self.done = True
                    self.output = (self.acc, None)
            elif self.downcast:
                self._finish(self.acc, send)
            else:
                self.done = True
                self.output = (self.acc, None)

    def _finish(self, total, send):
        for c in self.children:
            send(c, Tag.AGG_DOWN, *total)
        self.done = True
        self.output = (self.acc, tuple(total))


def aggregate(net: Network, parent: Sequence[Optional[int]], children: Sequence[Sequence[int]],
              values: Sequence[Token], combine: Callable[[Token, Token], Token],
              downcast: bool = True, phase: str = "aggregate") -> list[tuple[Token, Optional[Token]]]:
    """Per node: (aggregate of its subtree, root aggregate if ``downcast`` else None).

    ``parent``/``children`` may describe a forest; each tree is handled independently.
    """
    handlers = [_Aggregate(parent[v], children[v], values[v], combine, downcast)
                for v in range(net.G.n)]
    return net.run_phase(phase, handlers)


def _add(a: Token, b: Token) -> Token:
    return tuple(x + y for x, y in zip(a, b))


def subtree_sum(net: Network, parent, children, values: Sequence[int],
                phase: str = "subtree-sum") -> list[int]:
    """Each node learns the sum of ``values`` over its subtree (one word per edge)."""
    out = aggregate(net, parent, children, [(x,) for x in values], _add,
                    downcast=False, phase=phase)
    return [acc[0] for acc, _ in out]


def census(net: Network, bfs: BfsTree, phase: str = "census") -> list[tuple[int, int]]:
    """Every node learns (n, ecc(source)) by convergecast and downcast on the BFS tree."""
    def combine(a, b):
        return (a[0] + b[0], max(a[1], b[1]))

    out = aggregate(net, bfs.parent, bfs.children,
                    [(1, bfs.depth[v]) for v in range(net.G.n)], combine, phase=phase)
    return [tuple(total) for _, total in out]


def convergecast_min(net: Network, parent, children,
                     values: Sequence[Optional[tuple[int, int, int]]],
                     phase: str = "min") -> list[Optional[tuple[int, int, int]]]:
    """Minimum ``(value, witness, aux)`` over all nodes, known to every node afterwards.

    ``None`` entries do not participate. Ties fall to the smaller witness.
    """
    def combine(a, b):
        if not a[0]:
            return tuple(b)
        if not b[0]:
            return tuple(a)
        return tuple(a) if (a[1], a[2]) <= (b[1], b[2]) else tuple(b)

    encoded = [(0, 0, 0, 0) if x is None else (1,) + tuple(x) for x in values]
    out = aggregate(net, parent, children, encoded, combine, phase=phase)
    return [total[1:] if total[0] else None for _, total in out]


class _BroadcastAll(Handler):
    """Pipelined upcast of tokens to the BFS root, then pipelined downcast in sorted order.

    Without ``known_count`` the token count is discovered by end markers on
    the way up and announced by the root before the tokens go down.
    """

    def __init__(self, parent, children, tokens, known_count):
        self.parent = parent
        self.children = list(children)
        self.known = known_count
        self.up = deque(tokens) if parent is not None else deque()
        self.collected: list[Token] = list(tokens) if parent is None else []
        self.children_ended = 0
        self.end_sent = False
        self.count = known_count
        self.down: deque[Token] = deque()
        self.received: list[Token] = []
        self.count_pending = False
        self.started_down = False
        if known_count == 0:
            self.done = True
            self.output = []

    def step(self, rnd, inbox, send):
        for u, msg in inbox.items():
            tag = msg.tag
            if tag == Tag.BC_UP:
                if self.parent is None:
                    self.collected.append(msg.fields)
                else:
                    self.up.append(msg.fields)
            elif tag == Tag.BC_END:
                self.children_ended += 1
            elif tag == Tag.BC_COUNT:
                self.count = msg.fields[0]
                self.count_pending = True
            else:
                self.received.append(msg.fields)
                self.down.append(msg.fields)

        if self.parent is None:
            self._root_step(send)
        else:
            if self.up:
                send(self.parent, Tag.BC_UP, *self.up.popleft())
            elif (self.known is None and not self.end_sent
                  and self.children_ended == len(self.children)):
                send(self.parent, Tag.BC_END)
                self.end_sent = True
            self._relay_down(send)

        if (self.count is not None and len(self.received) == self.count
                and not self.down and not self.count_pending and not self.up):
            self.done = True
            self.output = self.received

    def _root_step(self, send):
        if not self.started_down:
            ready = (len(self.collected) == self.known if self.known is not None
                     else self.children_ended == len(self.children))
            if not ready:
                return
            self.started_down = True
            self.received = sorted(self.collected)
            self.count = len(self.received)
            self.down.extend(self.received)
            if self.known is None:
                self.count_pending = True
        self._relay_down(send)

    def _relay_down(self, send):
        if self.count_pending:
            for c in self.children:
                send(c, Tag.BC_COUNT, self.count)
            self.count_pending = False
        elif self.down:
            token = self.down.popleft()
            for c in self.children:
                send(c, Tag.BC_DOWN, *token)


def broadcast_all(net: Network, bfs: BfsTree, tokens: Sequence[Sequence[Token]],
                  known_count: Optional[int] = None, phase: str = "broadcast") -> list[list[Token]]:
    """Every node ends up with all tokens, in identical sorted order.

    ``tokens[v]`` are the tokens held initially by node ``v``; each must fit
    in one message. ``known_count``, when every node knows the total, skips
    the end-marker convergecast.
    """
    for held in tokens:
        for t in held:
            if len(t) > 4:
                raise ValueError(f"token {t} does not fit in one message")
    handlers = [_BroadcastAll(bfs.parent[v], bfs.children[v], [tuple(t) for t in tokens[v]],
                              known_count) for v in range(net.G.n)]
    return net.run_phase(phase, handlers)


class _KeyedSum(Handler):
    """Pipelined per-key convergecast: one key per edge per round, keys in ascending order."""

    def __init__(self, parent, children, keys, contrib):
        self.parent = parent
        self.children = list(children)
        self.keys = list(keys)
        self.totals = [contrib.get(k, 0) for k in self.keys]
        self.got = [0] * len(self.keys)
        self.next = 0
        self.index = {k: i for i, k in enumerate(self.keys)}
        if not self.keys or (not self.children and parent is None):
            self._finish()

    def _finish(self):
        self.done = True
        self.output = dict(zip(self.keys, self.totals)) if self.parent is None else None

    def step(self, rnd, inbox, send):
        for u, msg in inbox.items():
            key, value = msg.fields
            i = self.index[key]
            self.totals[i] += value
            self.got[i] += 1
        if self.next < len(self.keys) and self.got[self.next] == len(self.children):
            if self.parent is not None:
                send(self.parent, Tag.KEY_SUM, self.keys[self.next], self.totals[self.next])
            self.next += 1
            # the root consumes a key per round only to stay lockstep with its children
            while (self.parent is None and self.next < len(self.keys)
                   and self.got[self.next] == len(self.children)):
                self.next += 1
        if self.next == len(self.keys):
            self._finish()


def convergecast_sum(net: Network, parent, children, keys: Sequence[int],
                     contributions: Sequence[dict[int, int]],
                     phase: str = "keyed-sum") -> list[Optional[dict[int, int]]]:
    """Per-key totals of ``contributions`` at each tree root (``None`` elsewhere).

    Every participant must know ``keys``. Takes height + len(keys) rounds.
    """
    keys = sorted(keys)
    for c in contributions:
        stray = set(c) - set(keys)
        if stray:
            raise ValueError(f"contribution for unknown keys {sorted(stray)}")
    handlers = [_KeyedSum(parent[v], children[v], keys, contributions[v]) for v in range(net.G.n)]
    return net.run_phase(phase, handlers)
