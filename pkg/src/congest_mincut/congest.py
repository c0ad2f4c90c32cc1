"""Synchronous CONGEST round simulator.

Every node runs a :class:`Handler`. In round ``t`` a handler sees the messages
its neighbors sent in round ``t - 1`` and may send at most one message on each
incident edge. A message is a tag plus at most four integers, the structural
stand-in for an O(log n)-bit payload.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, NamedTuple, Optional, Sequence

from .graph import Graph, bfs_diameter_bound

MAX_FIELDS = 4
WORD = 2**63


class Tag(IntEnum):
    PING = 0
    TOKEN = 1
    BFS = 2
    AGG_UP = 3
    AGG_DOWN = 4
    BC_UP = 5
    BC_END = 6
    BC_COUNT = 7
    BC_DOWN = 8
    KEY_SUM = 9
    RESID = 10
    FRAG = 11
    FRAG_ID = 12
    CHILD_FRAG = 13
    CHILD_FRAG_END = 14
    ANC = 15
    ANC_END = 16
    LOW = 17
    LOW_END = 18
    HAS_FRAG = 19
    LCA_FID = 20
    LCA_ANC = 21
    LCA_INFO = 22
    RHO_KEY = 23
    RHO_SUB = 24


class Message(NamedTuple):
    tag: Tag
    fields: tuple[int, ...]


class CongestError(RuntimeError):
    pass


class BandwidthError(CongestError):
    pass


class RoundCapExceeded(CongestError):
    pass


class Handler:
    """Per-node behavior. Subclasses override :meth:`step` and set ``done``.

    ``send(neighbor, tag, *fields)`` queues a message for the next round. A
    handler that is ``done`` is only stepped again if a message arrives.
    """

    done: bool = False
    output = None

    def step(self, rnd: int, inbox: dict[int, Message], send: Callable[..., None]) -> None:
        raise NotImplementedError


@dataclass
class PhaseStats:
    name: str
    rounds: int
    messages: int

    def to_dict(self) -> dict:
        return {"name": self.name, "rounds": self.rounds, "messages": self.messages}


@dataclass
class Metrics:
    rounds: int = 0
    messages_sent: int = 0
    max_fields_per_message: int = 0
    max_messages_per_edge_round: int = 0
    phases: list[PhaseStats] = field(default_factory=list)

    def phase_rounds(self, name: str) -> int:
        return sum(p.rounds for p in self.phases if p.name == name)

    def merged(self, other: "Metrics") -> "Metrics":
        return Metrics(
            rounds=self.rounds + other.rounds,
            messages_sent=self.messages_sent + other.messages_sent,
            max_fields_per_message=max(self.max_fields_per_message, other.max_fields_per_message),
            max_messages_per_edge_round=max(self.max_messages_per_edge_round,
                                            other.max_messages_per_edge_round),
            phases=self.phases + other.phases,
        )

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "messages_sent": self.messages_sent,
            "max_fields_per_message": self.max_fields_per_message,
            "phases": [p.to_dict() for p in self.phases],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class LogEntry:
    round: int
    phase: str
    src: int
    dst: int
    tag: Tag
    nfields: int


def default_round_cap(G: Graph) -> int:
    env = os.environ.get("CONGEST_ROUND_CAP")
    if env:
        return int(env)
    # ecc(0) <= D <= 2 ecc(0)
    return 10 * (G.n + 2 * bfs_diameter_bound(G) + 100)


class Network:
    """A graph plus the round clock, metrics and optional message log.

    Phases run one after another; each ends once every handler is done and no
    message is in flight. ``round_cap`` bounds the total over all phases.
    """

    def __init__(self, G: Graph, round_cap: Optional[int] = None, record: bool = False,
                 node_order: Optional[Sequence[int]] = None):
        self.G = G
        self.round_cap = default_round_cap(G) if round_cap is None else round_cap
        if self.round_cap < 1:
            raise ValueError("round_cap must be at least 1")
        self.metrics = Metrics()
        self.log: Optional[list[LogEntry]] = [] if record else None
        self._nbrs = [frozenset(G.neighbors(v)) for v in range(G.n)]
        self._order = list(range(G.n)) if node_order is None else list(node_order)
        if sorted(self._order) != list(range(G.n)):
            raise ValueError("node_order must be a permutation of the nodes")

    def run_phase(self, name: str, handlers: Sequence[Handler],
                  halt: Optional[Callable[[int], bool]] = None) -> list:
        """Run ``handlers`` (indexed by node) to quiescence; returns their outputs."""
        n = self.G.n
        if len(handlers) != n:
            raise ValueError(f"expected {n} handlers, got {len(handlers)}")
        metrics = self.metrics
        log = self.log
        start_round = metrics.rounds
        start_msgs = metrics.messages_sent
        inflight: dict[int, dict[int, Message]] = {}
        clock = {"out": {}, "round": 0}

        def make_sender(v: int) -> Callable[..., None]:
            nbrs = self._nbrs[v]

            def send(u: int, tag: Tag, *fields: int) -> None:
                if u not in nbrs:
                    raise CongestError(f"node {v} tried to send to non-neighbor {u}")
                if len(fields) > MAX_FIELDS:
                    raise BandwidthError(
                        f"node {v} sent {len(fields)} fields to {u}; limit is {MAX_FIELDS}")
                for f in fields:
                    if not isinstance(f, int) or not -WORD <= f < WORD:
                        raise BandwidthError(f"node {v} sent a field that is not a word-size int: {f!r}")
                box = clock["out"].setdefault(u, {})
                if v in box:
                    raise BandwidthError(f"node {v} sent twice on edge ({v}, {u}) in one round")
                box[v] = Message(Tag(tag), fields)
                metrics.messages_sent += 1
                if len(fields) > metrics.max_fields_per_message:
                    metrics.max_fields_per_message = len(fields)
                if log is not None:
                    log.append(LogEntry(clock["round"], name, v, u, Tag(tag), len(fields)))

            return send

        senders = [make_sender(v) for v in range(n)]
        remaining = sum(not h.done for h in handlers)
        rnd = 0

        while inflight or remaining:
            if halt is not None and halt(rnd):
                break
            if metrics.rounds >= self.round_cap:
                breakdown = ", ".join(f"{p.name}={p.rounds}" for p in metrics.phases)
                raise RoundCapExceeded(
                    f"round cap {self.round_cap} exceeded in phase {name!r} "
                    f"(after {rnd} rounds; earlier phases: {breakdown or 'none'})")
            outgoing: dict[int, dict[int, Message]] = {}
            clock["out"] = outgoing
            clock["round"] = metrics.rounds

            for v in self._order:
                h = handlers[v]
                inbox = inflight.get(v)
                if inbox is None:
                    if h.done:
                        continue
                    inbox = {}
                elif len(inbox) > 1:
                    inbox = dict(sorted(inbox.items()))
                was_done = h.done
                h.step(rnd, inbox, senders[v])
                if h.done != was_done:
                    remaining += -1 if h.done else 1

            if outgoing:
                metrics.max_messages_per_edge_round = max(metrics.max_messages_per_edge_round, 1)
            inflight = outgoing
            rnd += 1
            metrics.rounds += 1

        metrics.phases.append(PhaseStats(name, metrics.rounds - start_round,
                                         metrics.messages_sent - start_msgs))
        return [h.output for h in handlers]


def run(G: Graph, handlers: Sequence[Handler], halt: Optional[Callable[[int], bool]] = None,
        round_cap: Optional[int] = None, record: bool = False) -> tuple[list, Metrics]:
    """Run a single phase on a fresh network."""
    net = Network(G, round_cap=round_cap, record=record)
    outputs = net.run_phase("run", handlers, halt=halt)
    return outputs, net.metrics


def congestion_violations(log: Sequence[LogEntry]) -> int:
    """Count (round, directed edge) slots carrying more than one message, plus oversized messages."""
    seen: set[tuple[int, int, int]] = set()
    bad = 0
    for e in log:
        key = (e.round, e.src, e.dst)
        if key in seen:
            bad += 1
        seen.add(key)
        if e.nfields > MAX_FIELDS:
            bad += 1
    return bad
