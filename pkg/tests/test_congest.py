import json

import pytest

from congest_mincut.congest import (
    BandwidthError,
    CongestError,
    Handler,
    Network,
    RoundCapExceeded,
    Tag,
    congestion_violations,
    default_round_cap,
    run,
)
from congest_mincut.graph import Graph

from conftest import path_graph


class Exchange(Handler):
    def __init__(self, v, nbrs):
        self.v, self.nbrs, self.got = v, nbrs, []

    def step(self, rnd, inbox, send):
        if rnd == 0:
            for u in self.nbrs:
                send(u, Tag.PING, self.v)
        self.got += [m.fields[0] for m in inbox.values()]
        if len(self.got) == len(self.nbrs):
            self.done, self.output = True, sorted(self.got)


class Flood(Handler):
    def __init__(self, v, n):
        self.v, self.n = v, n
        self.have = v == 0

    def step(self, rnd, inbox, send):
        if inbox:
            self.have = True
        if self.have:
            if self.v + 1 < self.n:
                send(self.v + 1, Tag.TOKEN, 1)
            self.done, self.output = True, rnd


class Chatty(Handler):
    def __init__(self, fields=1, twice=False, target=1):
        self.fields, self.twice, self.target = fields, twice, target

    def step(self, rnd, inbox, send):
        if rnd > 0:
            return
        send(self.target, Tag.PING, *range(self.fields))
        if self.twice:
            send(self.target, Tag.PING, 0)
        self.done = True


class Forever(Handler):
    def step(self, rnd, inbox, send):
        pass


def test_two_node_exchange(two_node):
    outputs, m = run(two_node, [Exchange(0, [1]), Exchange(1, [0])])
    assert outputs == [[1], [0]]
    assert (m.rounds, m.messages_sent) == (2, 2)


def test_flood_path():
    G = path_graph(5)
    outputs, m = run(G, [Flood(v, 5) for v in range(5)])
    assert (m.rounds, m.messages_sent) == (5, 4)
    assert outputs == [0, 1, 2, 3, 4]


def test_five_fields_rejected(two_node):
    with pytest.raises(BandwidthError):
        run(two_node, [Chatty(fields=5), Chatty(fields=0, target=0)])


def test_four_fields_accepted(two_node):
    _, m = run(two_node, [Chatty(fields=4), Chatty(fields=0, target=0)])
    assert m.max_fields_per_message == 4


def test_second_message_on_edge_rejected(two_node):
    with pytest.raises(BandwidthError, match="twice"):
        run(two_node, [Chatty(twice=True), Chatty(target=0)])


def test_non_neighbor_rejected():
    with pytest.raises(CongestError, match="non-neighbor"):
        run(path_graph(3), [Chatty(target=2), Forever(), Forever()])


def test_oversized_integer_rejected(two_node):
    class Huge(Handler):
        def step(self, rnd, inbox, send):
            send(1, Tag.PING, 2**64)

    with pytest.raises(BandwidthError):
        run(two_node, [Huge(), Forever()])


def test_round_cap_reports_phases(two_node):
    net = Network(two_node, round_cap=5)
    net.run_phase("warmup", [Exchange(0, [1]), Exchange(1, [0])])
    with pytest.raises(RoundCapExceeded) as info:
        net.run_phase("stuck", [Forever(), Forever()])
    assert "stuck" in str(info.value) and "warmup=2" in str(info.value)


def test_round_cap_must_be_positive(two_node):
    with pytest.raises(ValueError):
        Network(two_node, round_cap=0)


def test_round_cap_env_override(monkeypatch, two_node):
    monkeypatch.setenv("CONGEST_ROUND_CAP", "7")
    assert default_round_cap(two_node) == 7
    monkeypatch.delenv("CONGEST_ROUND_CAP")
    assert default_round_cap(two_node) == 10 * (2 + 2 + 100)


def test_halt_predicate(two_node):
    outputs, m = run(two_node, [Forever(), Forever()], halt=lambda r: r == 3)
    assert m.rounds == 3


def test_log_and_metrics_json():
    G = path_graph(5)
    net = Network(G, record=True)
    net.run_phase("flood", [Flood(v, 5) for v in range(5)])
    assert [e.src for e in net.log] == [0, 1, 2, 3]
    assert congestion_violations(net.log) == 0
    doc = json.loads(net.metrics.to_json())
    assert doc["rounds"] == 5 and doc["phases"] == [{"name": "flood", "rounds": 5, "messages": 4}]


def test_node_order_does_not_matter(g1):
    def go(order):
        net = Network(g1, node_order=order, record=True)
        out = net.run_phase("x", [Exchange(v, g1.neighbors(v)) for v in range(4)])
        return out, net.metrics.to_dict(), sorted(net.log, key=lambda e: (e.round, e.src, e.dst))

    assert go([0, 1, 2, 3]) == go([3, 1, 0, 2])


def test_bad_node_order(g1):
    with pytest.raises(ValueError):
        Network(g1, node_order=[0, 1, 2])
