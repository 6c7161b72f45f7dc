"""Round executor: budgets, pair rule, Lenzen loads and round accounting."""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import path_graph
from errors import BudgetViolation, LoadViolation, NonTermination, ProtocolError
from graph_model import Graph
from sim_engine import CliqueNetwork, Inbox, Protocol, VertexProcess, payload_bits, run_protocol, simulate_locally

FUZZ_SETTINGS = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
LONG_FUZZ_SETTINGS = settings(FUZZ_SETTINGS, max_examples=100_000)

send_plans = st.lists(
    st.tuples(st.integers(min_value=0, max_value=7), st.integers(min_value=1, max_value=20)),
    max_size=12,
)


class FloodMin(Protocol):
    """Every vertex learns the smallest ID within distance ``rounds``."""

    name = "flood-min"

    def __init__(self, rounds: int) -> None:
        self.rounds = rounds

    def init(self, vertex: VertexProcess) -> None:
        vertex.state["best"] = vertex.id

    def step(self, vertex: VertexProcess, inbox: Inbox) -> None:
        for _, payload in inbox:
            vertex.state["best"] = min(vertex.state["best"], payload[0])
        if vertex.round > self.rounds:
            vertex.halt(vertex.state["best"])
            return
        for u in sorted(vertex.neighbors):
            vertex.send(u, (vertex.state["best"],))


class SendOnce(Protocol):
    """Step 1: vertex 0 executes ``plan`` (a list of (dst, payload)); everybody halts at step 2."""

    def __init__(self, plan, lenzen: bool = False, broadcast=None) -> None:
        self.plan = plan
        self.lenzen = lenzen
        self.broadcast = broadcast

    def step(self, vertex: VertexProcess, inbox: Inbox) -> None:
        if vertex.round == 1:
            if vertex.id == 0:
                for dst, payload in self.plan:
                    if self.lenzen:
                        vertex.lenzen_send(dst, payload)
                    else:
                        vertex.send(dst, payload)
                if self.broadcast is not None:
                    vertex.broadcast(self.broadcast)
            return
        vertex.halt([m.payload for m in inbox.messages])


class NeverHalts(Protocol):
    def step(self, vertex: VertexProcess, inbox: Inbox) -> None:
        pass


def empty(n: int) -> Graph:
    return Graph(n, frozenset())


def check_send_plan(plan) -> None:
    """Vertex 0 of an 8-clique sends ``plan``; a violation must raise, anything else must arrive."""

    net = CliqueNetwork(8)
    payloads = [(dst, "1" * bits) for dst, bits in plan]
    over = any(bits > net.budget_bits for _, bits in plan)
    dup = len({dst for dst, _ in plan}) < len(plan)
    if over or dup:
        with pytest.raises(BudgetViolation):
            net.run(empty(8), SendOnce(payloads))
    else:
        outputs = net.run(empty(8), SendOnce(payloads))
        assert sum(len(out) for out in outputs.values()) == len(plan)


class TestPayloads:
    def test_bit_string_counts_characters(self):
        assert payload_bits("0101") == 4

    def test_tuple_counts_field_widths(self):
        assert payload_bits((0,)) == 1
        assert payload_bits((5, 3)) == 5

    @pytest.mark.parametrize("bad", ["012", (-1,)])
    def test_malformed_payloads_rejected(self, bad):
        with pytest.raises(ProtocolError):
            payload_bits(bad)


class TestBudget:
    def test_budget_is_c_msg_times_log_n(self):
        assert CliqueNetwork(16).budget_bits == 16
        assert CliqueNetwork(17).budget_bits == 20
        assert CliqueNetwork(1).budget_bits == 4

    def test_payload_at_budget_is_delivered(self):
        outputs, stats = run_protocol(empty(16), SendOnce([(1, "1" * 16)]))
        assert outputs[1] == ["1" * 16]
        assert stats.max_message_bits == 16

    def test_payload_one_bit_over_budget_raises(self):
        with pytest.raises(BudgetViolation):
            run_protocol(empty(16), SendOnce([(1, "1" * 17)]))

    def test_second_message_on_same_pair_raises(self):
        with pytest.raises(BudgetViolation):
            run_protocol(empty(4), SendOnce([(1, (1,)), (1, (0,))]))

    def test_broadcast_after_send_raises(self):
        with pytest.raises(BudgetViolation):
            run_protocol(empty(4), SendOnce([(1, (1,))], broadcast=(1,)))

    def test_self_addressed_message_is_delivered_next_round(self):
        outputs, stats = run_protocol(empty(4), SendOnce([(0, (5,))]))
        assert outputs[0] == [(5,)]
        assert outputs[1] == []
        assert stats.rounds == 1
        assert stats.total_bits == 3

    def test_self_addressed_message_obeys_budget(self):
        with pytest.raises(BudgetViolation):
            run_protocol(empty(16), SendOnce([(0, "1" * 17)]))

    def test_second_self_addressed_message_raises(self):
        with pytest.raises(BudgetViolation):
            run_protocol(empty(4), SendOnce([(0, (1,)), (0, (1,))]))

    @FUZZ_SETTINGS
    @given(plan=send_plans)
    def test_fuzzed_sends_raise_exactly_on_violations(self, plan):
        check_send_plan(plan)

    @pytest.mark.slow
    @LONG_FUZZ_SETTINGS
    @given(plan=send_plans)
    def test_hundred_thousand_send_patterns(self, plan):
        check_send_plan(plan)


class TestLenzen:
    def test_overloaded_source_raises(self):
        plan = [(i % 4, (i,)) for i in range(5)]
        with pytest.raises(LoadViolation):
            run_protocol(empty(4), SendOnce(plan, lenzen=True))

    def test_overloaded_destination_raises(self):
        net = CliqueNetwork(4)
        with pytest.raises(LoadViolation):
            net.lenzen_route([(s, 2, (s,)) for s in range(4)] + [(0, 2, (9,))])

    def test_lenzen_step_is_charged_two_rounds(self):
        plan = [(d, (d,)) for d in range(4)]
        outputs, stats = run_protocol(empty(4), SendOnce(plan, lenzen=True))
        assert stats.rounds == 2
        assert stats.lenzen_calls == 1
        assert all(outputs[d] == [(d,)] for d in range(4))

    @FUZZ_SETTINGS
    @given(msgs=st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), max_size=24))
    def test_lenzen_raises_iff_some_load_exceeds_n(self, msgs):
        net = CliqueNetwork(4)
        batch = [(s, d, (1,)) for s, d in msgs]
        src = max((sum(1 for s, _ in msgs if s == v) for v in range(4)), default=0)
        dst = max((sum(1 for _, d in msgs if d == v) for v in range(4)), default=0)
        if max(src, dst) > 4:
            with pytest.raises(LoadViolation):
                net.lenzen_route(batch)
        else:
            delivered = net.lenzen_route(batch)
            assert sum(len(v) for v in delivered.values()) == len(msgs)

    def test_batched_route_splits_by_load(self):
        net = CliqueNetwork(4)
        delivered = net.lenzen_route_batched([(0, i % 4, (i,)) for i in range(10)])
        assert net.stats.lenzen_calls == 3
        assert net.stats.rounds == 6
        assert sum(len(v) for v in delivered.values()) == 10

    def test_mixing_lenzen_and_plain_traffic_raises(self):
        class Mixed(Protocol):
            def step(self, vertex, inbox):
                if vertex.id == 0:
                    vertex.lenzen_send(1, (1,))
                if vertex.id == 1:
                    vertex.send(0, (1,))
                vertex.halt()

        with pytest.raises(ProtocolError):
            run_protocol(empty(3), Mixed())


class TestRounds:
    def test_flood_min_takes_exactly_its_rounds(self):
        outputs, stats = run_protocol(path_graph(4), FloodMin(3))
        assert stats.rounds == 3
        assert stats.steps == 3
        assert set(outputs.values()) == {0}

    def test_zero_rounds_when_everyone_halts_silently(self):
        outputs, stats = run_protocol(path_graph(4), FloodMin(0))
        assert stats.rounds == 0
        assert outputs == {0: 0, 1: 1, 2: 2, 3: 3}

    def test_round_cap_raises_non_termination(self):
        with pytest.raises(NonTermination):
            run_protocol(empty(3), NeverHalts(), round_cap=10)

    def test_broadcast_counts_n_copies(self):
        _, stats = run_protocol(empty(8), SendOnce([], broadcast="111"))
        assert stats.total_bits == 3 * 8
        assert stats.messages == 8

    def test_thread_pool_gives_identical_results(self):
        g = path_graph(12)
        serial, s1 = run_protocol(g, FloodMin(5))
        pooled, s2 = run_protocol(g, FloodMin(5), workers=4)
        assert serial == pooled
        assert s1.as_dict() == s2.as_dict()

    def test_local_simulation_is_not_charged(self):
        outputs = simulate_locally(path_graph(6), FloodMin(5))
        assert set(outputs.values()) == {0}

    def test_network_size_must_match_graph(self):
        with pytest.raises(ProtocolError):
            CliqueNetwork(5).run(path_graph(4), FloodMin(1))
