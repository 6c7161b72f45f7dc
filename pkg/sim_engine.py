"""Deterministic synchronous round executor for the Congested Clique.

A protocol is a per-vertex step program. In every synchronous step each
vertex that has not halted reads its own state and the messages delivered to
it in the previous round, then queues messages for the next round. The
executor enforces the per-message bit budget and the one-message-per-ordered-
pair rule, charges rounds and exposes Lenzen's routing scheme as a primitive
with checked load preconditions.
"""

from __future__ import annotations

import logging
import threading
from abc import ABC, abstractmethod
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Iterator, Union

import config
from errors import BudgetViolation, LoadViolation, NonTermination, ProtocolError
from graph_model import Graph
from utils import word_bits

logger = logging.getLogger(__name__)

Payload = Union[str, tuple[int, ...]]


def payload_bits(payload: Payload) -> int:
    """Size of a payload: a '0'/'1' string counts its length, a tuple its field widths."""

    if isinstance(payload, str):
        if payload.strip("01"):
            raise ProtocolError("bit-string payloads may only contain '0' and '1'")
        return len(payload)
    bits = 0
    for x in payload:
        if x < 0:
            raise ProtocolError("payload fields must be non-negative integers")
        bits += max(1, int(x).bit_length())
    return bits


@dataclass(frozen=True)
class Message:
    src: int
    dst: int
    payload: Payload


@dataclass
class RoundStats:
    """Accumulated accounting of one network."""

    rounds: int = 0
    steps: int = 0
    total_bits: int = 0
    max_message_bits: int = 0
    lenzen_calls: int = 0
    messages: int = 0
    per_round_bits: list[int] = field(default_factory=list)

    def copy(self) -> "RoundStats":
        return replace(self, per_round_bits=list(self.per_round_bits))

    def as_dict(self) -> dict[str, int]:
        return {
            "rounds": self.rounds,
            "steps": self.steps,
            "total_bits": self.total_bits,
            "max_message_bits": self.max_message_bits,
            "lenzen_calls": self.lenzen_calls,
            "messages": self.messages,
        }


class Board:
    """Broadcasts of one round, stored once and shared by every receiver.

    ``cached`` memoises pure functions of the board; every vertex reads the
    same board, so the memoised value is what each of them would compute.
    """

    __slots__ = ("entries", "_memo", "_lock")

    def __init__(self, entries: tuple[tuple[int, Payload], ...] = ()) -> None:
        self.entries = entries
        self._memo: dict[Any, Any] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[int, Payload]]:
        return iter(self.entries)

    def cached(self, key: Any, fn: Callable[[], Any]) -> Any:
        with self._lock:
            if key not in self._memo:
                self._memo[key] = fn()
            return self._memo[key]


EMPTY_BOARD = Board()


@dataclass
class Inbox:
    """Point-to-point messages (sorted by sender) plus the shared broadcast board."""

    messages: list[Message] = field(default_factory=list)
    board: Board = EMPTY_BOARD

    def __iter__(self) -> Iterator[tuple[int, Payload]]:
        """All (sender, payload) pairs in sender order."""

        p2p = [(m.src, m.payload) for m in self.messages]
        if not self.board.entries:
            return iter(p2p)
        if not p2p:
            return iter(self.board.entries)
        return iter(sorted(p2p + list(self.board.entries), key=lambda x: x[0]))

    def __len__(self) -> int:
        return len(self.messages) + len(self.board)


class VertexProcess:
    """Processing unit of one vertex.

    Knows n, its own ID and its incident edges of G' from the start.
    """

    def __init__(self, vid: int, n: int, neighbors: frozenset[int], budget_bits: int) -> None:
        self.id = vid
        self.n = n
        self.neighbors = neighbors
        self.state: dict[str, Any] = {}
        self.round = 0
        self.halted = False
        self.output: Any = None
        self._budget = budget_bits
        self._out: dict[int, Payload] = {}
        self._broadcast: Payload | None = None
        self._lenzen: list[tuple[int, Payload]] = []

    def _check(self, payload: Payload) -> int:
        bits = payload_bits(payload)
        if bits > self._budget:
            raise BudgetViolation(f"vertex {self.id}: payload of {bits} bits exceeds budget {self._budget}")
        return bits

    def _check_dst(self, dst: int) -> None:
        if not 0 <= dst < self.n:
            raise ProtocolError(f"vertex {self.id}: destination {dst} outside [0, {self.n})")

    def send(self, dst: int, payload: Payload) -> None:
        """Queue a message for delivery next round."""

        self._check_dst(dst)
        self._check(payload)
        if dst in self._out or self._broadcast is not None:
            raise BudgetViolation(f"second message on ordered pair ({self.id}, {dst}) in one round")
        self._out[dst] = payload

    def broadcast(self, payload: Payload) -> None:
        """Send the same payload to every vertex, itself included."""

        self._check(payload)
        if self._out or self._broadcast is not None:
            raise BudgetViolation(f"vertex {self.id}: broadcast overlaps another message this round")
        self._broadcast = payload

    def lenzen_send(self, dst: int, payload: Payload) -> None:
        """Queue a message for the Lenzen batch of this step."""

        self._check_dst(dst)
        self._check(payload)
        self._lenzen.append((dst, payload))

    def halt(self, output: Any = None) -> None:
        self.halted = True
        self.output = output

    def _drain(self) -> tuple[dict[int, Payload], Payload | None, list[tuple[int, Payload]]]:
        out, bc, lz = self._out, self._broadcast, self._lenzen
        self._out, self._broadcast, self._lenzen = {}, None, []
        return out, bc, lz


class Protocol(ABC):
    """Per-vertex step program.

    ``step`` must read only ``vertex`` (its state, ID, n and incident edges)
    and the inbox, plus data the protocol was constructed with for that vertex.
    """

    name: str = "protocol"

    def init(self, vertex: VertexProcess) -> None:
        """Set up local state before the first step (no communication)."""

    @abstractmethod
    def step(self, vertex: VertexProcess, inbox: Inbox) -> None:
        ...


class CliqueNetwork:
    """Round executor and accountant for an n-vertex clique."""

    def __init__(
        self,
        n: int,
        c_msg: int = config.C_MSG,
        lenzen_charge: int = config.LENZEN_CHARGE,
        round_cap: int | None = None,
        workers: int = 1,
    ) -> None:
        self.n = n
        self.c_msg = c_msg
        self.budget_bits = c_msg * word_bits(n)
        self.lenzen_charge = lenzen_charge
        self.round_cap = round_cap if round_cap is not None else config.ROUND_CAP_FACTOR * max(1, n)
        self.workers = workers
        self.stats = RoundStats()

    # ------------------------------
    # Accounting
    # ------------------------------

    def _account(self, bits: int, copies: int = 1) -> None:
        self.stats.total_bits += bits * copies
        self.stats.messages += copies
        if bits > self.stats.max_message_bits:
            self.stats.max_message_bits = bits

    def _check_payload(self, payload: Payload) -> int:
        bits = payload_bits(payload)
        if bits > self.budget_bits:
            raise BudgetViolation(f"payload of {bits} bits exceeds budget {self.budget_bits}")
        return bits

    # ------------------------------
    # Lenzen routing
    # ------------------------------

    def lenzen_route(self, messages: Iterable[tuple[int, int, Payload]]) -> dict[int, list[Message]]:
        """Deliver a message multiset in one charged invocation.

        Raises:
            LoadViolation: some vertex sources or receives more than n messages.
            BudgetViolation: a payload is over budget.
        """

        batch = [Message(s, d, p) for s, d, p in messages]
        src_load = Counter(m.src for m in batch)
        dst_load = Counter(m.dst for m in batch)
        for v, load in src_load.items():
            if load > self.n:
                raise LoadViolation(f"vertex {v} sources {load} > n = {self.n} messages")
        for v, load in dst_load.items():
            if load > self.n:
                raise LoadViolation(f"vertex {v} receives {load} > n = {self.n} messages")

        delivered: dict[int, list[Message]] = defaultdict(list)
        bits_total = 0
        for m in batch:
            if not (0 <= m.src < self.n and 0 <= m.dst < self.n):
                raise ProtocolError(f"Lenzen message {m.src}->{m.dst} outside [0, {self.n})")
            bits = self._check_payload(m.payload)
            self._account(bits)
            bits_total += bits
            delivered[m.dst].append(m)

        self.stats.lenzen_calls += 1
        self.stats.rounds += self.lenzen_charge
        self.stats.per_round_bits.extend([bits_total] + [0] * (self.lenzen_charge - 1))
        for msgs in delivered.values():
            msgs.sort(key=lambda m: m.src)
        return dict(delivered)

    def lenzen_route_batched(self, messages: Iterable[tuple[int, int, Payload]]) -> dict[int, list[Message]]:
        """Split a multiset into batches of load at most n and route each."""

        batches: list[list[tuple[int, int, Payload]]] = []
        loads: list[tuple[Counter, Counter]] = []
        for msg in messages:
            src, dst, _ = msg
            for batch, (sl, dl) in zip(batches, loads):
                if sl[src] < self.n and dl[dst] < self.n:
                    break
            else:
                batch, sl, dl = [], Counter(), Counter()
                batches.append(batch)
                loads.append((sl, dl))
            batch.append(msg)
            sl[src] += 1
            dl[dst] += 1

        delivered: dict[int, list[Message]] = defaultdict(list)
        for batch in batches:
            for dst, msgs in self.lenzen_route(batch).items():
                delivered[dst].extend(msgs)
        for msgs in delivered.values():
            msgs.sort(key=lambda m: m.src)
        return dict(delivered)

    # ------------------------------
    # Protocol execution
    # ------------------------------

    def run(self, graph: Graph, protocol: Protocol, workers: int | None = None) -> dict[int, Any]:
        """Execute ``protocol`` until every vertex halts; return outputs per vertex.

        Raises:
            BudgetViolation, LoadViolation, ProtocolError: model violations.
            NonTermination: more than ``round_cap`` rounds in this run.
        """

        if graph.n != self.n:
            raise ProtocolError(f"graph has {graph.n} vertices, network has {self.n}")

        n = self.n
        procs = [VertexProcess(v, n, graph.neighbors(v), self.budget_bits) for v in range(n)]
        for proc in procs:
            protocol.init(proc)

        workers = self.workers if workers is None else workers
        pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
        inboxes: list[Inbox] = [Inbox() for _ in range(n)]
        start_rounds = self.stats.rounds
        step = 0
        try:
            while True:
                step += 1
                active = [p for p in procs if not p.halted]
                for p in active:
                    p.round = step
                if pool is not None:
                    list(pool.map(lambda p: protocol.step(p, inboxes[p.id]), active))
                else:
                    for p in active:
                        protocol.step(p, inboxes[p.id])

                sends: list[Message] = []
                broadcasts: list[tuple[int, Payload]] = []
                lenzen: list[tuple[int, int, Payload]] = []
                for p in active:
                    out, bc, lz = p._drain()
                    sends.extend(Message(p.id, d, pl) for d, pl in sorted(out.items()))
                    if bc is not None:
                        broadcasts.append((p.id, bc))
                    lenzen.extend((p.id, d, pl) for d, pl in lz)

                all_halted = all(p.halted for p in procs)
                if all_halted and not (sends or broadcasts or lenzen):
                    break

                if lenzen:
                    if sends or broadcasts:
                        raise ProtocolError(f"{protocol.name}: step {step} mixes Lenzen and ordinary traffic")
                    delivered = self.lenzen_route(lenzen)
                    inboxes = [Inbox(delivered.get(v, [])) for v in range(n)]
                else:
                    inboxes = self._deliver(sends, broadcasts)

                if self.stats.rounds - start_rounds > self.round_cap:
                    raise NonTermination(f"{protocol.name}: exceeded {self.round_cap} rounds")
                if all_halted:
                    break
        finally:
            if pool is not None:
                pool.shutdown(wait=True)

        logger.debug(
            "%s finished: %d rounds in run, %d total, lenzen_calls=%d",
            protocol.name,
            self.stats.rounds - start_rounds,
            self.stats.rounds,
            self.stats.lenzen_calls,
        )
        return {p.id: p.output for p in procs}

    def _deliver(self, sends: list[Message], broadcasts: list[tuple[int, Payload]]) -> list[Inbox]:
        n = self.n
        round_bits = 0
        boxes: list[list[Message]] = [[] for _ in range(n)]
        for m in sends:
            bits = payload_bits(m.payload)
            self._account(bits)
            round_bits += bits
            boxes[m.dst].append(m)
        for _, pl in broadcasts:
            bits = payload_bits(pl)
            self._account(bits, copies=n)
            round_bits += bits * n
        board = Board(tuple(broadcasts)) if broadcasts else EMPTY_BOARD

        self.stats.rounds += 1
        self.stats.steps += 1
        self.stats.per_round_bits.append(round_bits)
        return [Inbox(boxes[v], board) for v in range(n)]


def run_protocol(
    graph: Graph,
    protocol: Protocol,
    network: CliqueNetwork | None = None,
    **network_config: Any,
) -> tuple[dict[int, Any], RoundStats]:
    """Run a protocol and return (outputs, stats).

    When ``network`` is omitted a fresh ``CliqueNetwork(graph.n, **network_config)``
    is used; otherwise its stats keep accumulating and the returned stats are
    a snapshot of the totals.
    """

    net = network if network is not None else CliqueNetwork(graph.n, **network_config)
    outputs = net.run(graph, protocol)
    return outputs, net.stats.copy()


def simulate_locally(graph: Graph, protocol: Protocol) -> dict[int, Any]:
    """Evaluate a protocol as local computation on a scratch network (rounds not charged).

    Used when every vertex already holds ``graph`` and can run the same
    deterministic procedure on it in its own memory.
    """

    net = CliqueNetwork(graph.n, round_cap=1 << 40)
    return net.run(graph, protocol)
