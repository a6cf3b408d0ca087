"""Deterministic in-memory message bus.

Parties register a handler; messages are enqueued with full byte
accounting and delivered either round by round (``deliver_round``) or as
blocking request/response exchanges (``rpc``), which is how the protocol
drivers run.  Delivery order is a pure function of send order; an optional
relaxed mode interleaves across sender/receiver pairs from a seeded stream
while preserving per-pair FIFO, and is excluded from determinism tests.

The federation layer only relies on the ``register``/``post``/``rpc``
surface, so a networked transport can replace this class without touching
protocol logic as long as it preserves per-pair FIFO and the same
accounting hooks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol

from revfrf.errors import ProtocolError
from revfrf.transport.ledger import CostLedger
from revfrf.wire import pack_u16, pack_u32


class Payload(Protocol):
    def encode(self) -> bytes: ...


@dataclass(frozen=True)
class Message:
    """Envelope: 1-byte protocol tag, 2-byte sender and receiver ids,
    4-byte payload length, then the payload's own encoding."""

    sender: int
    receiver: int
    tag: int
    payload: Any

    def encode(self) -> bytes:
        body = self.payload.encode()
        return bytes([self.tag]) + pack_u16(self.sender) + pack_u16(self.receiver) + pack_u32(len(body)) + body


@dataclass
class SimClock:
    """Logical delivery counter."""

    step: int = 0

    def tick(self) -> int:
        self.step += 1
        return self.step


@dataclass
class TraceEntry:
    step: int
    message: Message
    nbytes: int


Handler = Callable[[Message], Message | None]


class MessageBus:
    def __init__(
        self,
        ledger: CostLedger | None = None,
        seed: int = 0,
        relaxed: bool = False,
        trace: bool = False,
    ) -> None:
        self.ledger = ledger if ledger is not None else CostLedger()
        self.clock = SimClock()
        self.relaxed = relaxed
        self._rng = random.Random(seed)
        self._handlers: dict[int, Handler] = {}
        self._queue: list[Message] = []
        self.trace: list[TraceEntry] | None = [] if trace else None

    def register(self, party_id: int, handler: Handler) -> None:
        self._handlers[party_id] = handler

    def _account(self, msg: Message) -> int:
        nbytes = len(msg.encode())
        self.ledger.message(msg.sender, nbytes)
        if self.trace is not None:
            self.trace.append(TraceEntry(self.clock.step, msg, nbytes))
        return nbytes

    def _check_routable(self, msg: Message) -> None:
        if msg.receiver not in self._handlers:
            raise ProtocolError("message addressed to unregistered party %d" % msg.receiver)

    def post(self, msg: Message) -> None:
        """Enqueue for the next delivery round (accounted immediately)."""
        self._check_routable(msg)
        self._account(msg)
        self._queue.append(msg)

    def deliver_round(self) -> int:
        """Deliver everything currently queued; handlers run to completion.

        Messages a handler posts during the round are delivered in the
        next round.  Returns the number of messages delivered.
        """
        batch, self._queue = self._queue, []
        if self.relaxed and len(batch) > 1:
            batch = self._interleave(batch)
        for msg in batch:
            self.clock.tick()
            self._handlers[msg.receiver](msg)
        return len(batch)

    def _interleave(self, batch: list[Message]) -> list[Message]:
        by_pair: dict[tuple[int, int], list[Message]] = {}
        for msg in batch:
            by_pair.setdefault((msg.sender, msg.receiver), []).append(msg)
        order = []
        pairs = sorted(by_pair)
        while pairs:
            pair = self._rng.choice(pairs)
            order.append(by_pair[pair].pop(0))
            if not by_pair[pair]:
                pairs.remove(pair)
        return order

    def rpc(self, msg: Message) -> Message | None:
        """Deliver a request immediately; account and return the reply.

        The receiving handler runs synchronously (and may itself issue
        nested rpcs); whatever message it returns is accounted as traffic
        from the receiver and handed back to the caller.
        """
        self._check_routable(msg)
        self._account(msg)
        self.clock.tick()
        reply = self._handlers[msg.receiver](msg)
        if reply is not None:
            self._account(reply)
            self.clock.tick()
        return reply
