"""
Naive W1R2 Strawman

Writers send (counter, w) in a single round-trip, with the counter local to
the writer. Servers keep whatever value arrived last. Readers take the most
common value in a quorum of replies (ties go to the larger value) and write
it back. Not atomic: arrival order decides what a server holds.
"""

from collections import Counter
from typing import Any, Dict

from ..core.config import SystemConfig
from ..core.values import Value
from .base import (
    Ack,
    OpIntent,
    ProtocolFamily,
    QueryRequest,
    QuorumClient,
    ServerAutomaton,
    UpdateRequest,
    ValueReply,
)


class CounterWriter(QuorumClient):
    def __init__(self, pid: int, cfg: SystemConfig):
        super().__init__(pid, cfg)
        self.counter = 0

    def start(self, op: OpIntent) -> Any:
        self.counter += 1
        self.pending_value = Value(self.counter, self.pid)
        return UpdateRequest(self.pending_value)

    def complete_round(self, op: OpIntent, rt: int, replies: Dict[int, Any]) -> Any:
        return self.pending_value


class PluralityReader(QuorumClient):
    def start(self, op: OpIntent) -> Any:
        return QueryRequest()

    def complete_round(self, op: OpIntent, rt: int, replies: Dict[int, Any]) -> Any:
        if rt == 1:
            votes = Counter(reply.value for reply in replies.values())
            self.pending_value = max(votes, key=lambda v: (votes[v], v))
            return UpdateRequest(self.pending_value)
        return self.pending_value


class LastArrivalServer(ServerAutomaton):
    def __init__(self, pid: int, cfg: SystemConfig):
        super().__init__(pid, cfg)
        self.current = Value.initial()

    def on_request(self, client: int, payload: Any) -> Any:
        if isinstance(payload, QueryRequest):
            return ValueReply(self.current)
        if isinstance(payload, UpdateRequest):
            self.current = payload.value
            return Ack()
        raise ValueError(f"last-arrival server cannot handle {payload!r}")

    def snapshot(self) -> Dict[str, Any]:
        return {"val": self.current.to_wire()}


NAIVE_W1R2 = ProtocolFamily(
    name="w1r2-naive",
    write_round_trips=1,
    read_round_trips=2,
    writer=CounterWriter,
    reader=PluralityReader,
    server=LastArrivalServer,
    description="one-round writes with writer-local counters; not atomic",
)
