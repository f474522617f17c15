"""
ABD Baseline (W2R2)

Servers keep only the largest value. Writers query then update; readers
query for the largest value and write it back before returning.
"""

from typing import Any, Dict

from ..core.config import SystemConfig
from ..core.values import Value
from ..exceptions import ProtocolInvariantError
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


def _largest(replies: Dict[int, ValueReply]) -> Value:
    return max(reply.value for reply in replies.values())


class TwoPhaseWriter(QuorumClient):
    def __init__(self, pid: int, cfg: SystemConfig):
        super().__init__(pid, cfg)
        self.ts = 0

    def start(self, op: OpIntent) -> Any:
        return QueryRequest()

    def complete_round(self, op: OpIntent, rt: int, replies: Dict[int, Any]) -> Any:
        if rt == 1:
            value = Value(_largest(replies).ts + 1, self.pid)
            if value.ts <= self.ts:
                raise ProtocolInvariantError(f"writer {self.pid} timestamp went from {self.ts} to {value.ts}")
            self.ts = value.ts
            self.pending_value = value
            return UpdateRequest(value)
        return self.pending_value


class WriteBackReader(QuorumClient):
    def start(self, op: OpIntent) -> Any:
        return QueryRequest()

    def complete_round(self, op: OpIntent, rt: int, replies: Dict[int, Any]) -> Any:
        if rt == 1:
            self.pending_value = _largest(replies)
            return UpdateRequest(self.pending_value)
        return self.pending_value


class MaxValueServer(ServerAutomaton):
    def __init__(self, pid: int, cfg: SystemConfig):
        super().__init__(pid, cfg)
        self.value = Value.initial()

    def on_request(self, client: int, payload: Any) -> Any:
        if isinstance(payload, QueryRequest):
            return ValueReply(self.value)
        if isinstance(payload, UpdateRequest):
            self.value = max(self.value, payload.value)
            return Ack()
        raise ValueError(f"max-value server cannot handle {payload!r}")

    def snapshot(self) -> Dict[str, Any]:
        return {"val": self.value.to_wire()}


ABD = ProtocolFamily(
    name="w2r2-abd",
    write_round_trips=2,
    read_round_trips=2,
    writer=TwoPhaseWriter,
    reader=WriteBackReader,
    server=MaxValueServer,
    description="two-phase writes and write-back reads; atomic when t < S/2",
)
