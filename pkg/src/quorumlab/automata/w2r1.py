"""
W2R1 Fast-Read Protocol

Writes take two round-trips (query the largest timestamp, then update with
(maxTS + 1, w)); reads take one, returning the largest admissible value in
the collected vectors.
"""

import logging
from typing import Any, Dict, List, Optional, Set

from ..core.admissibility import AdmissibilityWitness, ReadAck, max_admissible
from ..core.config import SystemConfig
from ..core.values import Value
from ..exceptions import ProtocolInvariantError
from .base import (
    OpIntent,
    ProtocolFamily,
    QueryRequest,
    QuorumClient,
    ReadRequest,
    ServerAutomaton,
    UpdateRequest,
)
from .server import ServerState, ack_from_reply, server_on_query, server_on_read, server_on_write

logger = logging.getLogger(__name__)


class FastWriter(QuorumClient):
    """Writer: query phase then update phase."""

    def __init__(self, pid: int, cfg: SystemConfig):
        super().__init__(pid, cfg)
        self.ts = 0
        self.max_ts: Optional[int] = None

    def start(self, op: OpIntent) -> Any:
        self.max_ts = None
        return QueryRequest()

    def complete_round(self, op: OpIntent, rt: int, replies: Dict[int, Any]) -> Any:
        if rt == 1:
            self.max_ts = max(v.ts for reply in replies.values() for v in reply.vector)
            value = Value(self.max_ts + 1, self.pid)
            if value.ts <= self.ts:
                raise ProtocolInvariantError(f"writer {self.pid} timestamp went from {self.ts} to {value.ts}")
            self.ts = value.ts
            self.pending_value = value
            return UpdateRequest(value)
        return self.pending_value


class FastReader(QuorumClient):
    """Reader: one round-trip, carrying the value queue."""

    def __init__(self, pid: int, cfg: SystemConfig):
        super().__init__(pid, cfg)
        self.val_queue: Set[Value] = {Value.initial()}
        self.last_witness: Optional[AdmissibilityWitness] = None

    def start(self, op: OpIntent) -> Any:
        return ReadRequest(tuple(sorted(self.val_queue)))

    def complete_round(self, op: OpIntent, rt: int, replies: Dict[int, Any]) -> Any:
        acks: List[ReadAck] = [ack_from_reply(server, reply) for server, reply in replies.items()]
        for ack in acks:
            self.val_queue.update(ack.vector)
        value, witness = max_admissible(acks, self.cfg)
        self.val_queue.add(value)
        self.last_witness = witness
        logger.debug(f"reader {self.pid} returns {value} at degree {witness.degree} from {witness.servers}")
        return value


class FullInfoServer(ServerAutomaton):
    """Server holding the append-only value vector."""

    def __init__(self, pid: int, cfg: SystemConfig):
        super().__init__(pid, cfg)
        self.state = ServerState()

    def on_request(self, client: int, payload: Any) -> Any:
        if isinstance(payload, ReadRequest):
            self.state, reply = server_on_read(self.state, payload.values, client)
        elif isinstance(payload, UpdateRequest):
            self.state, reply = server_on_write(self.state, payload.value, client)
        elif isinstance(payload, QueryRequest):
            self.state, reply = server_on_query(self.state)
        else:
            raise ValueError(f"full-info server cannot handle {payload!r}")
        return reply

    def snapshot(self) -> Dict[str, Any]:
        return self.state.to_wire()


W2R1 = ProtocolFamily(
    name="w2r1",
    write_round_trips=2,
    read_round_trips=1,
    writer=FastWriter,
    reader=FastReader,
    server=FullInfoServer,
    description="fast reads over append-only value vectors; atomic when R < S/t - 2",
)
