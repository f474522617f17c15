"""
Automaton Interface

Messages, client and server automata, and the protocol family record the
simulator drives. Clients collect replies round-trip by round-trip and only
act once S - t distinct servers have answered.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, FrozenSet, Mapping, Optional, Tuple

from ..core.admissibility import vector_from_wire, vector_to_wire
from ..core.config import SystemConfig
from ..core.values import Value

logger = logging.getLogger(__name__)

READ = "read"
WRITE = "write"
OP_KINDS = (READ, WRITE)


@dataclass(frozen=True)
class QueryRequest:
    """Ask a server for its state without changing it."""

    def to_wire(self) -> Dict[str, Any]:
        return {"type": "query"}


@dataclass(frozen=True)
class ReadRequest:
    """Fast-read request carrying the reader's value queue."""

    values: Tuple[Value, ...]

    def to_wire(self) -> Dict[str, Any]:
        return {"type": "read", "values": [v.to_wire() for v in self.values]}


@dataclass(frozen=True)
class UpdateRequest:
    value: Value

    def to_wire(self) -> Dict[str, Any]:
        return {"type": "update", "value": self.value.to_wire()}


@dataclass(frozen=True)
class VectorReply:
    """A full value vector, sorted by value."""

    entries: Tuple[Tuple[Value, FrozenSet[int]], ...]

    @classmethod
    def of(cls, vector: Mapping[Value, FrozenSet[int]]) -> "VectorReply":
        return cls(tuple((v, frozenset(vector[v])) for v in sorted(vector)))

    @property
    def vector(self) -> Dict[Value, FrozenSet[int]]:
        return dict(self.entries)

    def to_wire(self) -> Dict[str, Any]:
        return {"type": "vector", "vector": vector_to_wire(self.vector)}


@dataclass(frozen=True)
class ValueReply:
    value: Value

    def to_wire(self) -> Dict[str, Any]:
        return {"type": "value", "value": self.value.to_wire()}


@dataclass(frozen=True)
class Ack:
    def to_wire(self) -> Dict[str, Any]:
        return {"type": "ack"}


def payload_from_wire(data: Mapping[str, Any]):
    """Rebuild a message payload from its wire dict."""
    kind = data.get("type")
    if kind == "query":
        return QueryRequest()
    if kind == "read":
        return ReadRequest(tuple(Value.from_wire(v) for v in data["values"]))
    if kind == "update":
        return UpdateRequest(Value.from_wire(data["value"]))
    if kind == "vector":
        return VectorReply.of(vector_from_wire(data["vector"]))
    if kind == "value":
        return ValueReply(Value.from_wire(data["value"]))
    if kind == "ack":
        return Ack()
    raise ValueError(f"unknown payload type {kind!r}")


@dataclass(frozen=True)
class OpIntent:
    """One operation of a workload: who invokes what, and when."""

    op_id: int
    client: int
    kind: str
    invoke_at: int

    def __post_init__(self):
        if self.kind not in OP_KINDS:
            raise ValueError(f"operation kind must be one of {OP_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class Broadcast:
    """A round-trip's request, sent to every server."""

    op_id: int
    rt: int
    payload: Any


@dataclass(frozen=True)
class OpResponse:
    op_id: int
    value: Value
    round_trips: int


@dataclass(frozen=True)
class ClientStep:
    """Outcome of handing one reply to a client."""

    consumed: bool
    broadcast: Optional[Broadcast] = None
    response: Optional[OpResponse] = None


STALE = ClientStep(consumed=False)


class QuorumClient:
    """
    Base client automaton.

    Subclasses implement :meth:`start` (first request of an operation) and
    :meth:`complete_round` (called with exactly S - t replies, returns either
    the next request payload or the operation's result value).
    """

    def __init__(self, pid: int, cfg: SystemConfig):
        self.pid = pid
        self.cfg = cfg
        self.op: Optional[OpIntent] = None
        self.rt = 0
        self.replies: Dict[int, Any] = {}
        self.pending_value: Optional[Value] = None

    @property
    def busy(self) -> bool:
        return self.op is not None

    def invoke(self, op: OpIntent) -> Broadcast:
        if self.busy:
            raise RuntimeError(f"client {self.pid} invoked op {op.op_id} while op {self.op.op_id} is running")
        self.op = op
        self.rt = 1
        self.replies = {}
        self.pending_value = None
        return Broadcast(op.op_id, 1, self.start(op))

    def on_reply(self, server: int, op_id: int, rt: int, payload: Any) -> ClientStep:
        if self.op is None or op_id != self.op.op_id or rt != self.rt or server in self.replies:
            return STALE
        self.replies[server] = payload
        if len(self.replies) < self.cfg.quorum:
            return ClientStep(consumed=True)

        replies = dict(sorted(self.replies.items()))
        outcome = self.complete_round(self.op, self.rt, replies)
        if isinstance(outcome, Value):
            response = OpResponse(self.op.op_id, outcome, self.rt)
            self.op = None
            self.replies = {}
            return ClientStep(consumed=True, response=response)

        self.rt += 1
        self.replies = {}
        return ClientStep(consumed=True, broadcast=Broadcast(op_id, self.rt, outcome))

    def start(self, op: OpIntent) -> Any:
        raise NotImplementedError

    def complete_round(self, op: OpIntent, rt: int, replies: Dict[int, Any]) -> Any:
        raise NotImplementedError


class ServerAutomaton:
    """Base server automaton: answers one request at a time."""

    def __init__(self, pid: int, cfg: SystemConfig):
        self.pid = pid
        self.cfg = cfg

    def on_request(self, client: int, payload: Any) -> Any:
        raise NotImplementedError

    def snapshot(self) -> Dict[str, Any]:
        raise NotImplementedError


ClientFactory = Callable[[int, SystemConfig], QuorumClient]
ServerFactory = Callable[[int, SystemConfig], ServerAutomaton]


@dataclass(frozen=True)
class ProtocolFamily:
    """A named protocol: client and server automata plus declared round-trip counts."""

    name: str
    write_round_trips: int
    read_round_trips: int
    writer: ClientFactory
    reader: ClientFactory
    server: ServerFactory
    description: str = ""

    def round_trips(self, kind: str) -> int:
        return self.write_round_trips if kind == WRITE else self.read_round_trips

    def make_client(self, pid: int, cfg: SystemConfig) -> QuorumClient:
        if cfg.is_writer(pid):
            return self.writer(pid, cfg)
        if cfg.is_reader(pid):
            return self.reader(pid, cfg)
        raise ValueError(f"process {pid} is not a client")

    def make_server(self, pid: int, cfg: SystemConfig) -> ServerAutomaton:
        return self.server(pid, cfg)

    @property
    def label(self) -> str:
        return f"W{self.write_round_trips}R{self.read_round_trips}"
