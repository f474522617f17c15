"""
Full-Info Server State

The fast-read server keeps an append-only value vector: every value it has
ever seen, each with the set of clients registered as having conveyed or
received it. Functions here are pure; each returns a new state.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, Mapping, Tuple

from ..core.admissibility import ReadAck, vector_to_wire
from ..core.values import Value
from .base import Ack, VectorReply


def _initial_vector() -> Mapping[Value, FrozenSet[int]]:
    return {Value.initial(): frozenset()}


@dataclass(frozen=True)
class ServerState:
    """``val_i`` is always the largest key of ``value_vector``."""

    val_i: Value = field(default_factory=Value.initial)
    value_vector: Mapping[Value, FrozenSet[int]] = field(default_factory=_initial_vector, hash=False)

    def updated(self, value: Value) -> FrozenSet[int]:
        return self.value_vector.get(value, frozenset())

    def to_wire(self) -> Dict[str, Any]:
        return {"val": self.val_i.to_wire(), "vector": vector_to_wire(self.value_vector)}


def server_update(state: ServerState, val: Value, c: int) -> ServerState:
    """
    Register client ``c`` against ``val``.

    A value above ``val_i`` enters with updated = {c} and becomes the new
    maximum; otherwise ``c`` joins the value's updated set, creating the
    entry on first sight.
    """
    vector = dict(state.value_vector)
    if val > state.val_i:
        vector[val] = frozenset({c})
        return ServerState(val_i=val, value_vector=vector)
    vector[val] = vector.get(val, frozenset()) | {c}
    return ServerState(val_i=state.val_i, value_vector=vector)


def server_on_write(state: ServerState, val: Value, w: int) -> Tuple[ServerState, Ack]:
    return server_update(state, val, w), Ack()


def server_on_read(state: ServerState, val_queue: Iterable[Value], r: int) -> Tuple[ServerState, VectorReply]:
    """
    Apply a fast read: register ``r`` against every value in its queue, then
    against every value held, and reply with the whole vector.
    """
    for val in sorted(set(val_queue)):
        state = server_update(state, val, r)
    vector = {v: updated | {r} for v, updated in state.value_vector.items()}
    state = ServerState(val_i=state.val_i, value_vector=vector)
    return state, VectorReply.of(state.value_vector)


def server_on_query(state: ServerState) -> Tuple[ServerState, VectorReply]:
    """Writer query: a snapshot, no registration."""
    return state, VectorReply.of(state.value_vector)


def ack_from_reply(server: int, reply: VectorReply) -> ReadAck:
    return ReadAck(server=server, vector=reply.vector)
