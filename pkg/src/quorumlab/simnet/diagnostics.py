"""
Trace Diagnostics

Round-trip accounting, crucial information (the per-server arrival order of
two distinguished writes), server state diffs and read timestamp gaps.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Tuple

import pandas as pd

from ..automata.base import WRITE, OpIntent
from ..core.admissibility import vector_from_wire
from ..core.values import Value
from ..exceptions import DiagnosticError
from .engine import ExecutionTrace
from .schedule import Schedule

logger = logging.getLogger(__name__)


def round_trip_counts(trace: ExecutionTrace) -> Dict[int, int]:
    """Round-trips each started operation opened, from the send/skip tags in the log."""
    counts: Dict[int, int] = {}
    for e in trace.events:
        if e.kind in ("send", "skip") and e.op is not None:
            counts[e.op] = max(counts.get(e.op, 0), e.rt)
    return counts


def round_trip_summary(trace: ExecutionTrace) -> pd.DataFrame:
    """
    Summarize round-trips of completed operations per kind.

    Returns:
        DataFrame indexed by kind with count/min/max columns
    """
    counts = round_trip_counts(trace)
    rows = [
        {"op": o.op_id, "kind": o.kind, "round_trips": counts.get(o.op_id, 0)}
        for o in trace.history.ops
        if not o.pending
    ]
    df = pd.DataFrame(rows, columns=["op", "kind", "round_trips"])
    if df.empty:
        return pd.DataFrame(columns=["count", "min", "max"])
    return df.groupby("kind")["round_trips"].agg(["count", "min", "max"])


def _distinguished_writes(workload: Tuple[OpIntent, ...]) -> Dict[int, str]:
    writes = sorted((o for o in workload if o.kind == WRITE), key=lambda o: (o.invoke_at, o.op_id))
    if len(writes) != 2:
        raise DiagnosticError(f"crucial information needs exactly two writes, found {len(writes)}")
    return {writes[0].op_id: "1", writes[1].op_id: "2"}


def crucial_info(trace: ExecutionTrace, server: int) -> str:
    """
    Order in which ``server`` received the update messages of the two writes.

    Returns:
        "12", "21", or a shorter string when a write never reached the server
    """
    labels = _distinguished_writes(trace.schedule.workload)
    order = [
        labels[e.op]
        for e in trace.events
        if e.kind == "deliver" and e.dst == server and e.op in labels and (e.payload or {}).get("type") == "update"
    ]
    return "".join(order)


def planned_crucial_info(schedule: Schedule, server: int, update_rt: int) -> str:
    """Crucial information as the delivery-order keys of ``schedule`` plan it."""
    labels = _distinguished_writes(schedule.workload)
    planned = []
    for op_id, label in labels.items():
        slot = schedule.slot(op_id, update_rt, server)
        if slot.skip:
            continue
        planned.append((slot.key is None, slot.key or 0, label))
    return "".join(label for *_, label in sorted(planned))


@dataclass
class ServerStateDiff:
    server: int
    val_a: Optional[Value]
    val_b: Optional[Value]
    only_a: List[Value] = field(default_factory=list)
    only_b: List[Value] = field(default_factory=list)
    updated_changes: Dict[Value, Tuple[FrozenSet[int], FrozenSet[int]]] = field(default_factory=dict)

    @property
    def equal(self) -> bool:
        return self.val_a == self.val_b and not (self.only_a or self.only_b or self.updated_changes)


def _decode_state(state: Mapping[str, Any]) -> Tuple[Optional[Value], Dict[Value, FrozenSet[int]]]:
    val = Value.from_wire(state["val"]) if "val" in state else None
    vector = vector_from_wire(state.get("vector", []))
    return val, vector


def server_state_diff(trace_a: ExecutionTrace, trace_b: ExecutionTrace, server: int) -> ServerStateDiff:
    """Compare the final state ``server`` reached in two traces."""
    if server not in trace_a.final_states or server not in trace_b.final_states:
        raise DiagnosticError(f"no final state recorded for server {server}")
    val_a, vec_a = _decode_state(trace_a.final_states[server])
    val_b, vec_b = _decode_state(trace_b.final_states[server])
    diff = ServerStateDiff(
        server=server,
        val_a=val_a,
        val_b=val_b,
        only_a=sorted(set(vec_a) - set(vec_b)),
        only_b=sorted(set(vec_b) - set(vec_a)),
    )
    for v in sorted(set(vec_a) & set(vec_b)):
        if vec_a[v] != vec_b[v]:
            diff.updated_changes[v] = (vec_a[v], vec_b[v])
    return diff


@dataclass(frozen=True)
class ReadGap:
    op_id: int
    returned_ts: int
    max_ack_ts: int

    @property
    def gap(self) -> int:
        return self.max_ack_ts - self.returned_ts


def _reply_timestamps(payload: Mapping[str, Any]) -> List[int]:
    if payload.get("type") == "vector":
        return [v.ts for v in vector_from_wire(payload["vector"])]
    if payload.get("type") == "value":
        return [Value.from_wire(payload["value"]).ts]
    return []


def read_timestamp_gaps(trace: ExecutionTrace) -> List[ReadGap]:
    """
    For each completed read, its returned timestamp next to the largest
    timestamp in the first-round replies it consumed.
    """
    max_ts: Dict[int, int] = {}
    for e in trace.events:
        if e.kind == "deliver" and e.rt == 1 and e.dst is not None and trace.cfg.is_reader(e.dst) and e.payload:
            stamps = _reply_timestamps(e.payload)
            if stamps:
                max_ts[e.op] = max(max_ts.get(e.op, 0), max(stamps))
    gaps = [
        ReadGap(o.op_id, o.value.ts, max_ts[o.op_id])
        for o in trace.history.reads
        if not o.pending and o.op_id in max_ts
    ]
    wide = [g for g in gaps if g.gap > 1]
    if wide:
        logger.info(f"{len(wide)} reads returned more than one timestamp behind their acks")
    return gaps
