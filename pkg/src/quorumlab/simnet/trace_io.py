"""
Trace Files

Line-delimited "quorumlab-trace v1" container. The header line is followed
by one JSON record per line: a ``meta`` record (enough to replay), ``event``
records, ``op`` records, and an ``end`` trailer with the record counts. A
missing or inconsistent trailer marks a truncated file. History files use the
same container without events.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ValidationError

from ..automata import get_protocol
from ..core.config import SystemConfig
from ..exceptions import ConfigValidationError, TraceFormatError
from ..histories.model import History, OpRecord
from .engine import ExecutionTrace, SimEvent
from .schedule import Schedule

logger = logging.getLogger(__name__)

TRACE_HEADER = "quorumlab-trace v1"


class SystemConfigRecord(BaseModel):
    S: int
    W: int
    R: int
    t: int


class MetaRecord(BaseModel):
    record: Literal["meta"]
    content: Literal["trace", "history"]
    protocol: Optional[str] = None
    config: Optional[SystemConfigRecord] = None
    schedule: Optional[Dict[str, Any]] = None
    config_hash: Optional[str] = None


class EventRecord(BaseModel):
    record: Literal["event"]
    time: int
    seq: int
    kind: str
    src: Optional[int] = None
    dst: Optional[int] = None
    op: Optional[int] = None
    rt: Optional[int] = None
    payload: Optional[Dict[str, Any]] = None


class OpRecordModel(BaseModel):
    record: Literal["op"]
    op: int
    client: int
    kind: Literal["read", "write"]
    value: Optional[List[Optional[int]]] = None
    invoke: int
    response: Optional[int] = None
    round_trips: int = 0


class EndRecord(BaseModel):
    record: Literal["end"]
    events: int
    ops: int


_MODELS = {"meta": MetaRecord, "event": EventRecord, "op": OpRecordModel, "end": EndRecord}


def _dumps(data: Dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _write(path: Path, meta: Dict[str, Any], events: List[SimEvent], ops: List[OpRecord]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [TRACE_HEADER, _dumps({"record": "meta", **meta})]
    lines.extend(_dumps({"record": "event", **e.to_wire()}) for e in events)
    lines.extend(_dumps({"record": "op", **o.to_wire()}) for o in ops)
    lines.append(_dumps({"record": "end", "events": len(events), "ops": len(ops)}))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    return path


def _config_wire(cfg: SystemConfig) -> Dict[str, int]:
    return {"S": cfg.S, "W": cfg.W, "R": cfg.R, "t": cfg.t}


def export_trace(trace: ExecutionTrace, path: Path, config_hash: Optional[str] = None) -> Path:
    """
    Write a full trace.

    Args:
        trace: Executed trace
        path: Output file
        config_hash: Experiment config hash to embed, if any

    Returns:
        Path to the written file
    """
    meta = {
        "content": "trace",
        "protocol": trace.protocol,
        "config": _config_wire(trace.cfg),
        "schedule": trace.schedule.to_wire(),
        "config_hash": config_hash,
    }
    return _write(Path(path), meta, trace.events, list(trace.history.ops))


def export_history(
    history: History,
    path: Path,
    cfg: Optional[SystemConfig] = None,
    protocol: Optional[str] = None,
) -> Path:
    """Write a history-only file (meta, op records, trailer)."""
    meta = {
        "content": "history",
        "protocol": protocol,
        "config": None if cfg is None else _config_wire(cfg),
        "schedule": None,
        "config_hash": None,
    }
    return _write(Path(path), meta, [], list(history.ops))


class TraceLoader:
    """Loads and validates trace container files."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.meta: Optional[MetaRecord] = None
        self.events: List[EventRecord] = []
        self.ops: List[OpRecordModel] = []

    def load(self) -> "TraceLoader":
        """
        Parse every record.

        Raises:
            TraceFormatError: on a bad header, malformed record, or a missing
                or inconsistent trailer
        """
        try:
            text = self.path.read_text(encoding="utf-8")
        except OSError as exc:
            raise TraceFormatError(f"cannot read {self.path}: {exc}") from exc

        lines = text.splitlines()
        if not lines or lines[0].strip() != TRACE_HEADER:
            raise TraceFormatError(f"{self.path}: missing '{TRACE_HEADER}' header")

        end: Optional[EndRecord] = None
        for number, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            if end is not None:
                raise TraceFormatError(f"{self.path}:{number}: record after end trailer")
            record = self._parse(line, number)
            if isinstance(record, MetaRecord):
                if self.meta is not None:
                    raise TraceFormatError(f"{self.path}:{number}: second meta record")
                self.meta = record
            elif isinstance(record, EventRecord):
                self.events.append(record)
            elif isinstance(record, OpRecordModel):
                self.ops.append(record)
            else:
                end = record

        if self.meta is None:
            raise TraceFormatError(f"{self.path}: no meta record")
        if end is None:
            raise TraceFormatError(f"{self.path}: truncated, no end trailer")
        if end.events != len(self.events) or end.ops != len(self.ops):
            raise TraceFormatError(
                f"{self.path}: trailer counts {end.events} events/{end.ops} ops, "
                f"found {len(self.events)}/{len(self.ops)}"
            )
        logger.debug(f"loaded {self.path}: {len(self.events)} events, {len(self.ops)} ops")
        return self

    def _parse(self, line: str, number: int):
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"{self.path}:{number}: invalid JSON ({exc.msg})") from exc
        if not isinstance(data, dict) or data.get("record") not in _MODELS:
            raise TraceFormatError(f"{self.path}:{number}: unknown record")
        try:
            return _MODELS[data["record"]].model_validate(data)
        except ValidationError as exc:
            raise TraceFormatError(f"{self.path}:{number}: {exc.errors()[0]['msg']}") from exc

    def history(self) -> History:
        try:
            return History.of(OpRecord.from_wire(o.model_dump()) for o in self.ops)
        except (TypeError, ValueError) as exc:
            raise TraceFormatError(f"{self.path}: bad operation record ({exc})") from exc

    def config(self) -> Optional[SystemConfig]:
        if self.meta is None or self.meta.config is None:
            return None
        try:
            return SystemConfig(**self.meta.config.model_dump())
        except ConfigValidationError as exc:
            raise TraceFormatError(f"{self.path}: {exc}") from exc

    def trace(self) -> ExecutionTrace:
        """Rebuild the execution trace; server snapshots are not stored in files."""
        if self.meta is None or self.meta.content != "trace":
            raise TraceFormatError(f"{self.path}: not a trace file")
        cfg = self.config()
        if cfg is None or self.meta.protocol is None or self.meta.schedule is None:
            raise TraceFormatError(f"{self.path}: trace meta lacks protocol, config or schedule")
        get_protocol(self.meta.protocol)
        try:
            schedule = Schedule.from_wire(self.meta.schedule)
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceFormatError(f"{self.path}: bad schedule ({exc})") from exc
        events = [SimEvent(**e.model_dump(exclude={"record"})) for e in self.events]
        return ExecutionTrace(cfg=cfg, protocol=self.meta.protocol, schedule=schedule, events=events, history=self.history())


def import_trace(path: Union[str, Path]) -> ExecutionTrace:
    return TraceLoader(path).load().trace()


def import_history(path: Union[str, Path]) -> History:
    """Operation records of either a trace or a history file."""
    return TraceLoader(path).load().history()
