"""
Schedules

A schedule fixes everything the adversary controls: the workload, the
delivery plan for every (operation, round-trip, server) slot, and which
servers crash when. Slots left out of the plan use unit delays.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..automata.base import OP_KINDS, READ, WRITE, OpIntent
from ..core.config import SystemConfig
from ..core.rng import SCHEDULE_STREAM, WORKLOAD_STREAM, make_rng
from ..exceptions import ConfigValidationError, ScheduleValidationError

logger = logging.getLogger(__name__)

SlotKey = Tuple[int, int, int]


@dataclass(frozen=True)
class Slot:
    """Delivery plan for one request and its reply."""

    delay: int = 1
    reply_delay: int = 1
    key: Optional[int] = None
    skip: bool = False

    def to_wire(self) -> Dict[str, Any]:
        return {"delay": self.delay, "reply_delay": self.reply_delay, "key": self.key, "skip": self.skip}


SKIP = Slot(skip=True)
DEFAULT_SLOT = Slot()


@dataclass
class Schedule:
    """Workload, delivery plan keyed by (op id, round-trip, server pid), crash plan."""

    workload: Tuple[OpIntent, ...]
    plan: Dict[SlotKey, Slot] = field(default_factory=dict)
    crashes: Dict[int, int] = field(default_factory=dict)

    def slot(self, op_id: int, rt: int, server: int) -> Slot:
        return self.plan.get((op_id, rt, server), DEFAULT_SLOT)

    def op(self, op_id: int) -> OpIntent:
        for intent in self.workload:
            if intent.op_id == op_id:
                return intent
        raise KeyError(op_id)

    def keyed_slots(self, server: int) -> List[Tuple[int, SlotKey]]:
        """(key, slot address) for every keyed, non-skipped slot at ``server``, by key."""
        return sorted(
            (slot.key, address)
            for address, slot in self.plan.items()
            if address[2] == server and slot.key is not None and not slot.skip
        )

    def to_wire(self) -> Dict[str, Any]:
        return {
            "workload": [[o.op_id, o.client, o.kind, o.invoke_at] for o in self.workload],
            "plan": [
                [op, rt, server, s.delay, s.reply_delay, s.key, s.skip]
                for (op, rt, server), s in sorted(self.plan.items())
            ],
            "crashes": [[server, at] for server, at in sorted(self.crashes.items())],
        }

    @classmethod
    def from_wire(cls, data: Mapping[str, Any]) -> "Schedule":
        workload = tuple(OpIntent(int(o), int(c), str(k), int(at)) for o, c, k, at in data["workload"])
        plan = {
            (int(op), int(rt), int(server)): Slot(int(d), int(rd), None if key is None else int(key), bool(skip))
            for op, rt, server, d, rd, key, skip in data["plan"]
        }
        crashes = {int(server): int(at) for server, at in data["crashes"]}
        return cls(workload=workload, plan=plan, crashes=crashes)


def validate_schedule(cfg: SystemConfig, schedule: Schedule) -> None:
    """
    Check a schedule against a configuration.

    Raises:
        ScheduleValidationError: on unknown ids, bad kinds, bad delays or too many crashes
    """
    op_ids = [o.op_id for o in schedule.workload]
    if len(set(op_ids)) != len(op_ids):
        raise ScheduleValidationError("duplicate operation ids in workload")
    for o in schedule.workload:
        if o.kind == WRITE and not cfg.is_writer(o.client):
            raise ScheduleValidationError(f"op {o.op_id}: write by non-writer {o.client}")
        if o.kind == READ and not cfg.is_reader(o.client):
            raise ScheduleValidationError(f"op {o.op_id}: read by non-reader {o.client}")
        if o.invoke_at < 0:
            raise ScheduleValidationError(f"op {o.op_id}: negative invoke time {o.invoke_at}")

    known = set(op_ids)
    for (op, rt, server), slot in schedule.plan.items():
        if op not in known:
            raise ScheduleValidationError(f"plan entry for unknown op {op}")
        if rt < 1:
            raise ScheduleValidationError(f"op {op}: round-trip index {rt} < 1")
        if not cfg.is_server(server):
            raise ScheduleValidationError(f"op {op}: {server} is not a server")
        if slot.delay < 1 or slot.reply_delay < 1:
            raise ScheduleValidationError(f"op {op} rt {rt} server {server}: delays must be >= 1")

    if len(schedule.crashes) > cfg.t:
        raise ScheduleValidationError(f"{len(schedule.crashes)} crashes exceed tolerance t={cfg.t}")
    for server, at in schedule.crashes.items():
        if not cfg.is_server(server):
            raise ScheduleValidationError(f"crash of non-server {server}")
        if at < 0:
            raise ScheduleValidationError(f"server {server}: negative crash time {at}")


def random_workload(
    cfg: SystemConfig,
    seed: int,
    n_ops: int = 10,
    write_ratio: float = 0.5,
    spacing: int = 3,
) -> Tuple[OpIntent, ...]:
    """Random mix of reads and writes with invocation gaps drawn from [0, spacing]."""
    rng = make_rng(seed, WORKLOAD_STREAM)
    workload: List[OpIntent] = []
    now = 0
    for op_id in range(n_ops):
        if rng.random() < write_ratio:
            kind, client = WRITE, int(rng.choice(list(cfg.writers)))
        else:
            kind, client = READ, int(rng.choice(list(cfg.readers)))
        workload.append(OpIntent(op_id, client, kind, now))
        now += int(rng.integers(0, spacing + 1))
    return tuple(workload)


def random_schedule(
    cfg: SystemConfig,
    workload: Sequence[OpIntent],
    seed: int,
    max_delay: int = 6,
    skip_probability: float = 0.1,
    max_crashes: Optional[int] = None,
    round_trips: int = 2,
) -> Schedule:
    """
    Pseudorandom delays, skips and crashes.

    At most ``max_crashes`` (default t) servers crash during the workload's
    span, and each round-trip skips at most t - |crashed| servers, so every
    round-trip can still reach S - t live servers.
    """
    rng = make_rng(seed, SCHEDULE_STREAM)
    limit = cfg.t if max_crashes is None else min(max_crashes, cfg.t)
    servers = list(cfg.servers)
    span = max((o.invoke_at for o in workload), default=0) + 2 * round_trips * max_delay

    n_crashes = int(rng.integers(0, limit + 1)) if limit > 0 else 0
    crashed = sorted(int(s) for s in rng.choice(servers, size=n_crashes, replace=False)) if n_crashes else []
    crashes = {s: int(rng.integers(0, span + 1)) for s in crashed}

    skip_budget = cfg.t - len(crashed)
    plan: Dict[SlotKey, Slot] = {}
    for o in workload:
        for rt in range(1, round_trips + 1):
            skips = 0
            for server in servers:
                if skips < skip_budget and rng.random() < skip_probability:
                    plan[(o.op_id, rt, server)] = SKIP
                    skips += 1
                    continue
                delay = int(rng.integers(1, max_delay + 1))
                reply_delay = int(rng.integers(1, max_delay + 1))
                plan[(o.op_id, rt, server)] = Slot(delay=delay, reply_delay=reply_delay)
    return Schedule(workload=tuple(workload), plan=plan, crashes=crashes)


_OP_PATTERN = re.compile(r"^\s*([wrs]\d+)\s*:\s*(read|write)\s*@\s*(\d+)\s*$")


def parse_workload(text: str, cfg: SystemConfig) -> Tuple[OpIntent, ...]:
    """
    Parse ``w0:write@0; r0:read@5`` into intents numbered by position.

    Raises:
        ConfigValidationError: on malformed entries or labels absent from cfg
    """
    workload: List[OpIntent] = []
    for entry in (e for e in text.split(";") if e.strip()):
        match = _OP_PATTERN.match(entry)
        if not match:
            raise ConfigValidationError(f"bad workload entry {entry.strip()!r}; expected e.g. 'w0:write@0'")
        label, kind, at = match.groups()
        try:
            client = cfg.parse_label(label)
        except ValueError as exc:
            raise ConfigValidationError(str(exc)) from exc
        if (kind == WRITE) != cfg.is_writer(client) or cfg.is_server(client):
            raise ConfigValidationError(f"{label} cannot {kind}")
        workload.append(OpIntent(len(workload), client, kind, int(at)))
    return tuple(workload)


def format_workload(workload: Iterable[OpIntent], cfg: SystemConfig) -> str:
    return "; ".join(f"{cfg.label(o.client)}:{o.kind}@{o.invoke_at}" for o in workload)


__all__ = [
    "OP_KINDS",
    "OpIntent",
    "SKIP",
    "Schedule",
    "Slot",
    "format_workload",
    "make_rng",
    "parse_workload",
    "random_schedule",
    "random_workload",
    "validate_schedule",
]
