"""
Simulation Engine

Discrete-event loop over a global logical clock. Requests travel from a
client to every server (unless skipped), replies travel back, and clients
act once a quorum of replies has arrived. Events run in (time, priority,
seq) order; crashes win ties so a server crashing at T processes nothing
at T.

Keyed slots are delivered at their server in increasing key order: a
request whose smaller keys are still outstanding is parked. If the queue
drains with requests parked, the one with the smallest (key, server) is
released out of order so the run can finish.
"""

import heapq
import itertools
import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any, Deque, Dict, List, Optional, Set, Tuple

from ..automata.base import Broadcast, OpIntent, OpResponse, ProtocolFamily
from ..core.config import SystemConfig
from ..histories.model import History, OpRecord
from .schedule import Schedule, SlotKey, validate_schedule

logger = logging.getLogger(__name__)

EVENT_KINDS = (
    "invoke",
    "send",
    "deliver",
    "reply",
    "stale",
    "respond",
    "skip",
    "crash",
    "lost",
    "park",
    "release",
)

_CRASH_PRIORITY = 0
_NORMAL_PRIORITY = 1


@dataclass(frozen=True)
class SimEvent:
    """One logged step; ``seq`` is its position in the log."""

    time: int
    seq: int
    kind: str
    src: Optional[int] = None
    dst: Optional[int] = None
    op: Optional[int] = None
    rt: Optional[int] = None
    payload: Optional[Dict[str, Any]] = None

    def to_wire(self) -> Dict[str, Any]:
        return {
            "time": self.time,
            "seq": self.seq,
            "kind": self.kind,
            "src": self.src,
            "dst": self.dst,
            "op": self.op,
            "rt": self.rt,
            "payload": self.payload,
        }


@dataclass
class ExecutionTrace:
    """Everything one run produced."""

    cfg: SystemConfig
    protocol: str
    schedule: Schedule
    events: List[SimEvent]
    history: History
    snapshots: Dict[int, List[Tuple[int, Dict[str, Any]]]] = field(default_factory=dict)
    final_states: Dict[int, Dict[str, Any]] = field(default_factory=dict)

    def events_of(self, kind: str) -> List[SimEvent]:
        return [e for e in self.events if e.kind == kind]

    def consumed_replies(self, client: int) -> List[SimEvent]:
        """Replies the client actually used, in arrival order."""
        return [e for e in self.events if e.kind == "deliver" and e.dst == client]

    def returns(self) -> Dict[int, Any]:
        return {o.op_id: o.value for o in self.history.ops if not o.pending}


@dataclass
class _Parked:
    key: int
    address: SlotKey
    client: int
    payload: Any


class Simulator:
    """
    Runs one schedule against one protocol.

    Args:
        cfg: System configuration
        protocol: Protocol family supplying the automata
        schedule: Validated schedule
        record_snapshots: Keep a server state snapshot after every delivery
    """

    def __init__(
        self,
        cfg: SystemConfig,
        protocol: ProtocolFamily,
        schedule: Schedule,
        record_snapshots: bool = True,
    ):
        validate_schedule(cfg, schedule)
        self.cfg = cfg
        self.protocol = protocol
        self.schedule = schedule
        self.record_snapshots = record_snapshots

        self.clients = {pid: protocol.make_client(pid, cfg) for pid in cfg.clients}
        self.servers = {pid: protocol.make_server(pid, cfg) for pid in cfg.servers}

        self.now = 0
        self.events: List[SimEvent] = []
        self.snapshots: Dict[int, List[Tuple[int, Dict[str, Any]]]] = defaultdict(list)
        self._queue: List[Tuple[int, int, int, str, Any]] = []
        self._tiebreak = itertools.count()

        self.crashed: Set[int] = set()
        self.keyed = {s: schedule.keyed_slots(s) for s in cfg.servers}
        self.settled: Set[SlotKey] = set()
        self.parked: Dict[int, List[_Parked]] = defaultdict(list)

        self.deferred: Dict[int, Deque[OpIntent]] = defaultdict(deque)
        self.started: Dict[int, Tuple[OpIntent, int]] = {}
        self.responses: Dict[int, Tuple[int, OpResponse]] = {}
        self.rt_used: Dict[int, int] = {}

    def _push(self, time: int, action: str, data: Any, priority: int = _NORMAL_PRIORITY):
        heapq.heappush(self._queue, (time, priority, next(self._tiebreak), action, data))

    def _log(self, kind: str, **fields) -> SimEvent:
        event = SimEvent(time=self.now, seq=len(self.events), kind=kind, **fields)
        self.events.append(event)
        return event

    def run(self) -> ExecutionTrace:
        self._retire_undeclared()
        for intent in self.schedule.workload:
            self._push(intent.invoke_at, "invoke", intent)
        for server, at in sorted(self.schedule.crashes.items()):
            self._push(at, "crash", server, priority=_CRASH_PRIORITY)

        while True:
            while self._queue:
                time, _, _, action, data = heapq.heappop(self._queue)
                self.now = time
                getattr(self, f"_on_{action}")(data)
            if not self._release_one():
                break

        return ExecutionTrace(
            cfg=self.cfg,
            protocol=self.protocol.name,
            schedule=self.schedule,
            events=self.events,
            history=self._history(),
            snapshots=dict(self.snapshots),
            final_states={pid: s.snapshot() for pid, s in self.servers.items()},
        )

    # -- slot bookkeeping -------------------------------------------------

    def _retire_undeclared(self):
        for server, keyed in self.keyed.items():
            for _, (op, rt, srv) in keyed:
                if rt > self.protocol.round_trips(self.schedule.op(op).kind):
                    self.settled.add((op, rt, srv))

    def _blocked(self, server: int, key: int) -> bool:
        for other, address in self.keyed[server]:
            if other >= key:
                return False
            if address not in self.settled:
                return True
        return False

    def _settle(self, address: SlotKey):
        if address not in self.settled:
            self.settled.add(address)
            self._unpark(address[2])

    def _unpark(self, server: int):
        while True:
            ready = [p for p in self.parked[server] if not self._blocked(server, p.key)]
            if not ready:
                return
            entry = min(ready, key=lambda p: p.key)
            self.parked[server].remove(entry)
            self._deliver(entry.client, entry.address, entry.payload)

    def _release_one(self) -> bool:
        waiting = [(p.key, server, p) for server, ps in self.parked.items() for p in ps]
        if not waiting:
            return False
        key, server, entry = min(waiting, key=lambda w: (w[0], w[1]))
        op, rt, _ = entry.address
        logger.warning(f"queue drained with {len(waiting)} parked requests; releasing op {op} rt {rt} key {key} at server {server}")
        self.parked[server].remove(entry)
        self._log("release", src=entry.client, dst=server, op=op, rt=rt, payload={"key": key})
        self._deliver(entry.client, entry.address, entry.payload)
        return True

    # -- event handlers ---------------------------------------------------

    def _on_invoke(self, intent: OpIntent):
        client = self.clients[intent.client]
        if client.busy or self.deferred[intent.client]:
            logger.debug(f"deferring op {intent.op_id}: client {intent.client} is busy")
            self.deferred[intent.client].append(intent)
            return
        self._start(intent)

    def _on_resume(self, pid: int):
        if not self.clients[pid].busy and self.deferred[pid]:
            self._start(self.deferred[pid].popleft())

    def _start(self, intent: OpIntent):
        self.started[intent.op_id] = (intent, self.now)
        self._log("invoke", src=intent.client, op=intent.op_id, payload={"kind": intent.kind})
        self._broadcast(intent.client, self.clients[intent.client].invoke(intent))

    def _broadcast(self, client: int, b: Broadcast):
        self.rt_used[b.op_id] = b.rt
        wire = b.payload.to_wire()
        for server in self.cfg.servers:
            slot = self.schedule.slot(b.op_id, b.rt, server)
            if slot.skip:
                self._log("skip", src=client, dst=server, op=b.op_id, rt=b.rt)
                continue
            self._log("send", src=client, dst=server, op=b.op_id, rt=b.rt, payload=wire)
            self._push(self.now + slot.delay, "arrive", (client, (b.op_id, b.rt, server), b.payload))

    def _on_arrive(self, data):
        client, address, payload = data
        op, rt, server = address
        if server in self.crashed:
            self._log("lost", src=client, dst=server, op=op, rt=rt, payload=payload.to_wire())
            self._settle(address)
            return
        slot = self.schedule.slot(*address)
        if slot.key is not None and self._blocked(server, slot.key):
            logger.debug(f"parking op {op} rt {rt} at server {server} behind key {slot.key}")
            self._log("park", src=client, dst=server, op=op, rt=rt, payload={"key": slot.key})
            self.parked[server].append(_Parked(slot.key, address, client, payload))
            return
        self._deliver(client, address, payload)

    def _deliver(self, client: int, address: SlotKey, payload: Any):
        op, rt, server = address
        self._log("deliver", src=client, dst=server, op=op, rt=rt, payload=payload.to_wire())
        reply = self.servers[server].on_request(client, payload)
        if self.record_snapshots:
            self.snapshots[server].append((len(self.events) - 1, self.servers[server].snapshot()))
        self._log("reply", src=server, dst=client, op=op, rt=rt, payload=reply.to_wire())
        slot = self.schedule.slot(*address)
        self._push(self.now + slot.reply_delay, "reply", (server, client, op, rt, reply))
        self._settle(address)

    def _on_reply(self, data):
        server, pid, op, rt, reply = data
        step = self.clients[pid].on_reply(server, op, rt, reply)
        if not step.consumed:
            self._log("stale", src=server, dst=pid, op=op, rt=rt, payload=reply.to_wire())
            return
        self._log("deliver", src=server, dst=pid, op=op, rt=rt, payload=reply.to_wire())
        if step.broadcast is not None:
            self._broadcast(pid, step.broadcast)
        if step.response is not None:
            self._respond(pid, step.response)

    def _respond(self, pid: int, response: OpResponse):
        self.responses[response.op_id] = (self.now, response)
        self._log(
            "respond",
            src=pid,
            op=response.op_id,
            rt=response.round_trips,
            payload={"value": response.value.to_wire(), "round_trips": response.round_trips},
        )
        for server, keyed in self.keyed.items():
            for _, address in keyed:
                if address[0] == response.op_id and address[1] > response.round_trips:
                    self._settle(address)
        if self.deferred[pid]:
            self._push(self.now + 1, "resume", pid)

    def _on_crash(self, server: int):
        logger.debug(f"server {server} crashes at {self.now}")
        self.crashed.add(server)
        self._log("crash", src=server)
        for entry in self.parked.pop(server, []):
            op, rt, _ = entry.address
            self._log("lost", src=entry.client, dst=server, op=op, rt=rt, payload=entry.payload.to_wire())
        for _, address in self.keyed[server]:
            self.settled.add(address)

    # -- results ----------------------------------------------------------

    def _history(self) -> History:
        records = []
        for op_id, (intent, invoked) in self.started.items():
            client = self.clients[intent.client]
            if op_id in self.responses:
                at, response = self.responses[op_id]
                value, end = response.value, at
            else:
                value = client.pending_value if client.op is not None and client.op.op_id == op_id else None
                end = None
            records.append(
                OpRecord(
                    op_id=op_id,
                    client=intent.client,
                    kind=intent.kind,
                    value=value,
                    invoke=invoked,
                    response=end,
                    round_trips=self.rt_used.get(op_id, 0),
                )
            )
        return History.of(records)


def run(
    cfg: SystemConfig,
    protocol: ProtocolFamily,
    schedule: Schedule,
    record_snapshots: bool = True,
) -> ExecutionTrace:
    """Execute ``schedule`` deterministically and return the full trace."""
    return Simulator(cfg, protocol, schedule, record_snapshots=record_snapshots).run()
