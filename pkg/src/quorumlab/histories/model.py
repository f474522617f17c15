"""
History Model

Operation records with invocation/response instants. A pending operation has
no response; a pending write may still carry the value it was sending.
"""

from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from ..automata.base import OP_KINDS, READ, WRITE
from ..core.values import Value
from ..exceptions import HistoryValidationError


@dataclass(frozen=True)
class OpRecord:
    op_id: int
    client: int
    kind: str
    value: Optional[Value]
    invoke: int
    response: Optional[int] = None
    round_trips: int = 0

    @property
    def pending(self) -> bool:
        return self.response is None

    @property
    def is_write(self) -> bool:
        return self.kind == WRITE

    @property
    def is_read(self) -> bool:
        return self.kind == READ

    def precedes(self, other: "OpRecord") -> bool:
        """Real-time order: self responded strictly before other was invoked."""
        return self.response is not None and self.response < other.invoke

    def concurrent(self, other: "OpRecord") -> bool:
        return not self.precedes(other) and not other.precedes(self)

    def label(self) -> str:
        value = "?" if self.value is None else str(self.value)
        end = "pending" if self.pending else str(self.response)
        return f"op{self.op_id}:{self.kind}{value}[{self.invoke},{end}]"

    def to_wire(self) -> Dict[str, Any]:
        return {
            "op": self.op_id,
            "client": self.client,
            "kind": self.kind,
            "value": None if self.value is None else self.value.to_wire(),
            "invoke": self.invoke,
            "response": self.response,
            "round_trips": self.round_trips,
        }

    @classmethod
    def from_wire(cls, data: Mapping[str, Any]) -> "OpRecord":
        value = data.get("value")
        return cls(
            op_id=int(data["op"]),
            client=int(data["client"]),
            kind=str(data["kind"]),
            value=None if value is None else Value.from_wire(value),
            invoke=int(data["invoke"]),
            response=None if data.get("response") is None else int(data["response"]),
            round_trips=int(data.get("round_trips", 0)),
        )


@dataclass(frozen=True)
class History:
    ops: Tuple[OpRecord, ...] = ()

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    @property
    def writes(self) -> List[OpRecord]:
        return [o for o in self.ops if o.is_write]

    @property
    def reads(self) -> List[OpRecord]:
        return [o for o in self.ops if o.is_read]

    @property
    def completed(self) -> List[OpRecord]:
        return [o for o in self.ops if not o.pending]

    def by_id(self) -> Dict[int, OpRecord]:
        return {o.op_id: o for o in self.ops}

    def by_client(self) -> Dict[int, List[OpRecord]]:
        grouped: Dict[int, List[OpRecord]] = defaultdict(list)
        for o in sorted(self.ops, key=lambda o: (o.invoke, o.op_id)):
            grouped[o.client].append(o)
        return dict(grouped)

    def single_writer(self) -> bool:
        return len({o.client for o in self.writes}) <= 1

    @classmethod
    def of(cls, ops: Iterable[OpRecord]) -> "History":
        return cls(tuple(sorted(ops, key=lambda o: o.op_id)))


def check_wellformed(h: History) -> bool:
    """True iff no client has two overlapping operations of its own."""
    for ops in h.by_client().values():
        for prev, nxt in zip(ops, ops[1:]):
            if not prev.precedes(nxt):
                return False
    return True


def validate_history(h: History) -> None:
    """
    Check the preconditions of the atomicity and MWA checkers.

    Raises:
        HistoryValidationError: on duplicate ids, unknown kinds, inverted
            intervals, completed reads or writes without a value, writes of the
            initial value, duplicate written values, or overlapping operations
            of one client
    """
    seen = set()
    for o in h.ops:
        if o.op_id in seen:
            raise HistoryValidationError(f"duplicate op id {o.op_id}")
        seen.add(o.op_id)
        if o.kind not in OP_KINDS:
            raise HistoryValidationError(f"op {o.op_id}: unknown kind {o.kind!r}")
        if o.response is not None and o.response <= o.invoke:
            raise HistoryValidationError(f"op {o.op_id}: response {o.response} not after invoke {o.invoke}")
        if not o.pending and o.value is None:
            raise HistoryValidationError(f"op {o.op_id}: completed {o.kind} without a value")
        if o.is_write and o.value is not None and o.value.is_initial:
            raise HistoryValidationError(f"op {o.op_id}: writes the initial value")

    written = [o.value for o in h.writes if o.value is not None]
    if len(set(written)) != len(written):
        raise HistoryValidationError("written values are not pairwise distinct")
    if not check_wellformed(h):
        raise HistoryValidationError("history is not well-formed: a client overlaps its own operations")
