"""
Register Values

A value is a (timestamp, writer id) pair. Writer id ``None`` stands for the
bottom writer that owns the initial value (0, ⊥); it sorts below every
integer writer id.
"""

from dataclasses import dataclass
from enum import Enum
from functools import total_ordering
from typing import Any, List, Optional, Sequence, Tuple

BOTTOM: Optional[int] = None


class Ordering(Enum):
    """Result of comparing two values."""

    LESS = -1
    EQUAL = 0
    GREATER = 1


def _writer_key(wid: Optional[int]) -> Tuple[int, int]:
    return (0, 0) if wid is None else (1, wid)


@total_ordering
@dataclass(frozen=True)
class Value:
    """A written datum: timestamp plus the id of the writer that proposed it."""

    ts: int
    wid: Optional[int] = BOTTOM

    @classmethod
    def initial(cls) -> "Value":
        return cls(0, BOTTOM)

    @property
    def is_initial(self) -> bool:
        return self.ts == 0 and self.wid is None

    def sort_key(self) -> Tuple[int, Tuple[int, int]]:
        return (self.ts, _writer_key(self.wid))

    def __lt__(self, other: Any) -> bool:
        if not isinstance(other, Value):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        writer = "⊥" if self.wid is None else f"w{self.wid}"
        return f"({self.ts},{writer})"

    def to_wire(self) -> List[Optional[int]]:
        return [self.ts, self.wid]

    @classmethod
    def from_wire(cls, data: Sequence[Optional[int]]) -> "Value":
        ts, wid = data
        return cls(int(ts), None if wid is None else int(wid))


def value_compare(v1: Value, v2: Value) -> Ordering:
    """
    Compare two values lexicographically on (ts, writer id).

    Args:
        v1: Left value
        v2: Right value

    Returns:
        Ordering of v1 relative to v2
    """
    if v1 == v2:
        return Ordering.EQUAL
    return Ordering.LESS if v1 < v2 else Ordering.GREATER
