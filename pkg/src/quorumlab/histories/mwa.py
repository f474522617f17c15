"""
MWA Properties

Pairwise checks that together imply atomicity for timestamp-ordered values:

- MWA0: a write that precedes another writes a smaller value
- MWA1: a read returns a nonnegative timestamp proposed by some writer
- MWA2: a read that follows a write returns at least that write's value
- MWA3: a read does not precede the write of the value it returns
- MWA4: a read that follows another read returns at least the earlier value
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .model import History

PROPERTIES = ("MWA0", "MWA1", "MWA2", "MWA3", "MWA4")


@dataclass(frozen=True)
class MWAViolation:
    prop: str
    ops: Tuple[int, ...]
    detail: str

    def to_dict(self) -> Dict:
        return {"property": self.prop, "ops": list(self.ops), "detail": self.detail}


@dataclass
class MWAReport:
    violations: List[MWAViolation] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations

    def counts(self) -> Dict[str, int]:
        tally = Counter(v.prop for v in self.violations)
        return {p: tally.get(p, 0) for p in PROPERTIES}

    def of(self, prop: str) -> List[MWAViolation]:
        return [v for v in self.violations if v.prop == prop]

    def to_dict(self) -> Dict:
        return {"clean": self.clean, "counts": self.counts(), "violations": [v.to_dict() for v in self.violations]}


def check_mwa(h: History) -> MWAReport:
    """Evaluate MWA0..MWA4 over every applicable pair of operations."""
    report = MWAReport()
    writes = [o for o in h.writes if o.value is not None]
    reads = [o for o in h.reads if not o.pending]
    written = {o.value: o for o in writes}

    def flag(prop: str, ops, detail: str):
        report.violations.append(MWAViolation(prop, tuple(ops), detail))

    for wr in writes:
        for wr2 in writes:
            if wr.precedes(wr2) and not wr.value < wr2.value:
                flag("MWA0", (wr.op_id, wr2.op_id), f"{wr.value} precedes {wr2.value} but is not smaller")

    for rd in reads:
        v = rd.value
        if v.ts < 0:
            flag("MWA1", (rd.op_id,), f"returned negative timestamp {v.ts}")
        elif not v.is_initial and v not in written:
            flag("MWA1", (rd.op_id,), f"returned {v}, which no writer proposed")

        for wr in writes:
            if wr.precedes(rd) and v < wr.value:
                flag("MWA2", (wr.op_id, rd.op_id), f"returned {v} after {wr.value} completed")

        source = written.get(v)
        if source is not None and rd.precedes(source):
            flag("MWA3", (rd.op_id, source.op_id), f"returned {v} before its write was invoked")

        for rd1 in reads:
            if rd1.precedes(rd) and v < rd1.value:
                flag("MWA4", (rd1.op_id, rd.op_id), f"returned {v} after an earlier read returned {rd1.value}")

    return report
