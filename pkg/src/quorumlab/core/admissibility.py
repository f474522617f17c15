"""
Admissibility

Decides whether a value collected by a fast read is returnable. A value v is
admissible at degree a when some set mu of read acknowledgements, all holding
v, has at least S - a*t members and the updated sets of v across mu share at
least a clients.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..exceptions import ProtocolInvariantError
from ..settings import get_settings
from .config import SystemConfig
from .values import Value

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReadAck:
    """A server's reply to a read: its full value vector."""

    server: int
    vector: Mapping[Value, FrozenSet[int]] = field(hash=False)

    def holds(self, value: Value) -> bool:
        return value in self.vector

    def updated(self, value: Value) -> FrozenSet[int]:
        return self.vector[value]

    def without(self, value: Value) -> "ReadAck":
        return ReadAck(self.server, {v: u for v, u in self.vector.items() if v != value})


@dataclass(frozen=True)
class AdmissibilityWitness:
    """Certificate that ``value`` is admissible at ``degree``."""

    value: Value
    degree: int
    mu: Tuple[ReadAck, ...]
    pi: FrozenSet[int]

    @property
    def servers(self) -> Tuple[int, ...]:
        return tuple(m.server for m in self.mu)

    def verify(self, cfg: SystemConfig) -> bool:
        """Re-check the three defining inequalities from scratch."""
        if not self.mu or len(self.mu) < cfg.S - self.degree * cfg.t:
            return False
        if not all(m.holds(self.value) for m in self.mu):
            return False
        common = frozenset.intersection(*(m.updated(self.value) for m in self.mu))
        return common == self.pi and len(common) >= self.degree


def _check_degree(a: int, cfg: SystemConfig):
    if not 1 <= a <= cfg.R + 1:
        raise ValueError(f"degree {a} outside [1, {cfg.R + 1}]")


def _holders(v: Value, msgs: Iterable[ReadAck]) -> List[ReadAck]:
    return sorted((m for m in msgs if m.holds(v)), key=lambda m: m.server)


def _required(a: int, cfg: SystemConfig) -> int:
    # mu is never empty, even when S - a*t drops to zero or below
    return max(cfg.S - a * cfg.t, 1)


def _witness_for(v: Value, a: int, mu: Sequence[ReadAck]) -> Optional[AdmissibilityWitness]:
    pi = frozenset.intersection(*(m.updated(v) for m in mu))
    if len(pi) >= a:
        return AdmissibilityWitness(value=v, degree=a, mu=tuple(mu), pi=pi)
    return None


def admissible(
    v: Value,
    msgs: Iterable[ReadAck],
    a: int,
    cfg: SystemConfig,
) -> Optional[AdmissibilityWitness]:
    """
    Decide admissibility of ``v`` at degree ``a``.

    Only subsets of the minimum allowed size are searched: growing mu can only
    shrink the intersection, so a witness exists iff one of minimum size does.
    Cross-validated against :func:`admissible_exhaustive`.

    Args:
        v: Candidate value
        msgs: Collected read acknowledgements
        a: Degree, in [1, R+1]
        cfg: System configuration

    Returns:
        A witness, or None when v is not admissible at degree a
    """
    _check_degree(a, cfg)
    holders = _holders(v, msgs)
    need = _required(a, cfg)
    if len(holders) < need:
        return None
    for mu in combinations(holders, need):
        witness = _witness_for(v, a, mu)
        if witness is not None:
            return witness
    return None


def admissible_exhaustive(
    v: Value,
    msgs: Iterable[ReadAck],
    a: int,
    cfg: SystemConfig,
) -> Optional[AdmissibilityWitness]:
    """Reference decision over every subset of ``msgs``; limited to small S."""
    _check_degree(a, cfg)
    cap = get_settings().admissibility_server_cap
    if cfg.S > cap:
        raise ValueError(f"exhaustive admissibility is capped at S <= {cap}, got S={cfg.S}")
    acks = sorted(msgs, key=lambda m: m.server)
    need = _required(a, cfg)
    for size in range(len(acks), need - 1, -1):
        for mu in combinations(acks, size):
            if not all(m.holds(v) for m in mu):
                continue
            witness = _witness_for(v, a, mu)
            if witness is not None:
                return witness
    return None


def max_admissible(
    msgs: Iterable[ReadAck],
    cfg: SystemConfig,
) -> Tuple[Value, AdmissibilityWitness]:
    """
    Pick the value a fast read returns.

    Takes the largest value present, tries degrees 1..R+1, and on failure
    removes that value from every acknowledgement before trying the next.

    Raises:
        ProtocolInvariantError: if no value present is admissible
    """
    acks = list(msgs)
    removed: List[Value] = []
    while True:
        present = {v for m in acks for v in m.vector}
        if not present:
            break
        candidate = max(present)
        for a in range(1, cfg.R + 2):
            witness = admissible(candidate, acks, a, cfg)
            if witness is not None:
                if removed:
                    logger.debug(f"skipped {len(removed)} inadmissible values before {candidate}")
                return candidate, witness
        removed.append(candidate)
        acks = [m.without(candidate) for m in acks]
    raise ProtocolInvariantError(
        f"no admissible value among acks from servers {sorted(m.server for m in acks)}; "
        f"removed {[str(v) for v in removed]}"
    )


def vector_from_wire(entries: Sequence[Sequence]) -> Dict[Value, FrozenSet[int]]:
    """Decode ``[[ts, wid], [clients...]]`` pairs into a value vector."""
    return {Value.from_wire(v): frozenset(int(c) for c in updated) for v, updated in entries}


def vector_to_wire(vector: Mapping[Value, FrozenSet[int]]) -> List[list]:
    return [[v.to_wire(), sorted(vector[v])] for v in sorted(vector)]
