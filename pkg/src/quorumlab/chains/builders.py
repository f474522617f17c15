"""
Chain Builders

Chain alpha: two sequential writes W1 then W2, then a read R1. Element i
delivers W2 before W1 on servers s_1..s_i, so neighbours differ on exactly
one server. Chain beta extends one alpha element with a second read R2 whose
round-trips interleave with R1's as R1(1), R2(1), R1(2), R2(2); element j
delivers R2(2) before R1(2) on s_1..s_j.

Delivery order is fixed through slot keys. Orderings are exact for
protocols with one-round-trip writes; with two-round-trip writes a swapped
server stalls W1 until W2 arrives and may need forced releases.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

from ..automata.base import READ, WRITE, OpIntent
from ..core.config import SystemConfig
from ..simnet.schedule import SKIP, Schedule, Slot, SlotKey

logger = logging.getLogger(__name__)

ALPHA = "alpha"
BETA = "beta"
PRIME = "prime"
DOUBLEPRIME = "doubleprime"

W1, W2, R1, R2 = 0, 1, 2, 3
W1_AT, W2_AT, R1_AT, R2_AT = 0, 100, 200, 201

_WRITE_KEYS = {W1: (10, 11), W2: (20, 21)}
_R1_ALPHA_KEYS = (30, 31)
_BETA_KEYS = {(R1, 1): 30, (R2, 1): 31, (R1, 2): 32, (R2, 2): 33}


@dataclass
class ChainSpec:
    """A family of schedules over one configuration."""

    family: str
    cfg: SystemConfig
    elements: List[Schedule]
    base_index: int = 0
    variant: str = ""
    skip_critical: bool = False
    critical: int = 0

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, index: int) -> Schedule:
        return self.elements[index]

    def __iter__(self) -> Iterator[Schedule]:
        return iter(self.elements)

    @property
    def name(self) -> str:
        if self.family == ALPHA:
            return ALPHA
        suffix = "-skip" if self.skip_critical else ""
        return f"beta-{self.variant}{suffix}"


def chain_config(S: int, t: int = 1) -> SystemConfig:
    """Two writers, two readers, S servers."""
    if S < 3:
        raise ValueError(f"chains need S >= 3, got S={S}")
    return SystemConfig(S=S, W=2, R=2, t=t)


def _alpha_workload(cfg: SystemConfig) -> Tuple[OpIntent, ...]:
    return (
        OpIntent(W1, cfg.writers[0], WRITE, W1_AT),
        OpIntent(W2, cfg.writers[1], WRITE, W2_AT),
        OpIntent(R1, cfg.readers[0], READ, R1_AT),
    )


def alpha_element(cfg: SystemConfig, i: int) -> Schedule:
    """Element i of chain alpha: writes swapped on s_1..s_i."""
    plan: Dict[SlotKey, Slot] = {}
    for index in range(1, cfg.S + 1):
        server = cfg.server(index)
        first, second = (W2, W1) if index <= i else (W1, W2)
        for op, keys in ((first, _WRITE_KEYS[W1]), (second, _WRITE_KEYS[W2])):
            for rt, key in enumerate(keys, start=1):
                plan[(op, rt, server)] = Slot(key=key)
        for rt, key in enumerate(_R1_ALPHA_KEYS, start=1):
            plan[(R1, rt, server)] = Slot(key=key)
    return Schedule(workload=_alpha_workload(cfg), plan=plan)


def build_chain_alpha(S: int, t: int = 1) -> ChainSpec:
    """
    Build chain alpha over S servers.

    Returns:
        ChainSpec with S + 1 schedules

    Raises:
        ValueError: if S < 3
    """
    cfg = chain_config(S, t)
    elements = [alpha_element(cfg, i) for i in range(S + 1)]
    logger.info(f"built chain alpha with {len(elements)} elements for S={S}, t={t}")
    return ChainSpec(family=ALPHA, cfg=cfg, elements=elements)


def _extend_with_second_read(cfg: SystemConfig, base: Schedule, j: int, critical: int, skip_critical: bool) -> Schedule:
    workload = tuple(o for o in base.workload if o.op_id != R1) + (
        OpIntent(R1, cfg.readers[0], READ, R1_AT),
        OpIntent(R2, cfg.readers[1], READ, R2_AT),
    )
    plan = {address: slot for address, slot in base.plan.items() if address[0] != R1}
    for index in range(1, cfg.S + 1):
        server = cfg.server(index)
        keys = dict(_BETA_KEYS)
        if index <= j:
            keys[(R1, 2)], keys[(R2, 2)] = keys[(R2, 2)], keys[(R1, 2)]
        for (op, rt), key in keys.items():
            plan[(op, rt, server)] = Slot(key=key)
        if skip_critical and index == critical:
            plan[(R2, 1, server)] = SKIP
            plan[(R2, 2, server)] = SKIP
    return Schedule(workload=workload, plan=plan, crashes=dict(base.crashes))


def build_chain_beta(
    cfg: SystemConfig,
    alpha_pair: Tuple[Schedule, Schedule],
    i1: int,
    variant: str = PRIME,
    skip_critical: bool = False,
) -> ChainSpec:
    """
    Build chain beta' (from alpha_{i1-1}) or beta'' (from alpha_{i1}).

    Args:
        cfg: Chain configuration (needs two readers)
        alpha_pair: (alpha_{i1-1}, alpha_{i1})
        i1: Critical index, in [1, S]
        variant: "prime" or "doubleprime"
        skip_critical: Let both round-trips of R2 skip s_{i1}

    Returns:
        ChainSpec with S + 1 schedules

    Raises:
        ValueError: on a bad index, variant or reader count
    """
    if not 1 <= i1 <= cfg.S:
        raise ValueError(f"critical index {i1} outside [1, {cfg.S}]")
    if variant not in (PRIME, DOUBLEPRIME):
        raise ValueError(f"variant must be {PRIME!r} or {DOUBLEPRIME!r}, got {variant!r}")
    if cfg.R < 2:
        raise ValueError("chain beta needs two readers")
    base = alpha_pair[0] if variant == PRIME else alpha_pair[1]
    elements = [_extend_with_second_read(cfg, base, j, i1, skip_critical) for j in range(cfg.S + 1)]
    spec = ChainSpec(
        family=BETA,
        cfg=cfg,
        elements=elements,
        base_index=i1 - 1 if variant == PRIME else i1,
        variant=variant,
        skip_critical=skip_critical,
        critical=i1,
    )
    logger.info(f"built chain {spec.name} on alpha_{spec.base_index}")
    return spec
