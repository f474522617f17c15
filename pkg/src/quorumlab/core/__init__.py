"""
Register Core

Value domain, system configuration, feasibility predicates and the
admissibility test used by fast reads.
"""

from .admissibility import (
    AdmissibilityWitness,
    ReadAck,
    admissible,
    admissible_exhaustive,
    max_admissible,
)
from .config import SystemConfig, feasible_w2r1, feasible_w2r2
from .values import BOTTOM, Ordering, Value, value_compare

__all__ = [
    "AdmissibilityWitness",
    "BOTTOM",
    "Ordering",
    "ReadAck",
    "SystemConfig",
    "Value",
    "admissible",
    "admissible_exhaustive",
    "feasible_w2r1",
    "feasible_w2r2",
    "max_admissible",
    "value_compare",
]
