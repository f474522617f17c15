"""Shared fixtures."""

import pytest

from src.quorumlab.automata.base import READ, WRITE, OpIntent
from src.quorumlab.core.config import SystemConfig
from src.quorumlab.simnet.schedule import Schedule


@pytest.fixture
def cfg5() -> SystemConfig:
    """S=5, two writers, two readers, one crash."""
    return SystemConfig(S=5, W=2, R=2, t=1)


@pytest.fixture
def write_then_read(cfg5) -> Schedule:
    """w0 writes at 0, r0 reads at 20, unit delays everywhere."""
    workload = (
        OpIntent(0, cfg5.writers[0], WRITE, 0),
        OpIntent(1, cfg5.readers[0], READ, 20),
    )
    return Schedule(workload=workload)
