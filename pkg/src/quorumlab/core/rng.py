"""Seeded random streams: PCG64 over SeedSequence([seed, stream])."""

import numpy as np

WORKLOAD_STREAM = 0
SCHEDULE_STREAM = 1
HISTORY_STREAM = 2


def make_rng(seed: int, stream: int) -> np.random.Generator:
    """PCG64 generator for one named stream of an experiment seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))
