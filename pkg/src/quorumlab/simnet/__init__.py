"""
Simulated Network

Modules:
- schedule: workloads, delivery plans, crash plans, random generators
- engine: discrete-event simulator and execution traces
- diagnostics: round-trip accounting, crucial information, state diffs
- trace_io: "quorumlab-trace v1" files
"""

from .diagnostics import (
    crucial_info,
    planned_crucial_info,
    read_timestamp_gaps,
    round_trip_counts,
    round_trip_summary,
    server_state_diff,
)
from .engine import ExecutionTrace, SimEvent, Simulator, run
from .schedule import (
    SKIP,
    OpIntent,
    Schedule,
    Slot,
    parse_workload,
    random_schedule,
    random_workload,
    validate_schedule,
)
