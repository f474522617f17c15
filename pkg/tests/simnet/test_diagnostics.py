import pytest

from src.quorumlab.automata.base import READ, WRITE, OpIntent
from src.quorumlab.automata.naive import NAIVE_W1R2
from src.quorumlab.automata.w2r1 import W2R1
from src.quorumlab.core.config import SystemConfig
from src.quorumlab.core.values import Value
from src.quorumlab.exceptions import DiagnosticError
from src.quorumlab.simnet.diagnostics import (
    crucial_info,
    read_timestamp_gaps,
    round_trip_counts,
    round_trip_summary,
    server_state_diff,
)
from src.quorumlab.simnet.engine import run
from src.quorumlab.simnet.schedule import Schedule, random_schedule, random_workload


class TestRoundTrips:
    def test_counts_follow_protocol(self, cfg5, write_then_read):
        assert round_trip_counts(run(cfg5, W2R1, write_then_read)) == {0: 2, 1: 1}
        assert round_trip_counts(run(cfg5, NAIVE_W1R2, write_then_read)) == {0: 1, 1: 2}

    def test_summary_table(self, cfg5):
        workload = random_workload(cfg5, 4, n_ops=12)
        trace = run(cfg5, W2R1, random_schedule(cfg5, workload, 4))
        summary = round_trip_summary(trace)
        assert list(summary.columns) == ["count", "min", "max"]
        if "read" in summary.index:
            assert summary.loc["read", "min"] == summary.loc["read", "max"] == 1
        if "write" in summary.index:
            assert summary.loc["write", "min"] == summary.loc["write", "max"] == 2
        assert summary["count"].sum() == len(trace.history.completed)

    def test_summary_of_empty_trace(self, cfg5):
        assert round_trip_summary(run(cfg5, W2R1, Schedule(workload=()))).empty


class TestCrucialInfo:
    def test_needs_two_writes(self, cfg5, write_then_read):
        trace = run(cfg5, W2R1, write_then_read)
        with pytest.raises(DiagnosticError):
            crucial_info(trace, cfg5.server(1))


class TestServerStateDiff:
    def test_diff_against_untouched_system(self, cfg5):
        written = run(cfg5, W2R1, Schedule(workload=(OpIntent(0, 0, WRITE, 0),)))
        untouched = run(cfg5, W2R1, Schedule(workload=()))
        server = cfg5.server(1)

        diff = server_state_diff(written, untouched, server)
        assert diff.val_a == Value(1, 0)
        assert diff.val_b == Value.initial()
        assert diff.only_a == [Value(1, 0)]
        assert not diff.equal
        assert server_state_diff(written, written, server).equal

    def test_registration_changes_show_up(self, cfg5, write_then_read):
        written = run(cfg5, W2R1, Schedule(workload=(OpIntent(0, 0, WRITE, 0),)))
        read = run(cfg5, W2R1, write_then_read)
        diff = server_state_diff(written, read, cfg5.server(1))
        reader = cfg5.readers[0]
        assert diff.updated_changes[Value(1, 0)] == (frozenset({0}), frozenset({0, reader}))

    def test_unknown_server(self, cfg5, write_then_read):
        trace = run(cfg5, W2R1, write_then_read)
        with pytest.raises(DiagnosticError):
            server_state_diff(trace, trace, 99)


class TestReadGaps:
    def test_single_writer_reads_are_at_most_one_behind(self):
        cfg = SystemConfig(S=5, W=1, R=1, t=1)
        for seed in range(30):
            workload = random_workload(cfg, seed, n_ops=12, spacing=2)
            trace = run(cfg, W2R1, random_schedule(cfg, workload, seed, skip_probability=0.2))
            for gap in read_timestamp_gaps(trace):
                assert 0 <= gap.gap <= 1, (seed, gap)

    def test_gap_of_a_settled_read(self, cfg5, write_then_read):
        gaps = read_timestamp_gaps(run(cfg5, W2R1, write_then_read))
        assert [(g.op_id, g.returned_ts, g.max_ack_ts, g.gap) for g in gaps] == [(1, 1, 1, 0)]

    def test_only_reads_are_reported(self, cfg5):
        schedule = Schedule(workload=(OpIntent(0, 0, WRITE, 0), OpIntent(1, cfg5.readers[0], READ, 0)))
        gaps = read_timestamp_gaps(run(cfg5, W2R1, schedule))
        assert [g.op_id for g in gaps] == [1]
