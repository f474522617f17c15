import json

import pytest

from src.quorumlab.automata.w2r1 import W2R1
from src.quorumlab.exceptions import TraceFormatError
from src.quorumlab.simnet.engine import run
from src.quorumlab.simnet.schedule import random_schedule, random_workload
from src.quorumlab.simnet.trace_io import (
    TRACE_HEADER,
    TraceLoader,
    export_history,
    export_trace,
    import_history,
    import_trace,
)


@pytest.fixture
def trace(cfg5):
    workload = random_workload(cfg5, 21, n_ops=8)
    return run(cfg5, W2R1, random_schedule(cfg5, workload, 21))


@pytest.fixture
def trace_file(trace, tmp_path):
    return export_trace(trace, tmp_path / "run.trace.jsonl", config_hash="abc")


class TestExport:
    def test_layout(self, trace, trace_file):
        lines = trace_file.read_text(encoding="utf-8").splitlines()
        assert lines[0] == TRACE_HEADER
        records = [json.loads(line) for line in lines[1:]]
        assert records[0]["record"] == "meta"
        assert records[0]["config_hash"] == "abc"
        assert records[-1] == {"record": "end", "events": len(trace.events), "ops": len(trace.history)}
        assert sum(r["record"] == "event" for r in records) == len(trace.events)

    def test_equal_runs_give_identical_bytes(self, cfg5, trace, trace_file, tmp_path):
        again = run(cfg5, W2R1, trace.schedule)
        other = export_trace(again, tmp_path / "again.trace.jsonl", config_hash="abc")
        assert other.read_bytes() == trace_file.read_bytes()


class TestImport:
    def test_history_survives(self, trace, trace_file):
        assert import_history(trace_file) == trace.history

    def test_trace_replays(self, cfg5, trace_file):
        loaded = import_trace(trace_file)
        assert loaded.cfg == cfg5
        replayed = run(loaded.cfg, W2R1, loaded.schedule)
        assert [e.to_wire() for e in replayed.events] == [e.to_wire() for e in loaded.events]

    def test_history_file(self, cfg5, trace, tmp_path):
        path = export_history(trace.history, tmp_path / "run.history.jsonl", cfg5, "w2r1")
        loader = TraceLoader(path).load()
        assert loader.meta.content == "history"
        assert loader.events == []
        assert loader.history() == trace.history
        assert loader.config() == cfg5
        with pytest.raises(TraceFormatError):
            loader.trace()


class TestBrokenFiles:
    def test_truncated(self, trace_file):
        lines = trace_file.read_text(encoding="utf-8").splitlines()
        trace_file.write_text("\n".join(lines[:-1]) + "\n", encoding="utf-8")
        with pytest.raises(TraceFormatError, match="truncated"):
            TraceLoader(trace_file).load()

    def test_counts_disagree(self, trace_file):
        lines = trace_file.read_text(encoding="utf-8").splitlines()
        del lines[3]
        trace_file.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(TraceFormatError):
            TraceLoader(trace_file).load()

    def test_bad_header(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text('{"record": "meta"}\n', encoding="utf-8")
        with pytest.raises(TraceFormatError):
            TraceLoader(path).load()

    def test_bad_record(self, trace_file):
        lines = trace_file.read_text(encoding="utf-8").splitlines()
        lines.insert(2, '{"record": "event", "time": "soon"}')
        trace_file.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(TraceFormatError):
            TraceLoader(trace_file).load()

    def test_not_json(self, trace_file):
        with open(trace_file, "a", encoding="utf-8") as f:
            f.write("{oops\n")
        with pytest.raises(TraceFormatError):
            TraceLoader(trace_file).load()

    def test_missing_file(self, tmp_path):
        with pytest.raises(TraceFormatError):
            TraceLoader(tmp_path / "absent.jsonl").load()

    def test_is_a_value_error(self, tmp_path):
        with pytest.raises(ValueError):
            TraceLoader(tmp_path / "absent.jsonl").load()
