import json
import logging

import pytest
from click.testing import CliRunner

from src.cli.main import cli, feasibility_table, parse_range
from src.quorumlab.core.values import Value
from src.quorumlab.simnet.trace_io import export_history
from tests.helpers import history, op


@pytest.fixture
def runner():
    return CliRunner()


class TestRun:
    def test_writes_trace_history_and_summary(self, runner, tmp_path):
        result = runner.invoke(cli, ["run", "--seed", "3", "--out-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "w2r1-seed3.trace.jsonl").is_file()
        assert (tmp_path / "w2r1-seed3.history.jsonl").is_file()
        assert (tmp_path / "w2r1-seed3.summary.txt").is_file()
        assert "round-trips per kind" in result.output

    def test_same_seed_same_bytes(self, runner, tmp_path):
        for name in ("a", "b"):
            result = runner.invoke(cli, ["run", "--seed", "12", "--protocol", "w2r2-abd", "--out-dir", str(tmp_path / name)])
            assert result.exit_code == 0, result.output
        first = (tmp_path / "a" / "w2r2-abd-seed12.trace.jsonl").read_bytes()
        second = (tmp_path / "b" / "w2r2-abd-seed12.trace.jsonl").read_bytes()
        assert first == second

    def test_config_file(self, runner, tmp_path):
        conf = tmp_path / "exp.conf"
        conf.write_text("seed = 5\nservers = 7\nprotocol = w1r2-naive\n", encoding="utf-8")
        result = runner.invoke(cli, ["run", "--config", str(conf), "--out-dir", str(tmp_path), "--format", "machine"])
        assert result.exit_code == 0, result.output
        summary = json.loads((tmp_path / "w1r2-naive-seed5.summary.json").read_text(encoding="utf-8"))
        assert summary["config"]["S"] == 7
        assert len(summary["config_hash"]) == 64

    def test_missing_seed_is_a_usage_error(self, runner, tmp_path):
        result = runner.invoke(cli, ["run", "--out-dir", str(tmp_path)])
        assert result.exit_code == 2

    def test_unknown_protocol(self, runner, tmp_path):
        result = runner.invoke(cli, ["run", "--seed", "1", "--protocol", "w0r0", "--out-dir", str(tmp_path)])
        assert result.exit_code == 2

    def test_chain_mode_with_too_few_servers(self, runner, tmp_path):
        conf = tmp_path / "exp.conf"
        conf.write_text("schedule_mode = chain\nservers = 2\nprotocol = w1r2-naive\n", encoding="utf-8")
        result = runner.invoke(cli, ["run", "--config", str(conf), "--out-dir", str(tmp_path)])
        assert result.exit_code == 2
        assert "3 servers" in result.output

    def test_infeasible_fast_reads_are_warned_about(self, runner, tmp_path, caplog):
        conf = tmp_path / "exp.conf"
        conf.write_text("seed = 6\nservers = 4\ntolerance = 1\nreaders = 2\n", encoding="utf-8")
        with caplog.at_level(logging.WARNING, logger="src.cli.main"):
            result = runner.invoke(cli, ["run", "--config", str(conf), "--out-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "infeasible" in caplog.text

    def test_feasible_config_is_quiet(self, runner, tmp_path, caplog):
        with caplog.at_level(logging.WARNING, logger="src.cli.main"):
            result = runner.invoke(cli, ["run", "--seed", "6", "--out-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "infeasible" not in caplog.text


class TestCheck:
    def test_clean_trace(self, runner, tmp_path):
        runner.invoke(cli, ["run", "--seed", "2", "--out-dir", str(tmp_path)])
        result = runner.invoke(cli, ["check", str(tmp_path / "w2r1-seed2.trace.jsonl")])
        assert result.exit_code == 0, result.output
        assert "atomic" in result.output
        assert (tmp_path / "w2r1-seed2.trace.jsonl.check.txt").is_file()

    def test_violation(self, runner, tmp_path):
        h = history(
            op(0, 0, "write", Value(1, 0), 0, 10),
            op(1, 1, "write", Value(1, 1), 2, 12),
            op(2, 2, "read", Value(1, 1), 20, 22),
            op(3, 3, "read", Value(1, 0), 23, 25),
        )
        path = export_history(h, tmp_path / "bad.history.jsonl")
        result = runner.invoke(cli, ["check", str(path), "--format", "machine"])
        assert result.exit_code == 1
        report = json.loads((tmp_path / "bad.history.jsonl.check.json").read_text(encoding="utf-8"))
        assert report["atomicity"]["outcome"] == "violation"
        assert report["mwa"]["counts"]["MWA4"] == 1

    def test_truncated_file(self, runner, tmp_path):
        path = export_history(history(), tmp_path / "h.jsonl")
        path.write_text(path.read_text(encoding="utf-8").splitlines()[0] + "\n", encoding="utf-8")
        result = runner.invoke(cli, ["check", str(path)])
        assert result.exit_code == 2


class TestExplore:
    def test_naive_candidate_is_refuted(self, runner, tmp_path):
        result = runner.invoke(cli, ["explore", "--protocol", "w1r2-naive", "-S", "3", "--budget", "0", "--out-dir", str(tmp_path)])
        assert result.exit_code == 1, result.output
        stem = tmp_path / "explore-w1r2-naive-S3-t1"
        assert (stem / "alpha" / "element-0.trace.jsonl").is_file()
        assert (stem / "certificate.trace.jsonl").is_file()
        assert (tmp_path / "explore-w1r2-naive-S3-t1.txt").is_file()
        assert "critical index: 2" in result.output
        assert "classes [[0, 1]]" in result.output

    def test_random_only(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["explore", "-S", "3", "--no-chains", "--budget", "10000", "--format", "machine", "--out-dir", str(tmp_path)]
        )
        assert result.exit_code == 1, result.output
        data = json.loads((tmp_path / "explore-w1r2-naive-S3-t1.json").read_text(encoding="utf-8"))
        assert data["chains"] == []
        assert data["certificate"]["source"] == "random"

    def test_fast_read_protocol_is_not_a_candidate(self, runner, tmp_path):
        result = runner.invoke(cli, ["explore", "--protocol", "w2r1", "--budget", "0", "--out-dir", str(tmp_path)])
        assert result.exit_code == 2


class TestMatrix:
    def test_table(self, runner, tmp_path):
        result = runner.invoke(cli, ["matrix", "--out-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "matrix.csv").is_file()

    def test_single_writer_note(self, runner, tmp_path):
        result = runner.invoke(cli, ["matrix", "-W", "1", "-S", "5", "-t", "1", "-R", "2", "--out-dir", str(tmp_path)])
        assert result.exit_code == 0
        assert "single-writer" in result.output

    def test_bad_range(self, runner, tmp_path):
        result = runner.invoke(cli, ["matrix", "-S", "three", "--out-dir", str(tmp_path)])
        assert result.exit_code == 2

    def test_feasibility_content(self):
        table = feasibility_table(list(range(3, 13)), [1, 2, 3], list(range(1, 7)), 2)
        assert (table["t"] < table["S"]).all()
        assert (table["W1R2"] == "impossible").sum() == len(table[table["R"] >= 2])
        for row in table.itertuples(index=False):
            assert (row.W2R1 == "feasible") == (row.R < row.S / row.t - 2)
            assert (row.W2R2 == "possible") == (2 * row.t < row.S)
            assert row.W1R1 == row.W1R2

    def test_parse_range(self):
        assert parse_range("3-5,9") == [3, 4, 5, 9]
        assert parse_range("4") == [4]
