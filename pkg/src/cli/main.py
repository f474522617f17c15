"""
Quorum Lab Command Line

Commands:
- run: execute one experiment and write its trace, history and summary
- check: check a trace or history file for atomicity and MWA0..MWA4
- explore: search chain and random executions of a one-round-write candidate
- matrix: feasibility table over ranges of S, t and R

Exit codes: 0 clean, 1 property violation found, 2 usage or validation error.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import pandas as pd

from src.quorumlab import __version__
from src.quorumlab.automata import get_protocol, protocol_names
from src.quorumlab.automata.base import ProtocolFamily
from src.quorumlab.chains.search import SearchReport, contradiction_search
from src.quorumlab.core.config import SystemConfig, feasible_w2r1, feasible_w2r2
from src.quorumlab.exceptions import ProtocolInvariantError, QuorumLabError
from src.quorumlab.experiment import ExperimentConfig
from src.quorumlab.exporters.report_exporter import ReportExporter
from src.quorumlab.histories.atomicity import check_atomic, explain
from src.quorumlab.histories.mwa import check_mwa
from src.quorumlab.settings import get_settings
from src.quorumlab.simnet.diagnostics import round_trip_summary
from src.quorumlab.simnet.engine import run as simulate
from src.quorumlab.simnet.trace_io import TraceLoader, export_history, export_trace

logger = logging.getLogger(__name__)

EXIT_CLEAN = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2

FORMATS = click.Choice(["text", "machine"])


class ValidationFailure(click.ClickException):
    """Bad input: reported on stderr, exit code 2."""

    exit_code = EXIT_INVALID


def configure_logging(level: Optional[str]):
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def parse_range(text: str) -> List[int]:
    """Parse ``3-12``, ``1,2,5`` or ``4`` into a sorted list of ints."""
    values = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = (int(p) for p in part.split("-", 1))
                values.update(range(lo, hi + 1))
            elif part:
                values.add(int(part))
    except ValueError:
        raise click.BadParameter(f"not a range: {text!r}") from None
    if not values:
        raise click.BadParameter(f"empty range: {text!r}")
    return sorted(values)


def resolve_out_dir(flag: Optional[Path], config: Optional[ExperimentConfig] = None) -> Path:
    if flag is not None:
        return flag
    if config is not None and config.out_dir is not None:
        return config.out_dir
    return get_settings().out_dir


def warn_if_infeasible(cfg: SystemConfig, family: ProtocolFamily):
    """Log a warning when the protocol runs outside its safety bound."""
    shape = (family.write_round_trips, family.read_round_trips)
    if shape == (2, 1) and not feasible_w2r1(cfg):
        logger.warning(
            "%s at S=%d t=%d R=%d is infeasible: fast reads need R < S/t - 2; atomicity may fail",
            family.name, cfg.S, cfg.t, cfg.R,
        )
    elif shape == (2, 2) and not feasible_w2r2(cfg):
        logger.warning(
            "%s at S=%d t=%d is infeasible: two-round operations need t < S/2; atomicity may fail",
            family.name, cfg.S, cfg.t,
        )


@click.group()
@click.version_option(__version__, prog_name="quorumlab")
@click.option("--log-level", default=None, help="Logging level (default from QUORUMLAB_LOG_LEVEL).")
def cli(log_level: Optional[str]):
    """Simulate and check multi-writer atomic register emulations."""
    configure_logging(log_level)


@cli.command("run")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None, help="Experiment config file.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--protocol", type=str, default=None, help=f"Override the protocol ({', '.join(protocol_names())}).")
@click.option("--out-dir", type=click.Path(path_type=Path), default=None, help="Output directory.")
@click.option("--format", "fmt", type=FORMATS, default="text", show_default=True)
def run_cmd(config_path: Optional[Path], seed: Optional[int], protocol: Optional[str], out_dir: Optional[Path], fmt: str):
    """Run one simulation and write trace, history and round-trip summary."""
    try:
        base = ExperimentConfig.load(config_path) if config_path else None
        overrides: Dict[str, Any] = {k: v for k, v in (("seed", seed), ("protocol", protocol)) if v is not None}
        raw = {**(base.model_dump() if base else {}), **overrides}
        config = ExperimentConfig.from_mapping(raw)
        schedule = config.build_schedule()
        cfg = config.system_config()
        warn_if_infeasible(cfg, config.protocol_family())
        trace = simulate(cfg, config.protocol_family(), schedule)
    except ProtocolInvariantError as exc:
        raise ValidationFailure(f"protocol invariant violated: {exc}") from exc
    except QuorumLabError as exc:
        raise ValidationFailure(str(exc)) from exc

    target = resolve_out_dir(out_dir, config)
    exporter = ReportExporter(target)
    stem = f"{config.protocol}-seed{config.seed}" if config.seed is not None else config.protocol
    config.save(exporter.path_for(f"{stem}.config", "txt"))
    trace_path = export_trace(trace, exporter.path_for(f"{stem}.trace", "jsonl"), config_hash=config.config_hash())
    history_path = export_history(trace.history, exporter.path_for(f"{stem}.history", "jsonl"), cfg, config.protocol)

    summary = round_trip_summary(trace)
    completed = len(trace.history.completed)
    lines = [
        f"protocol: {config.protocol}  S={cfg.S} W={cfg.W} R={cfg.R} t={cfg.t}  seed={config.seed}",
        f"config hash: {config.config_hash()}",
        f"operations: {len(trace.history)} started, {completed} completed, {len(trace.events)} events",
        "round-trips per kind:",
        summary.to_string() if not summary.empty else "  (no completed operations)",
        f"trace: {trace_path}",
        f"history: {history_path}",
    ]
    data = {
        "protocol": config.protocol,
        "config": {"S": cfg.S, "W": cfg.W, "R": cfg.R, "t": cfg.t},
        "seed": config.seed,
        "config_hash": config.config_hash(),
        "operations": len(trace.history),
        "completed": completed,
        "events": len(trace.events),
        "round_trips": {kind: {k: int(v) for k, v in row.items()} for kind, row in summary.iterrows()},
        "trace": str(trace_path),
        "history": str(history_path),
    }
    exporter.export_report(data, lines, f"{stem}.summary", fmt)
    _emit(data, lines, fmt)
    sys.exit(EXIT_CLEAN)


@cli.command("check")
@click.argument("path", type=click.Path(path_type=Path))
@click.option("--out-dir", type=click.Path(path_type=Path), default=None, help="Where to write the report.")
@click.option("--format", "fmt", type=FORMATS, default="text", show_default=True)
def check_cmd(path: Path, out_dir: Optional[Path], fmt: str):
    """Check a trace or history file; exit 1 on any violation."""
    try:
        loader = TraceLoader(path).load()
        history = loader.history()
        verdict = check_atomic(history)
    except QuorumLabError as exc:
        raise ValidationFailure(str(exc)) from exc
    mwa = check_mwa(history)

    lines = [f"file: {path}", f"operations: {len(history)}"]
    lines.extend(explain(verdict, history))
    lines.append("MWA: " + ", ".join(f"{p}={n}" for p, n in mwa.counts().items()))
    lines.extend(f"  {v.prop} ops {list(v.ops)}: {v.detail}" for v in mwa.violations)
    data = {
        "file": str(path),
        "config_hash": loader.meta.config_hash,
        "operations": len(history),
        "atomicity": verdict.to_dict(),
        "mwa": mwa.to_dict(),
    }
    exporter = ReportExporter(out_dir or path.parent)
    exporter.export_report(data, lines, f"{path.name}.check", fmt)
    _emit(data, lines, fmt)
    sys.exit(EXIT_CLEAN if verdict.atomic and mwa.clean else EXIT_VIOLATION)


@cli.command("explore")
@click.option("--protocol", type=str, default="w1r2-naive", show_default=True)
@click.option("--servers", "-S", type=int, default=3, show_default=True)
@click.option("--tolerance", "-t", type=int, default=1, show_default=True)
@click.option("--budget", type=int, default=None, help="Random seeds after the chains (default from settings).")
@click.option("--seed", type=int, default=0, show_default=True, help="First random seed.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out-dir", type=click.Path(path_type=Path), default=None)
@click.option("--format", "fmt", type=FORMATS, default="text", show_default=True)
@click.option("--progress/--no-progress", default=False)
@click.option("--chains/--no-chains", "use_chains", default=True, show_default=True, help="Evaluate the constructed chains before random seeds.")
def explore_cmd(protocol: str, servers: int, tolerance: int, budget: Optional[int], seed: int, workers: int, out_dir: Optional[Path], fmt: str, progress: bool, use_chains: bool):
    """Search for a non-atomic execution of a one-round-write candidate."""
    budget = get_settings().default_budget if budget is None else budget
    if budget < 0:
        raise ValidationFailure("budget must be >= 0")
    try:
        family = get_protocol(protocol)
        report = contradiction_search(family, servers, tolerance, budget=budget, seed=seed, workers=workers, progress=progress, use_chains=use_chains)
    except (QuorumLabError, ValueError) as exc:
        raise ValidationFailure(str(exc)) from exc

    exporter = ReportExporter(resolve_out_dir(out_dir))
    stem = f"explore-{protocol}-S{servers}-t{tolerance}"
    data = report.to_dict()
    data["traces"] = _export_search_traces(report, exporter, stem)
    lines = _explore_lines(report)
    exporter.export_report(data, lines, stem, fmt)
    _emit(data, lines, fmt)
    sys.exit(EXIT_VIOLATION if report.certificate is not None else EXIT_CLEAN)


def _export_search_traces(report: SearchReport, exporter: ReportExporter, stem: str) -> Dict[str, Any]:
    paths: Dict[str, Any] = {}
    for chain in report.chains:
        paths[chain.name] = [
            str(export_trace(trace, exporter.output_dir / stem / chain.name / f"element-{i}.trace.jsonl"))
            for i, trace in enumerate(chain.traces)
        ]
    cert = report.certificate
    if cert is not None:
        paths["certificate"] = str(export_trace(cert.trace, exporter.output_dir / stem / "certificate.trace.jsonl"))
        if cert.other is not None:
            paths["certificate_other"] = str(export_trace(cert.other, exporter.output_dir / stem / "certificate-other.trace.jsonl"))
    return paths


def _explore_lines(report: SearchReport) -> List[str]:
    lines = [f"protocol: {report.protocol}  S={report.S} t={report.t}"]
    for chain in report.chains:
        returns = " ".join(
            "/".join(labels[r] for r in sorted(labels)) for _, labels in sorted(chain.returns.items())
        )
        lines.append(f"{chain.name}: returns {returns}")
        for reader, classes in chain.classes.items():
            lines.append(f"  {reader} classes: {classes}")
    if report.critical_index is not None:
        lines.append(f"critical index: {report.critical_index}")
    cross = report.cross_chain
    if cross is not None:
        returns = " ".join(f"{name}={label}" for name, label in cross.returns.items())
        lines.append(f"last skipping elements seen by process {cross.observer}: classes {cross.classes}, returns {returns}")
    lines.extend(f"note: {n}" for n in report.notes)
    lines.append(f"random seeds tried: {report.seeds_tried}")
    cert = report.certificate
    if cert is None:
        lines.append("outcome: exhausted, no certificate")
    else:
        lines.append(f"outcome: {cert.kind} certificate from {cert.source}[{cert.index}]")
        lines.append(f"  {cert.detail}")
        if cert.verdict is not None:
            lines.extend(f"  {line}" for line in explain(cert.verdict, cert.trace.history))
    return lines


def feasibility_table(servers: List[int], tolerances: List[int], readers: List[int], writers: int) -> pd.DataFrame:
    """One row per (S, t, R) with t < S."""
    multi = writers >= 2
    rows = []
    for S in servers:
        for t in tolerances:
            if t < 1 or t >= S:
                continue
            for R in readers:
                cfg = SystemConfig(S=S, W=writers, R=R, t=t)
                one_round_writes = "impossible" if multi and R >= 2 else "not covered"
                rows.append(
                    {
                        "S": S,
                        "t": t,
                        "R": R,
                        "W": writers,
                        "W2R1": "feasible" if feasible_w2r1(cfg) else "infeasible",
                        "W2R2": "possible" if feasible_w2r2(cfg) else "impossible",
                        "W1R2": one_round_writes,
                        "W1R1": one_round_writes,
                    }
                )
    return pd.DataFrame(rows, columns=["S", "t", "R", "W", "W2R1", "W2R2", "W1R2", "W1R1"])


@cli.command("matrix")
@click.option("--servers", "-S", default="3-12", show_default=True, help="Range of S, e.g. 3-12 or 3,5,7.")
@click.option("--tolerance", "-t", default="1-3", show_default=True, help="Range of t.")
@click.option("--readers", "-R", default="1-6", show_default=True, help="Range of R.")
@click.option("--writers", "-W", type=int, default=2, show_default=True)
@click.option("--out-dir", type=click.Path(path_type=Path), default=None)
@click.option("--format", "fmt", type=FORMATS, default="text", show_default=True)
def matrix_cmd(servers: str, tolerance: str, readers: str, writers: int, out_dir: Optional[Path], fmt: str):
    """Feasibility of W2R1, W2R2, W1R2 and W1R1 per (S, t, R)."""
    if writers < 1:
        raise ValidationFailure("writers must be >= 1")
    try:
        table = feasibility_table(parse_range(servers), parse_range(tolerance), parse_range(readers), writers)
    except QuorumLabError as exc:
        raise ValidationFailure(str(exc)) from exc

    exporter = ReportExporter(resolve_out_dir(out_dir))
    exporter.export_table_csv(table, "matrix")
    lines = [table.to_string(index=False) if not table.empty else "(no combination with 1 <= t < S)"]
    if writers == 1:
        lines.append("note: W=1 is the single-writer regime, which this matrix does not cover")
    data = {"writers": writers, "rows": table.to_dict(orient="records")}
    if writers == 1:
        data["note"] = "single-writer regime not covered"
    exporter.export_report(data, lines, "matrix", fmt)
    _emit(data, lines, fmt)
    sys.exit(EXIT_CLEAN)


def _emit(data: Dict[str, Any], lines: List[str], fmt: str):
    if fmt == "machine":
        click.echo(json.dumps(data, indent=2, sort_keys=True, default=str))
    else:
        for line in lines:
            click.echo(line)


if __name__ == "__main__":
    cli()
