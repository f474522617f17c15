"""
Contradiction Search

Evaluates a one-round-trip-write candidate across the constructed chains
and a seeded random supplement:

1. run every chain alpha element and check atomicity
2. locate the critical index
3. build chains beta' and beta'' (with and without R2 skipping the critical
   server), check atomicity of every element, and check that readers return
   the same value in every pair of traces they cannot tell apart
4. compare the last elements of the two skipping chains as R2 sees them
5. run random workloads under random schedules, seed by seed

The first certificate in that order wins. Steps 1 to 4 can be turned off to
search random executions alone.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

from tqdm import tqdm

from ..automata.base import ProtocolFamily
from ..core.config import SystemConfig
from ..exceptions import ChainPreconditionError, ProtocolPreconditionError
from ..histories.atomicity import AtomicityVerdict, check_atomic
from ..simnet.engine import ExecutionTrace, run
from ..simnet.schedule import random_schedule, random_workload
from .builders import DOUBLEPRIME, PRIME, R1, R2, ChainSpec, build_chain_alpha, build_chain_beta, chain_config
from .critical import find_critical_server, return_label, run_chain
from .indistinguishability import indistinguishability_classes

logger = logging.getLogger(__name__)

ATOMICITY = "atomicity"
INDISTINGUISHABILITY = "indistinguishability"
RANDOM = "random"


@dataclass
class SearchCertificate:
    """Evidence that the candidate is not atomic."""

    kind: str
    source: str
    index: int
    trace: ExecutionTrace
    detail: str
    verdict: Optional[AtomicityVerdict] = None
    other: Optional[ExecutionTrace] = None
    other_index: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "source": self.source,
            "index": self.index,
            "other_index": self.other_index,
            "detail": self.detail,
            "verdict": None if self.verdict is None else self.verdict.to_dict(),
        }


@dataclass
class ChainResult:
    name: str
    returns: Dict[int, Dict[str, str]] = field(default_factory=dict)
    classes: Dict[str, List[List[int]]] = field(default_factory=dict)
    traces: List[ExecutionTrace] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "returns": self.returns, "classes": self.classes}


@dataclass
class CrossChainComparison:
    """The last elements of the two skipping beta chains, as one reader sees them."""

    observer: int
    chains: Tuple[str, str]
    classes: List[List[int]]
    returns: Dict[str, str]
    certificate: Optional[SearchCertificate] = None

    @property
    def conflict(self) -> bool:
        return self.certificate is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "observer": self.observer,
            "chains": list(self.chains),
            "classes": self.classes,
            "returns": self.returns,
            "conflict": self.conflict,
        }


@dataclass
class SearchReport:
    protocol: str
    S: int
    t: int
    certificate: Optional[SearchCertificate] = None
    critical_index: Optional[int] = None
    chains: List[ChainResult] = field(default_factory=list)
    seeds_tried: int = 0
    notes: List[str] = field(default_factory=list)
    cross_chain: Optional[CrossChainComparison] = None

    @property
    def outcome(self) -> str:
        return "certificate" if self.certificate is not None else "exhausted"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "protocol": self.protocol,
            "S": self.S,
            "t": self.t,
            "outcome": self.outcome,
            "critical_index": self.critical_index,
            "seeds_tried": self.seeds_tried,
            "chains": [c.to_dict() for c in self.chains],
            "cross_chain": None if self.cross_chain is None else self.cross_chain.to_dict(),
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "notes": self.notes,
        }


def _first_violation(traces: List[ExecutionTrace], source: str) -> Optional[SearchCertificate]:
    for index, trace in enumerate(traces):
        verdict = check_atomic(trace.history)
        if not verdict.atomic:
            return SearchCertificate(ATOMICITY, source, index, trace, verdict.certificate.detail, verdict=verdict)
    return None


def _conflicting_class(traces: List[ExecutionTrace], observer: int, op_id: int, source: str):
    for members in indistinguishability_classes(traces, observer):
        labels = {i: return_label(traces[i], op_id) for i in members}
        first = members[0]
        for i in members[1:]:
            if labels[i] != labels[first]:
                detail = f"observer {observer} cannot tell {first} from {i} but returned {labels[first]} vs {labels[i]}"
                return SearchCertificate(INDISTINGUISHABILITY, source, first, traces[first], detail, other=traces[i], other_index=i)
    return None


def _evaluate_chain(protocol: ProtocolFamily, chain: ChainSpec, report: SearchReport) -> Tuple[List[ExecutionTrace], Optional[SearchCertificate]]:
    traces = run_chain(protocol, chain)
    result = ChainResult(name=chain.name, traces=traces)
    readers = {"r0": (chain.cfg.readers[0], R1)}
    if any(o.op_id == R2 for o in chain[0].workload):
        readers["r1"] = (chain.cfg.readers[1], R2)
    for i, trace in enumerate(traces):
        result.returns[i] = {label: return_label(trace, op) for label, (_, op) in readers.items()}
    for label, (pid, _) in readers.items():
        result.classes[label] = indistinguishability_classes(traces, pid)
    report.chains.append(result)

    certificate = _first_violation(traces, chain.name)
    if certificate is None:
        for pid, op in readers.values():
            certificate = _conflicting_class(traces, pid, op, chain.name)
            if certificate is not None:
                break
    return traces, certificate


def _random_trial(protocol: ProtocolFamily, cfg: SystemConfig, seed: int, n_ops: int) -> Tuple[int, ExecutionTrace, AtomicityVerdict]:
    workload = random_workload(cfg, seed, n_ops=n_ops)
    schedule = random_schedule(cfg, workload, seed)
    trace = run(cfg, protocol, schedule, record_snapshots=False)
    return seed, trace, check_atomic(trace.history)


def _batches(seeds: Iterable[int], size: int) -> Iterable[List[int]]:
    batch: List[int] = []
    for seed in seeds:
        batch.append(seed)
        if len(batch) == size:
            yield batch
            batch = []
    if batch:
        yield batch


def _compare_skip_tails(cfg: SystemConfig, tails: Dict[str, ExecutionTrace]) -> CrossChainComparison:
    names = (f"beta-{PRIME}-skip", f"beta-{DOUBLEPRIME}-skip")
    traces = [tails[name] for name in names]
    observer = cfg.readers[1]
    return CrossChainComparison(
        observer=observer,
        chains=names,
        classes=indistinguishability_classes(traces, observer),
        returns={name: return_label(trace, R2) for name, trace in zip(names, traces)},
        certificate=_conflicting_class(traces, observer, R2, "/".join(names)),
    )


def _search_chains(protocol: ProtocolFamily, S: int, t: int, report: SearchReport) -> SystemConfig:
    alpha = build_chain_alpha(S, t)
    cfg = alpha.cfg

    alpha_traces, report.certificate = _evaluate_chain(protocol, alpha, report)
    if report.certificate is not None:
        return cfg

    try:
        critical = find_critical_server(protocol, alpha, traces=alpha_traces)
    except ChainPreconditionError as exc:
        report.notes.append(str(exc))
        logger.info(f"no critical index: {exc}")
        return cfg

    report.critical_index = critical.i1
    pair = (alpha[critical.i1 - 1], alpha[critical.i1])
    tails: Dict[str, ExecutionTrace] = {}
    for variant in (PRIME, DOUBLEPRIME):
        for skip in (False, True):
            beta = build_chain_beta(cfg, pair, critical.i1, variant=variant, skip_critical=skip)
            traces, certificate = _evaluate_chain(protocol, beta, report)
            if report.certificate is None:
                report.certificate = certificate
            if skip:
                tails[beta.name] = traces[-1]

    report.cross_chain = _compare_skip_tails(cfg, tails)
    if report.certificate is None:
        report.certificate = report.cross_chain.certificate
    return cfg


def contradiction_search(
    protocol: ProtocolFamily,
    S: int,
    t: int = 1,
    budget: int = 10_000,
    seed: int = 0,
    workers: int = 1,
    n_ops: int = 8,
    progress: bool = False,
    use_chains: bool = True,
) -> SearchReport:
    """
    Look for an execution showing the candidate is not atomic.

    Args:
        protocol: Candidate with one-round-trip writes
        S: Number of servers (at least 3)
        t: Crash tolerance
        budget: Number of random seeds after the constructed chains
        seed: First random seed; seeds are tried in ascending order
        workers: Threads evaluating random seeds; results stay ordered by seed
        n_ops: Operations per random workload
        progress: Show a progress bar for the random phase
        use_chains: Evaluate the constructed chains before the random seeds

    Returns:
        SearchReport whose certificate is the first found, or none if exhausted

    Raises:
        ProtocolPreconditionError: if the protocol's writes take more than one round-trip
        ValueError: if S < 3
    """
    if protocol.write_round_trips != 1:
        raise ProtocolPreconditionError(
            f"{protocol.name} writes in {protocol.write_round_trips} round-trips; only one-round-trip writes are candidates"
        )
    report = SearchReport(protocol=protocol.name, S=S, t=t)
    if use_chains:
        cfg = _search_chains(protocol, S, t, report)
        if report.certificate is not None:
            return _found(report)
    else:
        cfg = chain_config(S, t)

    seeds = range(seed, seed + budget)
    bar = tqdm(total=budget, desc=f"{protocol.name} S={S}", disable=not progress)
    try:
        with ThreadPoolExecutor(max_workers=max(workers, 1)) as executor:
            for batch in _batches(seeds, max(workers, 1) * 8):
                results = executor.map(lambda s: _random_trial(protocol, cfg, s, n_ops), batch)
                for trial_seed, trace, verdict in results:
                    report.seeds_tried += 1
                    bar.update(1)
                    if not verdict.atomic:
                        report.certificate = SearchCertificate(
                            ATOMICITY, RANDOM, trial_seed, trace, verdict.certificate.detail, verdict=verdict
                        )
                        return _found(report)
    finally:
        bar.close()

    logger.info(f"{protocol.name}: search exhausted after {report.seeds_tried} seeds")
    return report


def _found(report: SearchReport) -> SearchReport:
    cert = report.certificate
    logger.info(f"{report.protocol}: {cert.kind} certificate from {cert.source}[{cert.index}]: {cert.detail}")
    return report
