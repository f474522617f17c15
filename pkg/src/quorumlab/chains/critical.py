"""
Critical Server

Runs a chain and finds the first pair of neighbouring elements whose read
returns differ. Returns are labelled by which distinguished write produced
them: "1", "2", "0" for the initial value.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..automata.base import ProtocolFamily
from ..exceptions import ChainPreconditionError
from ..simnet.engine import ExecutionTrace, run
from .builders import R1, W1, W2, ChainSpec

logger = logging.getLogger(__name__)

PENDING = "pending"


def return_label(trace: ExecutionTrace, op_id: int) -> str:
    """Label the value a read returned by the write that produced it."""
    ops = trace.history.by_id()
    read = ops.get(op_id)
    if read is None or read.pending:
        return PENDING
    if read.value.is_initial:
        return "0"
    for label, write_id in (("1", W1), ("2", W2)):
        write = ops.get(write_id)
        if write is not None and write.value == read.value:
            return label
    return str(read.value)


def run_chain(protocol: ProtocolFamily, chain: ChainSpec) -> List[ExecutionTrace]:
    return [run(chain.cfg, protocol, schedule) for schedule in chain]


@dataclass
class CriticalServerReport:
    chain: str
    i1: int
    before: ExecutionTrace
    after: ExecutionTrace
    returns: Dict[int, str] = field(default_factory=dict)
    traces: List[ExecutionTrace] = field(default_factory=list)

    @property
    def server(self) -> int:
        """Process id of s_{i1}."""
        return self.before.cfg.server(self.i1)


def find_critical_server(
    protocol: ProtocolFamily,
    chain: ChainSpec,
    traces: Optional[List[ExecutionTrace]] = None,
    observer: int = R1,
) -> CriticalServerReport:
    """
    Smallest index i1 where the observed read's return differs from i1 - 1.

    Args:
        protocol: Protocol under test
        chain: Chain to run
        traces: Already executed traces of ``chain``, if available
        observer: Op id of the read whose return is tracked

    Raises:
        ChainPreconditionError: if both ends of the chain return the same label
    """
    traces = traces if traces is not None else run_chain(protocol, chain)
    returns = {i: return_label(trace, observer) for i, trace in enumerate(traces)}
    if returns[0] == returns[len(traces) - 1]:
        raise ChainPreconditionError(
            f"{protocol.name}: read returns {returns[0]!r} at both ends of chain {chain.name}",
            returns=returns,
        )
    i1 = next(i for i in range(1, len(traces)) if returns[i] != returns[i - 1])
    logger.info(f"{protocol.name}: critical index {i1} on chain {chain.name} ({returns[i1 - 1]} -> {returns[i1]})")
    return CriticalServerReport(
        chain=chain.name,
        i1=i1,
        before=traces[i1 - 1],
        after=traces[i1],
        returns=returns,
        traces=traces,
    )
