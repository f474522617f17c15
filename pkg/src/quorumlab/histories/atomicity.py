"""
Atomicity Checker

Decides whether a history with distinct written values admits a sequential
order that respects real-time precedence and in which every read returns the
latest preceding write. With distinct values this reduces to cluster
analysis: no read may return an unknown value or precede its own write, and
the cluster precedence graph must be acyclic. A topological order of the
clusters, each laid out as its write followed by its reads, is then a
witness.

Pending reads are dropped. Pending writes that some read returned are kept
with an unbounded response; the rest are dropped, which never changes the
verdict since such a cluster has no outgoing edges.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.values import Value
from .model import History, OpRecord, validate_history
from .precedence import INITIAL_CLUSTER, Cluster, PrecedenceGraphBuilder

logger = logging.getLogger(__name__)

UNKNOWN_VALUE = "unknown-value"
READ_BEFORE_WRITE = "read-before-write"
CYCLE = "cycle"


@dataclass(frozen=True)
class ViolationCertificate:
    """Minimal evidence that no valid sequential order exists."""

    kind: str
    ops: Tuple[int, ...]
    detail: str
    edges: Tuple[Tuple[int, int], ...] = ()

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "ops": list(self.ops), "detail": self.detail, "edges": [list(e) for e in self.edges]}


@dataclass(frozen=True)
class AtomicityVerdict:
    atomic: bool
    witness: Optional[Tuple[int, ...]] = None
    certificate: Optional[ViolationCertificate] = None

    @property
    def outcome(self) -> str:
        return "atomic" if self.atomic else "violation"

    def to_dict(self) -> Dict:
        return {
            "outcome": self.outcome,
            "witness": None if self.witness is None else list(self.witness),
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


def _violation(kind: str, ops: Sequence[int], detail: str, edges=()) -> AtomicityVerdict:
    return AtomicityVerdict(atomic=False, certificate=ViolationCertificate(kind, tuple(ops), detail, tuple(edges)))


def build_clusters(h: History) -> Tuple[Dict[int, Cluster], Optional[AtomicityVerdict]]:
    """
    Group reads under the write of the value they returned.

    Returns:
        The clusters, and a violation verdict if some read returns a value no
        write in the history produced
    """
    writes = {o.value: o for o in h.writes if o.value is not None}
    clusters: Dict[int, Cluster] = {INITIAL_CLUSTER: Cluster(INITIAL_CLUSTER, Value.initial())}
    for o in sorted(h.writes, key=lambda o: o.op_id):
        if not o.pending:
            clusters[o.op_id] = Cluster(o.op_id, o.value, write=o)

    for r in sorted((o for o in h.reads if not o.pending), key=lambda o: o.op_id):
        if r.value.is_initial:
            clusters[INITIAL_CLUSTER].reads.append(r)
            continue
        w = writes.get(r.value)
        if w is None:
            return clusters, _violation(UNKNOWN_VALUE, [r.op_id], f"op {r.op_id} returned {r.value}, never written")
        if w.op_id not in clusters:
            clusters[w.op_id] = Cluster(w.op_id, w.value, write=w)
        clusters[w.op_id].reads.append(r)
    return clusters, None


def check_atomic(h: History) -> AtomicityVerdict:
    """
    Decide atomicity of a well-formed history with distinct written values.

    Args:
        h: History to check

    Returns:
        Verdict with a witness order or a violation certificate

    Raises:
        HistoryValidationError: if the history breaks the checker's preconditions
    """
    validate_history(h)
    clusters, verdict = build_clusters(h)
    if verdict is not None:
        return verdict

    for cluster in clusters.values():
        if cluster.write is None:
            continue
        for r in cluster.reads:
            if r.precedes(cluster.write):
                return _violation(
                    READ_BEFORE_WRITE,
                    [r.op_id, cluster.write.op_id],
                    f"op {r.op_id} returned {cluster.value} before op {cluster.write.op_id} wrote it",
                )

    builder = PrecedenceGraphBuilder()
    G = builder.create_cluster_graph(clusters)
    cycle = builder.find_minimal_cycle(G)
    if cycle is not None:
        hops = list(zip(cycle, cycle[1:] + cycle[:1]))
        edges = [G.edges[u, v]["witness"] for u, v in hops if G.edges[u, v]["witness"] is not None]
        ops = sorted({op for edge in edges for op in edge} | {clusters[n].write.op_id for n in cycle if clusters[n].write})
        values = " -> ".join(str(clusters[n].value) for n in cycle + cycle[:1])
        logger.debug(f"precedence cycle over clusters {cycle}")
        return _violation(CYCLE, ops, f"cluster precedence cycle {values}", edges)

    order = [o.op_id for node in builder.topological_clusters(G) for o in clusters[node].members]
    return AtomicityVerdict(atomic=True, witness=tuple(order))


def verify_witness(h: History, order: Sequence[int]) -> bool:
    """
    Independently re-check a sequential order.

    Every completed operation must appear, pending writes may appear, pending
    reads may not; real-time precedence must be respected; each read must
    return the value of the latest write before it (the initial value if none).
    """
    ops = h.by_id()
    if len(set(order)) != len(order) or any(op not in ops for op in order):
        return False
    placed = [ops[op] for op in order]
    if any(o.is_read and o.pending for o in placed):
        return False
    if {o.op_id for o in h.completed} - set(order):
        return False

    position = {op: i for i, op in enumerate(order)}
    for a in placed:
        for b in placed:
            if a.precedes(b) and position[a.op_id] > position[b.op_id]:
                return False

    current = Value.initial()
    for o in placed:
        if o.is_write:
            current = o.value
        elif o.value != current:
            return False
    return True


def explain(verdict: AtomicityVerdict, h: History) -> List[str]:
    """Human-readable lines for a verdict."""
    if verdict.atomic:
        ops = h.by_id()
        return ["atomic", "witness: " + " ".join(ops[op].label() for op in verdict.witness)]
    cert = verdict.certificate
    ops = h.by_id()
    lines = [f"violation ({cert.kind}): {cert.detail}"]
    lines.extend(f"  {ops[op].label()}" for op in cert.ops)
    return lines
