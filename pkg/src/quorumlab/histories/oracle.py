"""
Brute-Force Oracle

Exhaustive search for a sequential order, used to cross-validate the cluster
checker on small histories, plus a generator of random small histories.
"""

import logging
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from ..core.rng import HISTORY_STREAM, make_rng
from ..core.values import Value
from ..exceptions import OracleLimitError
from ..settings import get_settings
from .atomicity import AtomicityVerdict, ViolationCertificate
from .model import History, OpRecord, validate_history

logger = logging.getLogger(__name__)


def _search(ops: List[OpRecord]) -> Optional[List[int]]:
    preds: Dict[int, FrozenSet[int]] = {
        o.op_id: frozenset(p.op_id for p in ops if p.precedes(o)) for o in ops
    }
    failed: Set[Tuple[FrozenSet[int], Value]] = set()

    def extend(placed: FrozenSet[int], current: Value, order: List[int]) -> Optional[List[int]]:
        if len(placed) == len(ops):
            return order
        if (placed, current) in failed:
            return None
        for o in ops:
            if o.op_id in placed or not preds[o.op_id] <= placed:
                continue
            if o.is_read and o.value != current:
                continue
            nxt = o.value if o.is_write else current
            found = extend(placed | {o.op_id}, nxt, order + [o.op_id])
            if found is not None:
                return found
        failed.add((placed, current))
        return None

    return extend(frozenset(), Value.initial(), [])


def brute_force_atomic(h: History) -> AtomicityVerdict:
    """
    Try every placement order of the completed operations, with each pending
    write either included or left out.

    Raises:
        OracleLimitError: above the oracle's completed-operation limit
        HistoryValidationError: if the history breaks the checker's preconditions
    """
    validate_history(h)
    limit = get_settings().oracle_limit
    completed = sorted(h.completed, key=lambda o: o.op_id)
    if len(completed) > limit:
        raise OracleLimitError(f"{len(completed)} completed operations exceed the oracle limit of {limit}")

    optional = sorted((o for o in h.writes if o.pending and o.value is not None), key=lambda o: o.op_id)
    for size in range(len(optional) + 1):
        for extra in combinations(optional, size):
            order = _search(completed + list(extra))
            if order is not None:
                return AtomicityVerdict(atomic=True, witness=tuple(order))

    ops = tuple(o.op_id for o in completed)
    return AtomicityVerdict(
        atomic=False,
        certificate=ViolationCertificate("exhaustive", ops, "no sequential order satisfies real time and read-from"),
    )


def random_history(
    seed: int,
    n_ops: int = 6,
    writers: int = 2,
    readers: int = 2,
    pending_probability: float = 0.15,
    horizon: int = 12,
) -> History:
    """
    Random well-formed history with distinct written values.

    Reads return the initial value or any written value, uniformly, so the
    corpus mixes atomic and non-atomic histories. A client whose operation is
    left pending issues nothing further.
    """
    rng = make_rng(seed, HISTORY_STREAM)
    clients = list(range(writers + readers))
    free_at = {c: 0 for c in clients}
    stopped: Set[int] = set()
    stamps = [int(s) + 1 for s in rng.permutation(n_ops)]
    drafts = []

    for op_id in range(n_ops):
        open_clients = [c for c in clients if c not in stopped]
        if not open_clients:
            break
        client = int(rng.choice(open_clients))
        invoke = free_at[client] + int(rng.integers(0, horizon // 2 + 1))
        pending = bool(rng.random() < pending_probability)
        response = None if pending else invoke + int(rng.integers(1, horizon // 2 + 1))
        if pending:
            stopped.add(client)
        else:
            free_at[client] = response + 1
        kind = "write" if client < writers else "read"
        value = Value(stamps[op_id], client) if kind == "write" else None
        drafts.append(OpRecord(op_id, client, kind, value, invoke, response))

    choices = [Value.initial()] + [o.value for o in drafts if o.is_write]
    ops = []
    for o in drafts:
        if o.is_read and not o.pending:
            picked = choices[int(rng.integers(0, len(choices)))]
            o = OpRecord(o.op_id, o.client, o.kind, picked, o.invoke, o.response)
        ops.append(o)
    return History.of(ops)
