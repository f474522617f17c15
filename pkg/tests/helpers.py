"""Builders for hand-written histories."""

from typing import Optional

from src.quorumlab.core.values import Value
from src.quorumlab.histories.model import History, OpRecord


def op(
    op_id: int,
    client: int,
    kind: str,
    value: Optional[Value],
    invoke: int,
    response: Optional[int] = None,
) -> OpRecord:
    return OpRecord(op_id=op_id, client=client, kind=kind, value=value, invoke=invoke, response=response)


def history(*ops: OpRecord) -> History:
    return History.of(ops)
