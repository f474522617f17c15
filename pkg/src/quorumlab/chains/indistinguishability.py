"""
Indistinguishability

Two traces look the same to a client when it invoked the same operations and
consumed the same replies, with the same contents, in the same order.
"""

import json
from typing import Dict, List, Sequence, Tuple

from ..simnet.engine import ExecutionTrace

ClassKey = Tuple[Tuple, ...]


def observer_view(trace: ExecutionTrace, observer: int) -> ClassKey:
    """The observer's input sequence: its invocations and consumed replies."""
    view = []
    for e in trace.events:
        if e.kind == "invoke" and e.src == observer:
            view.append(("invoke", e.payload["kind"]))
        elif e.kind == "deliver" and e.dst == observer:
            view.append(("reply", e.rt, e.src, json.dumps(e.payload, sort_keys=True)))
    return tuple(view)


def indistinguishability_classes(traces: Sequence[ExecutionTrace], observer: int) -> List[List[int]]:
    """
    Partition trace indices by the observer's view.

    Returns:
        Classes in order of first appearance, each a list of indices
    """
    classes: Dict[ClassKey, List[int]] = {}
    for index, trace in enumerate(traces):
        classes.setdefault(observer_view(trace, observer), []).append(index)
    return list(classes.values())
