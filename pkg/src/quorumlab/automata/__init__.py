"""
Protocol Automata

Modules:
- base: messages, client/server automaton interface, protocol family
- server: full-info server state and its pure transitions
- w2r1: fast-read protocol
- abd: two-round baseline
- naive: one-round-write strawman
"""

from typing import Dict, List

from ..exceptions import UnknownProtocolError
from .abd import ABD
from .base import ProtocolFamily
from .naive import NAIVE_W1R2
from .w2r1 import W2R1

PROTOCOLS: Dict[str, ProtocolFamily] = {p.name: p for p in (W2R1, ABD, NAIVE_W1R2)}


def get_protocol(name: str) -> ProtocolFamily:
    """Look up a registered protocol by name."""
    try:
        return PROTOCOLS[name]
    except KeyError:
        raise UnknownProtocolError(f"unknown protocol {name!r}; choose from {protocol_names()}") from None


def protocol_names() -> List[str]:
    return sorted(PROTOCOLS)
