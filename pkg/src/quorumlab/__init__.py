"""
Quorum Lab Module

Deterministic simulation and checking of multi-writer atomic register
emulations over crash-prone servers: protocol automata, a discrete-event
simulator, an atomicity checker and impossibility-chain builders.
"""

__version__ = "0.1.0"
