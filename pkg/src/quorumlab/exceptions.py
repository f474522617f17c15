"""
Exception hierarchy shared by every quorumlab module.

Errors that describe bad input also derive from ``ValueError`` so callers
may catch either the domain type or the builtin.
"""

from typing import Dict, Optional


class QuorumLabError(Exception):
    """Base class for all quorumlab errors."""


class ConfigValidationError(QuorumLabError, ValueError):
    """An experiment or system configuration is invalid."""


class ScheduleValidationError(QuorumLabError, ValueError):
    """A schedule does not fit the system configuration."""


class HistoryValidationError(QuorumLabError, ValueError):
    """A history is malformed or breaks a checker precondition."""


class TraceFormatError(QuorumLabError, ValueError):
    """A trace or history file cannot be parsed."""


class OracleLimitError(QuorumLabError, ValueError):
    """The brute-force oracle was asked to enumerate too many operations."""


class DiagnosticError(QuorumLabError, ValueError):
    """A diagnostic was applied to a trace that lacks what it needs."""


class UnknownProtocolError(QuorumLabError, ValueError):
    """No protocol family is registered under the requested name."""


class ProtocolPreconditionError(QuorumLabError, ValueError):
    """A protocol does not qualify for the requested analysis."""


class ProtocolInvariantError(QuorumLabError, RuntimeError):
    """A protocol reached a state its correctness argument rules out."""


class ChainPreconditionError(QuorumLabError):
    """A chain has no return flip between its end executions."""

    def __init__(self, message: str, returns: Optional[Dict[int, str]] = None):
        super().__init__(message)
        self.returns = dict(returns or {})
