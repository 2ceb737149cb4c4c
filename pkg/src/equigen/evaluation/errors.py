"""Evaluator failure taxonomy.

EvaluatorError is the base: campaigns abort the current run and leave a
resumable checkpoint when one escapes. The subclasses distinguish transport
loss, malformed traffic, and deadline misses so callers can report precisely.
"""

from __future__ import annotations

__all__ = ["EvaluatorError", "EvaluatorUnavailable", "ProtocolError", "EvaluatorTimeout"]


class EvaluatorError(Exception):
    """An evaluation could not be completed."""


class EvaluatorUnavailable(EvaluatorError):
    """The evaluator endpoint is gone: process exited, connection refused, EOF."""


class ProtocolError(EvaluatorError):
    """The peer sent something that violates the wire protocol."""


class EvaluatorTimeout(EvaluatorError):
    """No response arrived within the configured deadline."""
