"""Evaluator implementations: in-process synthetic landscape, wire-protocol bridge client, cache."""

from .errors import EvaluatorError, EvaluatorTimeout, EvaluatorUnavailable, ProtocolError
from .protocol import (
    PROTOCOL_VERSION,
    BridgeHello,
    EvaluationRequest,
    EvaluationResponse,
    decode_hello,
    decode_request,
    decode_response,
    encode_hello,
    encode_request,
    encode_response,
)
from .base import Evaluator
from .synthetic import SyntheticEvaluator, SyntheticLandscape, synthetic_evaluate
from .cache import EvaluationCache
from .bridge import BridgeEvaluator, open_channel, parse_endpoint
from .conformance import ConformanceReport, run_protocol_check

__all__ = [
    "EvaluatorError",
    "EvaluatorTimeout",
    "EvaluatorUnavailable",
    "ProtocolError",
    "PROTOCOL_VERSION",
    "BridgeHello",
    "EvaluationRequest",
    "EvaluationResponse",
    "decode_hello",
    "decode_request",
    "decode_response",
    "encode_hello",
    "encode_request",
    "encode_response",
    "Evaluator",
    "SyntheticEvaluator",
    "SyntheticLandscape",
    "synthetic_evaluate",
    "EvaluationCache",
    "BridgeEvaluator",
    "open_channel",
    "parse_endpoint",
    "ConformanceReport",
    "run_protocol_check",
]
