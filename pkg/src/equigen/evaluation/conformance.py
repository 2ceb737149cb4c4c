"""Protocol conformance checks run against a live bridge endpoint.

Drives the same client stack the engine uses and verifies: handshake,
round-trip shape, record-count honoring, determinism in the request seed,
and recovery after a malformed line. Used by the ``protocol-check`` CLI
subcommand and the bridge acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .bridge import BridgeEvaluator, open_channel
from .errors import EvaluatorError, ProtocolError
from .protocol import EvaluationRequest, decode_response

__all__ = ["CheckResult", "ConformanceReport", "run_protocol_check"]

_PROBE_PROMPT = "Photo portrait of a person that smiles"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ConformanceReport:
    mode: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, passed, detail))


def _probe_request(request_id: int, seed: int, image_count: int) -> EvaluationRequest:
    return EvaluationRequest(
        request_id=request_id,
        positive_prompt=_PROBE_PROMPT + ", photograph++",
        negative_prompt="illustration++",
        guidance_scale=7.0,
        inference_steps=50,
        image_count=image_count,
        seed=seed,
    )


def run_protocol_check(endpoint: str | Sequence[str], timeout: float = 60.0) -> ConformanceReport:
    """Run the conformance suite; raises EvaluatorUnavailable if nothing answers."""
    channel, hello = open_channel(endpoint, timeout)
    client = BridgeEvaluator(channel, hello)
    report = ConformanceReport(mode=hello.mode)
    report.add("handshake", True, f"protocol {hello.protocol}, mode {hello.mode}")
    try:
        # Round trip: id echo, record count, field domains (decode validates).
        try:
            first = client.request(_probe_request(request_id=1, seed=4242, image_count=5))
            if first.error is not None:
                report.add("round_trip", False, f"bridge errored on a valid request: {first.error}")
            else:
                count = len(first.records or ())
                report.add("round_trip", count == 5, f"received {count} records, expected 5")
        except EvaluatorError as exc:
            report.add("round_trip", False, str(exc))
            return report

        # Determinism: same seed under a fresh id must reproduce the records.
        try:
            again = client.request(_probe_request(request_id=2, seed=4242, image_count=5))
            report.add(
                "determinism",
                again.error is None and again.records == first.records,
                "identical seed must reproduce identical records",
            )
        except EvaluatorError as exc:
            report.add("determinism", False, str(exc))
            return report

        # Image count: a different count must be honored exactly.
        try:
            three = client.request(_probe_request(request_id=3, seed=7, image_count=3))
            count = len(three.records or ())
            report.add("image_count", three.error is None and count == 3, f"received {count} records, expected 3")
        except EvaluatorError as exc:
            report.add("image_count", False, str(exc))
            return report

        # Error recovery: a malformed line gets an error response and the
        # bridge keeps serving afterwards.
        try:
            channel.write_line("this is not json")
            error_line = channel.read_line()
            error_resp = decode_response(error_line)
            report.add(
                "malformed_line_reported",
                error_resp.error is not None,
                "bridge must answer garbage with an error object",
            )
        except (EvaluatorError, ProtocolError) as exc:
            report.add("malformed_line_reported", False, str(exc))
            return report
        try:
            after = client.request(_probe_request(request_id=4, seed=4242, image_count=5))
            report.add(
                "recovery_after_error",
                after.error is None and after.records == first.records,
                "bridge must keep serving deterministically after a bad line",
            )
        except EvaluatorError as exc:
            report.add("recovery_after_error", False, str(exc))
    finally:
        client.close()
    return report
