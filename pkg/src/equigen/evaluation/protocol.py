"""Newline-delimited JSON wire protocol between the engine and an image-model bridge.

One JSON object per line, UTF-8, exactly one request in flight:

* bridge -> engine on startup: ``{"hello": {"protocol": 1, "mode": "stub"}}``
* engine -> bridge: ``{"id": 7, "positive_prompt": "...", "negative_prompt": "",
  "guidance_scale": 7.0, "inference_steps": 50, "image_count": 20, "seed": 123}``
* bridge -> engine: ``{"id": 7, "records": [...]}`` or ``{"id": 7, "error": "..."}``

Record objects carry ``quality``, lowercase ``gender``/``ethnicity`` labels,
``cpu_kwh``, ``gpu_kwh``, and ``duration_s``. Encoding is canonical (sorted
keys, compact separators) so encode(decode(line)) == line for well-formed
canonical lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

from ..objectives import Ethnicity, Gender, ImageRecord
from .errors import ProtocolError

__all__ = [
    "PROTOCOL_VERSION",
    "BRIDGE_MODES",
    "EvaluationRequest",
    "EvaluationResponse",
    "BridgeHello",
    "encode_request",
    "decode_request",
    "encode_response",
    "decode_response",
    "encode_hello",
    "decode_hello",
    "record_to_wire",
    "record_from_wire",
]

PROTOCOL_VERSION = 1
BRIDGE_MODES = ("stub", "real")

_REQUEST_KEYS = {
    "id",
    "positive_prompt",
    "negative_prompt",
    "guidance_scale",
    "inference_steps",
    "image_count",
    "seed",
}
_RECORD_KEYS = {"quality", "gender", "ethnicity", "cpu_kwh", "gpu_kwh", "duration_s"}


def _dump(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _parse_line(line: str) -> dict:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ProtocolError(f"expected a JSON object, got {type(payload).__name__}")
    return payload


def _require(payload: dict, key: str, kinds: tuple[type, ...], what: str) -> Any:
    if key not in payload:
        raise ProtocolError(f"{what} is missing key {key!r}")
    value = payload[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ProtocolError(f"{what} key {key!r} has invalid type {type(value).__name__}")
    return value


@dataclass(frozen=True)
class EvaluationRequest:
    """One generate-and-measure job for an image-model bridge."""

    request_id: int
    positive_prompt: str
    negative_prompt: str
    guidance_scale: float
    inference_steps: int
    image_count: int = 20
    seed: int = 0

    def __post_init__(self) -> None:
        if self.request_id < 0:
            raise ValueError("request_id must be non-negative")
        if not self.positive_prompt:
            raise ValueError("positive_prompt must be non-empty")
        if self.guidance_scale < 0:
            raise ValueError("guidance_scale must be non-negative")
        if self.inference_steps < 1:
            raise ValueError("inference_steps must be positive")
        if self.image_count < 1:
            raise ValueError("image_count must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class EvaluationResponse:
    """Either a full record set or an error message, never both."""

    request_id: Optional[int]
    records: Optional[tuple[ImageRecord, ...]] = None
    error: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.records is None) == (self.error is None):
            raise ValueError("response must carry exactly one of records or error")
        if self.records is not None:
            object.__setattr__(self, "records", tuple(self.records))
            if not self.records:
                raise ValueError("records must be non-empty when present")


@dataclass(frozen=True)
class BridgeHello:
    protocol: int
    mode: str

    def __post_init__(self) -> None:
        if self.mode not in BRIDGE_MODES:
            raise ValueError(f"mode must be one of {BRIDGE_MODES}, got {self.mode!r}")


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

def record_to_wire(record: ImageRecord) -> dict:
    return {
        "quality": record.quality,
        "gender": record.gender.value,
        "ethnicity": record.ethnicity.value,
        "cpu_kwh": record.cpu_energy,
        "gpu_kwh": record.gpu_energy,
        "duration_s": record.duration,
    }


def record_from_wire(payload: dict) -> ImageRecord:
    if not isinstance(payload, dict):
        raise ProtocolError("record must be a JSON object")
    unknown = set(payload) - _RECORD_KEYS
    if unknown:
        raise ProtocolError(f"record has unknown keys {sorted(unknown)}")
    quality = _require(payload, "quality", (int, float), "record")
    gender_label = _require(payload, "gender", (str,), "record")
    ethnicity_label = _require(payload, "ethnicity", (str,), "record")
    cpu = _require(payload, "cpu_kwh", (int, float), "record")
    gpu = _require(payload, "gpu_kwh", (int, float), "record")
    duration = _require(payload, "duration_s", (int, float), "record")
    try:
        gender = Gender(gender_label)
    except ValueError:
        raise ProtocolError(f"unknown gender label {gender_label!r}") from None
    try:
        ethnicity = Ethnicity(ethnicity_label)
    except ValueError:
        raise ProtocolError(f"unknown ethnicity label {ethnicity_label!r}") from None
    try:
        return ImageRecord(
            quality=float(quality),
            gender=gender,
            ethnicity=ethnicity,
            cpu_energy=float(cpu),
            gpu_energy=float(gpu),
            duration=float(duration),
        )
    except ValueError as exc:
        raise ProtocolError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Requests
# ---------------------------------------------------------------------------

def encode_request(request: EvaluationRequest) -> str:
    return _dump(
        {
            "id": request.request_id,
            "positive_prompt": request.positive_prompt,
            "negative_prompt": request.negative_prompt,
            "guidance_scale": request.guidance_scale,
            "inference_steps": request.inference_steps,
            "image_count": request.image_count,
            "seed": request.seed,
        }
    )


def decode_request(line: str) -> EvaluationRequest:
    payload = _parse_line(line)
    unknown = set(payload) - _REQUEST_KEYS
    if unknown:
        raise ProtocolError(f"request has unknown keys {sorted(unknown)}")
    request_id = _require(payload, "id", (int,), "request")
    positive = _require(payload, "positive_prompt", (str,), "request")
    negative = _require(payload, "negative_prompt", (str,), "request")
    guidance = _require(payload, "guidance_scale", (int, float), "request")
    steps = _require(payload, "inference_steps", (int,), "request")
    count = _require(payload, "image_count", (int,), "request")
    seed = _require(payload, "seed", (int,), "request")
    try:
        return EvaluationRequest(
            request_id=request_id,
            positive_prompt=positive,
            negative_prompt=negative,
            guidance_scale=float(guidance),
            inference_steps=steps,
            image_count=count,
            seed=seed,
        )
    except ValueError as exc:
        raise ProtocolError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Responses
# ---------------------------------------------------------------------------

def encode_response(response: EvaluationResponse) -> str:
    payload: dict = {"id": response.request_id}
    if response.error is not None:
        payload["error"] = response.error
    else:
        payload["records"] = [record_to_wire(r) for r in response.records or ()]
    return _dump(payload)


def decode_response(line: str) -> EvaluationResponse:
    payload = _parse_line(line)
    unknown = set(payload) - {"id", "records", "error"}
    if unknown:
        raise ProtocolError(f"response has unknown keys {sorted(unknown)}")
    if "id" not in payload:
        raise ProtocolError("response is missing key 'id'")
    request_id = payload["id"]
    if request_id is not None and (not isinstance(request_id, int) or isinstance(request_id, bool)):
        raise ProtocolError("response id must be an integer or null")
    has_records = "records" in payload and payload["records"] is not None
    has_error = "error" in payload and payload["error"] is not None
    if has_records == has_error:
        raise ProtocolError("response must carry exactly one of records or error")
    if has_error:
        error = payload["error"]
        if not isinstance(error, str) or not error:
            raise ProtocolError("error must be a non-empty string")
        return EvaluationResponse(request_id=request_id, error=error)
    records_raw = payload["records"]
    if not isinstance(records_raw, list) or not records_raw:
        raise ProtocolError("records must be a non-empty array")
    records = tuple(record_from_wire(r) for r in records_raw)
    return EvaluationResponse(request_id=request_id, records=records)


# ---------------------------------------------------------------------------
# Handshake
# ---------------------------------------------------------------------------

def encode_hello(hello: BridgeHello) -> str:
    return _dump({"hello": {"protocol": hello.protocol, "mode": hello.mode}})


def decode_hello(line: str) -> BridgeHello:
    payload = _parse_line(line)
    if set(payload) != {"hello"}:
        raise ProtocolError("handshake line must contain exactly the 'hello' key")
    inner = payload["hello"]
    if not isinstance(inner, dict) or set(inner) != {"protocol", "mode"}:
        raise ProtocolError("hello must carry exactly 'protocol' and 'mode'")
    protocol = _require(inner, "protocol", (int,), "hello")
    mode = _require(inner, "mode", (str,), "hello")
    if mode not in BRIDGE_MODES:
        raise ProtocolError(f"unknown bridge mode {mode!r}")
    return BridgeHello(protocol=protocol, mode=mode)
