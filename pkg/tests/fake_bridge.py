"""Stand-in image-model bridge used by the client and CLI tests.

Speaks the newline-delimited JSON protocol on stdin/stdout without
importing the package under test, so client and server interpretations
of the wire format stay independent. Flags inject specific misbehaviours
(bad handshake, error replies, garbage lines, short record sets, going
silent) to exercise every client failure path.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

GENDERS = ("male", "female", "unknown")
ETHNICITIES = ("arab", "asian", "black", "white", "unknown")


def _chunks(landscape_seed: int, request_seed: int, index: int) -> list[int]:
    key = f"{landscape_seed}|{request_seed}|{index}".encode("utf-8")
    digest = hashlib.sha256(key).digest()
    return [int.from_bytes(digest[i : i + 4], "big") for i in range(0, 24, 4)]


def make_record(landscape_seed: int, request_seed: int, index: int, steps: int) -> dict:
    h0, h1, h2, h3, h4, h5 = _chunks(landscape_seed, request_seed, index)
    quality = 0.25 + (h0 % 10_000) / 20_000.0
    gender = GENDERS[0] if h1 % 20 < 10 else (GENDERS[1] if h1 % 20 < 19 else GENDERS[2])
    ethnicity = ETHNICITIES[h2 % 5]
    cpu = 1e-6 * steps * (1.0 + (h3 % 100) / 1000.0)
    gpu = cpu * 8.0 * (1.0 + (h4 % 100) / 1000.0)
    duration = 0.5 * steps * (1.0 + (h5 % 100) / 1000.0)
    return {
        "quality": quality,
        "gender": gender,
        "ethnicity": ethnicity,
        "cpu_kwh": cpu,
        "gpu_kwh": gpu,
        "duration_s": duration,
    }


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, separators=(",", ":")), flush=True)


def _parse_request(line: str) -> tuple[dict | None, str | None]:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        return None, f"cannot parse request: {exc}"
    if not isinstance(payload, dict):
        return None, "request must be a JSON object"
    required = {
        "id",
        "positive_prompt",
        "negative_prompt",
        "guidance_scale",
        "inference_steps",
        "image_count",
        "seed",
    }
    missing = required - set(payload)
    if missing:
        return payload, f"request is missing keys {sorted(missing)}"
    return payload, None


def main() -> int:
    parser = argparse.ArgumentParser(description="protocol test double")
    parser.add_argument("--mode", default="stub")
    parser.add_argument("--protocol", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--skip-hello", action="store_true")
    parser.add_argument("--raw-hello", default=None, help="verbatim handshake line")
    parser.add_argument("--fail-request", type=int, default=0, help="error on the Nth request")
    parser.add_argument("--garbage-response", type=int, default=0, help="garbage on the Nth reply")
    parser.add_argument("--short-count", action="store_true", help="send one record too few")
    parser.add_argument("--bad-id", action="store_true", help="echo a wrong response id")
    parser.add_argument("--silent-after", type=int, default=-1, help="stop replying after N")
    args = parser.parse_args()

    if args.raw_hello is not None:
        print(args.raw_hello, flush=True)
    elif not args.skip_hello:
        _emit({"hello": {"protocol": args.protocol, "mode": args.mode}})

    served = 0
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        if 0 <= args.silent_after <= served:
            served += 1
            continue
        payload, problem = _parse_request(line)
        if problem is not None:
            rid = payload.get("id") if isinstance(payload, dict) else None
            _emit({"id": rid if isinstance(rid, int) else None, "error": problem})
            served += 1
            continue
        served += 1
        if args.garbage_response == served:
            print("%% this line is not JSON %%", flush=True)
            continue
        if args.fail_request == served:
            _emit({"id": payload["id"], "error": "synthetic failure for testing"})
            continue
        count = int(payload["image_count"])
        if args.short_count:
            count = max(1, count - 1)
        records = [
            make_record(args.seed, int(payload["seed"]), i, int(payload["inference_steps"]))
            for i in range(count)
        ]
        rid = payload["id"] + 1000 if args.bad_id else payload["id"]
        _emit({"id": rid, "records": records})
    return 0


if __name__ == "__main__":
    sys.exit(main())
