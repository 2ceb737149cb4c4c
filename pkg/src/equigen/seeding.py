"""Deterministic seed derivation shared by the engine, evaluators, and campaigns."""

from __future__ import annotations

import hashlib
import random

# Seeds stay inside 48 bits so they survive JSON and IEEE-754 doubles intact.
SEED_BITS = 48


def stable_hash(*parts: object, bits: int = SEED_BITS) -> int:
    """Order-sensitive integer hash of ``parts``, stable across processes and platforms.

    Parts are joined by a separator byte after ``str()`` conversion, so
    ``stable_hash(1, 23)`` and ``stable_hash(12, 3)`` differ.
    """
    payload = "\x1f".join(str(p) for p in parts).encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "big") % (1 << bits)


def counter_rng(*parts: object) -> random.Random:
    """A fresh ``random.Random`` keyed by the given counter parts."""
    return random.Random(stable_hash(*parts, bits=64))
