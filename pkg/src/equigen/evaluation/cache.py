"""Genotype-keyed evaluation cache.

Re-encountered genotypes (duplicate offspring, elitist survivors) must not
cost a second model invocation. The cache key is the canonical genotype key
plus base prompt, image count, and request seed, so distinct evaluation
settings never collide. Failed evaluations are not cached: the exception
propagates and a retry is allowed to succeed.
"""

from __future__ import annotations

import threading

from ..genotype import Individual, canonical_key
from ..objectives import EvaluationBatch
from .base import Evaluator

__all__ = ["EvaluationCache"]


class EvaluationCache:
    """Thread-safe memo of evaluator results."""

    def __init__(self) -> None:
        self._entries: dict[tuple[str, str, int, int], EvaluationBatch] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    def get_or_evaluate(
        self,
        evaluator: Evaluator,
        ind: Individual,
        base_prompt: str,
        images: int,
        seed: int,
    ) -> tuple[EvaluationBatch, bool]:
        """Return (batch, was_cached). Only successful evaluations are stored."""
        key = (canonical_key(ind), base_prompt, images, seed)
        with self._lock:
            cached = self._entries.get(key)
            if cached is not None:
                self.hits += 1
                return cached, True
        # Evaluate outside the lock; the protocol layer serializes requests itself.
        batch = evaluator.evaluate(ind, base_prompt, images, seed)
        with self._lock:
            self._entries.setdefault(key, batch)
            self.misses += 1
        return batch, False
