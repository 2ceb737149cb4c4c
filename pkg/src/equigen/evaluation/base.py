"""Evaluator interface the search engine drives."""

from __future__ import annotations

from typing import Protocol, runtime_checkable

from ..genotype import Individual
from ..objectives import EvaluationBatch

__all__ = ["Evaluator"]


@runtime_checkable
class Evaluator(Protocol):
    """Anything that can turn an individual into a batch of image records."""

    def evaluate(
        self, ind: Individual, base_prompt: str, images: int, seed: int
    ) -> EvaluationBatch:
        """Generate ``images`` images for ``ind`` and measure them.

        Implementations must be deterministic in (ind, base_prompt, images,
        seed) or explicitly documented otherwise. Failures raise
        EvaluatorError subclasses; they are never encoded as penalty fitness.
        """
        ...
