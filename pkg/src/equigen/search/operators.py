"""Variation operators over the five genotype keys.

Both operators treat the genotype as an ordered record of five keys and
repair keyword-set overlap with the drop-from-negative rule, so their
outputs always satisfy the genotype invariants.
"""

from __future__ import annotations

import random

from ..genotype import Individual, KeywordPools, SearchBounds, drop_collisions, new_random

__all__ = ["GENOTYPE_KEYS", "crossover_single_point", "mutate"]

# Fixed key order used by the cut index and the per-key mutation flips.
GENOTYPE_KEYS: tuple[str, ...] = (
    "guidance_tenths",
    "inference_steps",
    "positive_keywords",
    "negative_keywords",
    "weight",
)


def _values(ind: Individual) -> list:
    return [getattr(ind, key) for key in GENOTYPE_KEYS]


def _build(values: list) -> Individual:
    guidance_tenths, steps, positive, negative, weight = values
    positive, negative = drop_collisions(positive, negative)
    return Individual(
        guidance_tenths=guidance_tenths,
        inference_steps=steps,
        positive_keywords=positive,
        negative_keywords=negative,
        weight=weight,
    )


def crossover_single_point(
    a: Individual, b: Individual, cut: int
) -> tuple[Individual, Individual]:
    """Single-point crossover at key index ``cut``.

    Child one takes keys [0, cut] from ``a`` and the rest from ``b``; child
    two mirrors it. A cut at the last key returns clones of the parents.
    """
    if not 0 <= cut < len(GENOTYPE_KEYS):
        raise ValueError(f"cut must be in [0, {len(GENOTYPE_KEYS) - 1}], got {cut}")
    va, vb = _values(a), _values(b)
    child_one = va[: cut + 1] + vb[cut + 1 :]
    child_two = vb[: cut + 1] + va[cut + 1 :]
    return _build(child_one), _build(child_two)


def mutate(
    ind: Individual,
    rng: random.Random,
    inner_probability: float,
    bounds: SearchBounds,
    pools: KeywordPools,
) -> Individual:
    """Random-replacement mutation.

    Draws one fresh random individual, then independently replaces each of
    the five keys with the fresh value with probability
    ``inner_probability``. The fresh draw happens first and the flips follow
    key order, so replay is deterministic.
    """
    if not 0.0 <= inner_probability <= 1.0:
        raise ValueError("inner_probability must be in [0, 1]")
    fresh = new_random(rng, bounds, pools)
    current = _values(ind)
    donor = _values(fresh)
    mutated = [
        donor[i] if rng.random() < inner_probability else current[i]
        for i in range(len(GENOTYPE_KEYS))
    ]
    return _build(mutated)
