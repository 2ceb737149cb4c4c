"""Search-space representation: diffusion hyperparameters plus weighted prompt keywords.

A candidate configuration couples two sampler hyperparameters (guidance scale
and denoising step count) with subsets drawn from fixed positive/negative
keyword pools and one integer weight applied uniformly to every keyword.
Guidance lives on a 0.1 grid and is stored as integer tenths so grid
membership is exact and keys hash cleanly.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "SearchBounds",
    "KeywordPools",
    "Individual",
    "PromptPair",
    "new_random",
    "render_prompts",
    "canonical_key",
    "check_individual",
    "individual_to_dict",
    "individual_from_dict",
    "load_keyword_file",
    "default_pools",
]

_TENTH = 0.1


def _as_tenths(name: str, value: float) -> int:
    """Convert a guidance-scale quantity to integer tenths, rejecting off-grid values."""
    scaled = value * 10.0
    tenths = round(scaled)
    if abs(scaled - tenths) > 1e-6:
        raise ValueError(f"{name} must be a multiple of 0.1, got {value!r}")
    return tenths


# ---------------------------------------------------------------------------
# Bounds and keyword pools
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchBounds:
    """Inclusive ranges and grid steps for every genotype key."""

    guidance_min: float = 0.0
    guidance_max: float = 20.0
    guidance_step: float = 0.1
    steps_min: int = 25
    steps_max: int = 80
    steps_step: int = 1
    pos_count_max: int = 20
    neg_count_max: int = 25
    weight_min: int = 0
    weight_max: int = 5

    def __post_init__(self) -> None:
        if self.guidance_min < 0 or self.guidance_max < self.guidance_min:
            raise ValueError("guidance range must satisfy 0 <= min <= max")
        if self.guidance_step <= 0:
            raise ValueError("guidance_step must be positive")
        for name in ("guidance_min", "guidance_max", "guidance_step"):
            _as_tenths(name, getattr(self, name))
        if self.steps_min < 1 or self.steps_max < self.steps_min:
            raise ValueError("steps range must satisfy 1 <= min <= max")
        if self.steps_step < 1:
            raise ValueError("steps_step must be a positive integer")
        if self.pos_count_max < 0 or self.neg_count_max < 0:
            raise ValueError("keyword count caps must be non-negative")
        if self.weight_min < 0 or self.weight_max < self.weight_min:
            raise ValueError("weight range must satisfy 0 <= min <= max")

    @property
    def guidance_tenths_min(self) -> int:
        return _as_tenths("guidance_min", self.guidance_min)

    @property
    def guidance_tenths_max(self) -> int:
        return _as_tenths("guidance_max", self.guidance_max)

    @property
    def guidance_tenths_step(self) -> int:
        return _as_tenths("guidance_step", self.guidance_step)


def load_keyword_file(path: str | Path) -> tuple[str, ...]:
    """Read one keyword per line from a UTF-8 file.

    Blank lines and lines starting with ``#`` are ignored; surrounding
    whitespace is stripped. Duplicate entries are rejected.
    """
    entries: list[str] = []
    seen: set[str] = set()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        entry = raw.strip()
        if not entry or entry.startswith("#"):
            continue
        if entry in seen:
            raise ValueError(f"{path}:{lineno}: duplicate keyword {entry!r}")
        seen.add(entry)
        entries.append(entry)
    if not entries:
        raise ValueError(f"{path}: keyword file contains no entries")
    return tuple(entries)


@dataclass(frozen=True)
class KeywordPools:
    """Ordered keyword pools; rendering order follows pool order."""

    positive_pool: tuple[str, ...]
    negative_pool: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "positive_pool", tuple(self.positive_pool))
        object.__setattr__(self, "negative_pool", tuple(self.negative_pool))
        for label, pool in (("positive", self.positive_pool), ("negative", self.negative_pool)):
            if not pool:
                raise ValueError(f"{label} keyword pool is empty")
            if any((not kw) or kw != kw.strip() for kw in pool):
                raise ValueError(f"{label} pool contains empty or unstripped entries")
            if len(set(pool)) != len(pool):
                raise ValueError(f"{label} pool contains duplicates")

    @classmethod
    def from_files(cls, positive_path: str | Path, negative_path: str | Path) -> "KeywordPools":
        return cls(load_keyword_file(positive_path), load_keyword_file(negative_path))


def default_pools() -> KeywordPools:
    """Pools shipped with the package (20 positive, 25 negative entries)."""
    data = resources.files("equigen.data")
    with resources.as_file(data / "keywords_positive.txt") as pos_path:
        positive = load_keyword_file(pos_path)
    with resources.as_file(data / "keywords_negative.txt") as neg_path:
        negative = load_keyword_file(neg_path)
    return KeywordPools(positive, negative)


# ---------------------------------------------------------------------------
# Individuals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Individual:
    """One point of the search space.

    Keyword tuples preserve pool order, which makes prompt rendering a pure
    function of the individual. Genotype identity is order-insensitive and
    given by :func:`canonical_key`.
    """

    guidance_tenths: int
    inference_steps: int
    positive_keywords: tuple[str, ...] = ()
    negative_keywords: tuple[str, ...] = ()
    weight: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "positive_keywords", tuple(self.positive_keywords))
        object.__setattr__(self, "negative_keywords", tuple(self.negative_keywords))
        if not isinstance(self.guidance_tenths, int) or self.guidance_tenths < 0:
            raise ValueError("guidance_tenths must be a non-negative integer")
        if not isinstance(self.inference_steps, int) or self.inference_steps < 1:
            raise ValueError("inference_steps must be a positive integer")
        if not isinstance(self.weight, int) or self.weight < 0:
            raise ValueError("weight must be a non-negative integer")
        pos, neg = self.positive_keywords, self.negative_keywords
        if len(set(pos)) != len(pos) or len(set(neg)) != len(neg):
            raise ValueError("keyword tuples must not contain duplicates")
        overlap = set(pos) & set(neg)
        if overlap:
            raise ValueError(f"positive and negative keywords overlap: {sorted(overlap)}")

    @property
    def guidance(self) -> float:
        """Guidance scale as a float (tenths / 10)."""
        return self.guidance_tenths / 10.0


@dataclass(frozen=True)
class PromptPair:
    positive_prompt: str
    negative_prompt: str


def check_individual(ind: Individual, bounds: SearchBounds, pools: KeywordPools) -> None:
    """Validate every genotype invariant against concrete bounds and pools.

    Raises ValueError with the first violated constraint. Called at the
    evaluation boundary, so nothing off-grid can ever reach an evaluator.
    """
    lo, hi, step = bounds.guidance_tenths_min, bounds.guidance_tenths_max, bounds.guidance_tenths_step
    if not (lo <= ind.guidance_tenths <= hi) or (ind.guidance_tenths - lo) % step != 0:
        raise ValueError(f"guidance_tenths {ind.guidance_tenths} off the [{lo},{hi}]/{step} grid")
    if (
        not (bounds.steps_min <= ind.inference_steps <= bounds.steps_max)
        or (ind.inference_steps - bounds.steps_min) % bounds.steps_step != 0
    ):
        raise ValueError(f"inference_steps {ind.inference_steps} outside bounds")
    if len(ind.positive_keywords) > bounds.pos_count_max:
        raise ValueError("too many positive keywords")
    if len(ind.negative_keywords) > bounds.neg_count_max:
        raise ValueError("too many negative keywords")
    if not set(ind.positive_keywords) <= set(pools.positive_pool):
        raise ValueError("positive keywords not drawn from the positive pool")
    if not set(ind.negative_keywords) <= set(pools.negative_pool):
        raise ValueError("negative keywords not drawn from the negative pool")
    if not (bounds.weight_min <= ind.weight <= bounds.weight_max):
        raise ValueError(f"weight {ind.weight} outside [{bounds.weight_min},{bounds.weight_max}]")


def _ordered_subset(pool: Sequence[str], chosen: Iterable[str]) -> tuple[str, ...]:
    chosen_set = set(chosen)
    return tuple(kw for kw in pool if kw in chosen_set)


def drop_collisions(
    positive: Sequence[str], negative: Sequence[str]
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Repair rule for keyword overlap: colliding keywords leave the negative set."""
    pos = tuple(positive)
    pos_set = set(pos)
    neg = tuple(kw for kw in negative if kw not in pos_set)
    return pos, neg


def new_random(rng: random.Random, bounds: SearchBounds, pools: KeywordPools) -> Individual:
    """Draw a uniform random individual.

    Counts are drawn uniformly first, then that many distinct keywords are
    sampled from each pool; a positive/negative collision drops the keyword
    from the negative set. Draw order is fixed (guidance, steps, positive
    count+sample, negative count+sample, weight) so replay is deterministic.
    """
    lo, hi, step = bounds.guidance_tenths_min, bounds.guidance_tenths_max, bounds.guidance_tenths_step
    guidance_tenths = lo + step * rng.randrange((hi - lo) // step + 1)
    steps = bounds.steps_min + bounds.steps_step * rng.randrange(
        (bounds.steps_max - bounds.steps_min) // bounds.steps_step + 1
    )
    pos_count = rng.randint(0, min(bounds.pos_count_max, len(pools.positive_pool)))
    positive = _ordered_subset(pools.positive_pool, rng.sample(pools.positive_pool, pos_count))
    neg_count = rng.randint(0, min(bounds.neg_count_max, len(pools.negative_pool)))
    negative = _ordered_subset(pools.negative_pool, rng.sample(pools.negative_pool, neg_count))
    positive, negative = drop_collisions(positive, negative)
    weight = rng.randint(bounds.weight_min, bounds.weight_max)
    return Individual(guidance_tenths, steps, positive, negative, weight)


def render_prompts(ind: Individual, base_prompt: str) -> PromptPair:
    """Render the prompt pair sent to an image model.

    Each keyword gets ``weight`` trailing ``+`` characters (weight 0 keeps the
    bare keyword). The positive prompt is the base prompt followed by the
    weighted positive keywords, comma separated; the negative prompt is the
    weighted negative keywords alone, empty when there are none.
    """
    if not base_prompt or not base_prompt.strip():
        raise ValueError("base prompt must be non-empty")
    suffix = "+" * ind.weight
    positive = ", ".join([base_prompt] + [kw + suffix for kw in ind.positive_keywords])
    negative = ", ".join(kw + suffix for kw in ind.negative_keywords)
    return PromptPair(positive, negative)


def canonical_key(ind: Individual) -> str:
    """Injective, order-insensitive string identity of a genotype."""
    payload = [
        ind.guidance_tenths,
        ind.inference_steps,
        ind.weight,
        sorted(ind.positive_keywords),
        sorted(ind.negative_keywords),
    ]
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False)


def individual_to_dict(ind: Individual) -> dict:
    return {
        "guidance_tenths": ind.guidance_tenths,
        "inference_steps": ind.inference_steps,
        "positive_keywords": list(ind.positive_keywords),
        "negative_keywords": list(ind.negative_keywords),
        "weight": ind.weight,
    }


def individual_from_dict(payload: dict) -> Individual:
    return Individual(
        guidance_tenths=int(payload["guidance_tenths"]),
        inference_steps=int(payload["inference_steps"]),
        positive_keywords=tuple(payload.get("positive_keywords", ())),
        negative_keywords=tuple(payload.get("negative_keywords", ())),
        weight=int(payload.get("weight", 0)),
    )
