"""Deterministic synthetic image-model landscape for tests and dry runs.

The landscape is a pure function of the request plus its own parameters:

* quality follows a bell curve in guidance scale centered on
  ``quality_peak_guidance``, rises mildly with inference steps, and gains a
  small bonus per positive keyword;
* gender and ethnicity labels are drawn from skewed distributions whose skew
  decays with the number of bias-influencing keywords present in either
  prompt (no keywords reproduces a heavily skewed default model);
* CPU/GPU energy and duration are affine in inference steps with bounded
  multiplicative noise.

All randomness comes from a counter-based generator keyed by
(landscape.seed, request.seed, image index), so identical requests always
produce identical records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..genotype import Individual, canonical_key, render_prompts
from ..objectives import EvaluationBatch, Ethnicity, Gender, ImageRecord
from ..seeding import counter_rng
from .protocol import EvaluationRequest, EvaluationResponse

__all__ = [
    "DEFAULT_BIAS_KEYWORDS",
    "SyntheticLandscape",
    "synthetic_evaluate",
    "SyntheticEvaluator",
]

# Personality-trait keywords that nudge demographic variety when prompted.
DEFAULT_BIAS_KEYWORDS: frozenset[str] = frozenset(
    {
        "ambitious",
        "intelligent",
        "supportive",
        "confident",
        "compassionate",
        "determined",
        "creative",
        "friendly",
        "hardworking",
        "approachable",
    }
)


@dataclass(frozen=True)
class SyntheticLandscape:
    """Tunable parameters of the synthetic model."""

    quality_peak_guidance: float = 7.0
    quality_width: float = 1.8
    steps_quality_gain: float = 0.005
    keyword_quality_gain: float = 0.005
    energy_per_step: float = 4e-6
    gpu_per_cpu: float = 9.0
    seconds_per_step: float = 0.65
    gender_skew_decay: float = 0.4
    ethnicity_skew_decay: float = 0.35
    noise_amplitude: float = 0.01
    bias_keyword_ids: frozenset[str] = field(default_factory=lambda: DEFAULT_BIAS_KEYWORDS)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.quality_width <= 0:
            raise ValueError("quality_width must be positive")
        if self.energy_per_step <= 0 or self.gpu_per_cpu <= 0 or self.seconds_per_step <= 0:
            raise ValueError("energy parameters must be positive")
        if not 0.0 <= self.noise_amplitude < 0.5:
            raise ValueError("noise_amplitude must be in [0, 0.5)")
        object.__setattr__(self, "bias_keyword_ids", frozenset(self.bias_keyword_ids))


def _prompt_keywords(prompt: str, skip_first: bool) -> list[str]:
    """Split a rendered prompt into keyword ids, stripping weight suffixes.

    The first comma-separated segment of a positive prompt is the base prompt
    and is skipped; every other segment is a keyword with optional trailing
    ``+`` weight marks.
    """
    segments = [s.strip() for s in prompt.split(",")]
    segments = [s for s in segments if s]
    if skip_first and segments:
        segments = segments[1:]
    return [s.rstrip("+") for s in segments]


def _ethnicity_draw(rng_value: float, dominant_share: float) -> Ethnicity:
    # Remaining mass splits 50/30/20 across asian/black/arab.
    rest = 1.0 - dominant_share
    cut_white = dominant_share
    cut_asian = cut_white + rest * 0.5
    cut_black = cut_asian + rest * 0.3
    if rng_value < cut_white:
        return Ethnicity.WHITE
    if rng_value < cut_asian:
        return Ethnicity.ASIAN
    if rng_value < cut_black:
        return Ethnicity.BLACK
    return Ethnicity.ARAB


def synthetic_evaluate(landscape: SyntheticLandscape, request: EvaluationRequest) -> EvaluationResponse:
    """Produce one deterministic record per requested image."""
    positive_keywords = _prompt_keywords(request.positive_prompt, skip_first=True)
    negative_keywords = _prompt_keywords(request.negative_prompt, skip_first=False)
    bias_ids = {kw for kw in positive_keywords + negative_keywords if kw in landscape.bias_keyword_ids}
    k_bias = len(bias_ids)

    g = request.guidance_scale
    bell = math.exp(-(((g - landscape.quality_peak_guidance) / landscape.quality_width) ** 2))
    steps_factor = 1.0 + landscape.steps_quality_gain * (request.inference_steps / 100.0)
    keyword_bonus = landscape.keyword_quality_gain * min(len(positive_keywords), 10)
    base_quality = bell * steps_factor + keyword_bonus

    p_male = 0.5 + 0.5 * math.exp(-landscape.gender_skew_decay * k_bias)
    dominant_share = 0.25 + 0.75 * math.exp(-landscape.ethnicity_skew_decay * k_bias)

    amp = landscape.noise_amplitude
    records = []
    for index in range(request.image_count):
        rng = counter_rng(landscape.seed, request.seed, index)
        # Fixed draw order: quality noise, gender, ethnicity, cpu, gpu, duration.
        quality = min(1.0, max(0.0, base_quality + rng.uniform(-amp, amp)))
        gender = Gender.MALE if rng.random() < p_male else Gender.FEMALE
        ethnicity = _ethnicity_draw(rng.random(), dominant_share)
        cpu = landscape.energy_per_step * request.inference_steps * (1.0 + rng.uniform(-amp, amp))
        gpu = cpu * landscape.gpu_per_cpu * (1.0 + rng.uniform(-amp, amp))
        duration = landscape.seconds_per_step * request.inference_steps * (1.0 + rng.uniform(-amp, amp))
        records.append(
            ImageRecord(
                quality=quality,
                gender=gender,
                ethnicity=ethnicity,
                cpu_energy=cpu,
                gpu_energy=gpu,
                duration=duration,
            )
        )
    return EvaluationResponse(request_id=request.request_id, records=tuple(records))


class SyntheticEvaluator:
    """In-process Evaluator backed by a SyntheticLandscape."""

    def __init__(self, landscape: SyntheticLandscape | None = None) -> None:
        self.landscape = landscape or SyntheticLandscape()

    def evaluate(
        self, ind: Individual, base_prompt: str, images: int, seed: int
    ) -> EvaluationBatch:
        prompts = render_prompts(ind, base_prompt)
        request = EvaluationRequest(
            request_id=0,
            positive_prompt=prompts.positive_prompt,
            negative_prompt=prompts.negative_prompt,
            guidance_scale=ind.guidance,
            inference_steps=ind.inference_steps,
            image_count=images,
            seed=seed,
        )
        response = synthetic_evaluate(self.landscape, request)
        assert response.records is not None  # synthetic evaluation never errors
        return EvaluationBatch(individual_key=canonical_key(ind), records=response.records)
