"""Fitness definitions: image quality, demographic bias, and energy aggregation.

A batch of labeled images collapses into six tracked metrics. Four of them
(image quality up, gender bias down, ethnic bias down, CPU energy down) are
the default search objectives; GPU energy and wall-clock duration are always
measured alongside so analyses can compare strategies on all six.
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

__all__ = [
    "Gender",
    "Ethnicity",
    "ETHNICITY_CLASSES",
    "Direction",
    "Objective",
    "ObjectiveSpec",
    "SEARCH_OBJECTIVE_NAMES",
    "TRACKED_OBJECTIVE_NAMES",
    "ImageRecord",
    "EvaluationBatch",
    "MeasuredObjectives",
    "FitnessVector",
    "image_quality",
    "aggregate_quality",
    "gender_bias",
    "ethnic_bias",
    "energy_fitness",
    "fitness_vector",
]


class Gender(str, Enum):
    MALE = "male"
    FEMALE = "female"
    UNKNOWN = "unknown"


class Ethnicity(str, Enum):
    ARAB = "arab"
    ASIAN = "asian"
    BLACK = "black"
    WHITE = "white"
    UNKNOWN = "unknown"


# Fixed taxonomy for the spread computation; UNKNOWN never enters it.
ETHNICITY_CLASSES: tuple[Ethnicity, ...] = (
    Ethnicity.ARAB,
    Ethnicity.ASIAN,
    Ethnicity.BLACK,
    Ethnicity.WHITE,
)


class Direction(str, Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


@dataclass(frozen=True)
class Objective:
    name: str
    direction: Direction


SEARCH_OBJECTIVE_NAMES: tuple[str, ...] = (
    "image_quality",
    "gender_bias",
    "ethnic_bias",
    "cpu_energy",
)
TRACKED_OBJECTIVE_NAMES: tuple[str, ...] = SEARCH_OBJECTIVE_NAMES + ("gpu_energy", "duration")

_CANONICAL_DIRECTIONS: dict[str, Direction] = {
    "image_quality": Direction.MAXIMIZE,
    "gender_bias": Direction.MINIMIZE,
    "ethnic_bias": Direction.MINIMIZE,
    "cpu_energy": Direction.MINIMIZE,
    "gpu_energy": Direction.MINIMIZE,
    "duration": Direction.MINIMIZE,
}


def canonical_objective(name: str) -> Objective:
    try:
        return Objective(name, _CANONICAL_DIRECTIONS[name])
    except KeyError:
        raise ValueError(f"unknown objective {name!r}; expected one of {TRACKED_OBJECTIVE_NAMES}") from None


@dataclass(frozen=True)
class ObjectiveSpec:
    """Ordered, named objective set with fixed optimization directions."""

    objectives: tuple[Objective, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "objectives", tuple(self.objectives))
        if not self.objectives:
            raise ValueError("objective spec must contain at least one objective")
        names = [o.name for o in self.objectives]
        if len(set(names)) != len(names):
            raise ValueError("objective names must be unique")
        for obj in self.objectives:
            expected = _CANONICAL_DIRECTIONS.get(obj.name)
            if expected is None:
                raise ValueError(f"unknown objective {obj.name!r}")
            if obj.direction is not expected:
                raise ValueError(f"objective {obj.name!r} must be {expected.value}d")

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "ObjectiveSpec":
        return cls(tuple(canonical_objective(n) for n in names))

    @classmethod
    def default_search(cls) -> "ObjectiveSpec":
        """The four-objective search default."""
        return cls.from_names(SEARCH_OBJECTIVE_NAMES)

    @classmethod
    def all_tracked(cls) -> "ObjectiveSpec":
        """All six tracked metrics, for analyses."""
        return cls.from_names(TRACKED_OBJECTIVE_NAMES)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(o.name for o in self.objectives)

    @property
    def directions(self) -> tuple[Direction, ...]:
        return tuple(o.direction for o in self.objectives)

    def __len__(self) -> int:
        return len(self.objectives)

    def index(self, name: str) -> int:
        return self.names.index(name)


# ---------------------------------------------------------------------------
# Image records and batches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImageRecord:
    """Per-image measurement: detector confidence, labels, and resource use."""

    quality: float
    gender: Gender
    ethnicity: Ethnicity
    cpu_energy: float
    gpu_energy: float
    duration: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.quality <= 1.0:
            raise ValueError(f"quality must be in [0, 1], got {self.quality!r}")
        if self.cpu_energy < 0 or self.gpu_energy < 0 or self.duration < 0:
            raise ValueError("energy and duration must be non-negative")
        if not isinstance(self.gender, Gender):
            raise ValueError(f"gender must be a Gender, got {self.gender!r}")
        if not isinstance(self.ethnicity, Ethnicity):
            raise ValueError(f"ethnicity must be an Ethnicity, got {self.ethnicity!r}")


@dataclass(frozen=True)
class EvaluationBatch:
    """All per-image records produced for one individual."""

    individual_key: str
    records: tuple[ImageRecord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        if not self.records:
            raise ValueError("evaluation batch must contain at least one record")


@dataclass(frozen=True)
class MeasuredObjectives:
    """All six tracked metrics for one batch, regardless of the search spec."""

    image_quality: float
    gender_bias: float
    ethnic_bias: float
    cpu_energy: float
    gpu_energy: float
    duration: float

    def get(self, name: str) -> float:
        if name not in TRACKED_OBJECTIVE_NAMES:
            raise ValueError(f"unknown objective {name!r}")
        return getattr(self, name)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in TRACKED_OBJECTIVE_NAMES}


@dataclass(frozen=True)
class FitnessVector:
    """Searched objective values (spec order) plus the full measured six-tuple."""

    values: tuple[float, ...]
    measured: MeasuredObjectives

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


# ---------------------------------------------------------------------------
# Metric computations
# ---------------------------------------------------------------------------

def image_quality(confidences: Sequence[float]) -> float:
    """Mean detector confidence for one image; zero when nothing was detected."""
    for c in confidences:
        if not 0.0 <= c <= 1.0:
            raise ValueError(f"confidence outside [0, 1]: {c!r}")
    if not confidences:
        return 0.0
    return sum(confidences) / len(confidences)


def aggregate_quality(batch: EvaluationBatch) -> float:
    """Mean per-image quality across the batch."""
    return sum(r.quality for r in batch.records) / len(batch.records)


def gender_bias(batch: EvaluationBatch) -> float:
    """Absolute male/female share difference over records with a known gender.

    Batches with no known-gender records score the worst possible value, 1.0.
    """
    males = sum(1 for r in batch.records if r.gender is Gender.MALE)
    females = sum(1 for r in batch.records if r.gender is Gender.FEMALE)
    known = males + females
    if known == 0:
        return 1.0
    return abs(males - females) / known


def ethnic_bias(batch: EvaluationBatch) -> float:
    """Largest minus smallest ethnicity share over the fixed four-class taxonomy.

    Shares are taken over records with a known ethnicity; classes that never
    occur count as share 0, so a single-class batch scores 1.0. Batches with
    no known-ethnicity records also score 1.0.
    """
    counts = Counter(r.ethnicity for r in batch.records if r.ethnicity is not Ethnicity.UNKNOWN)
    known = sum(counts.values())
    if known == 0:
        return 1.0
    shares = [counts.get(cls, 0) / known for cls in ETHNICITY_CLASSES]
    return max(shares) - min(shares)


def energy_fitness(batch: EvaluationBatch) -> tuple[float, float, float]:
    """Median (cpu_energy, gpu_energy, duration) across the batch.

    ``statistics.median`` semantics: even-length batches take the midpoint of
    the two central order statistics.
    """
    cpu = statistics.median(r.cpu_energy for r in batch.records)
    gpu = statistics.median(r.gpu_energy for r in batch.records)
    duration = statistics.median(r.duration for r in batch.records)
    return cpu, gpu, duration


def fitness_vector(batch: EvaluationBatch, spec: ObjectiveSpec) -> FitnessVector:
    """Collapse a batch into a fitness vector for the given objective spec."""
    cpu, gpu, duration = energy_fitness(batch)
    measured = MeasuredObjectives(
        image_quality=aggregate_quality(batch),
        gender_bias=gender_bias(batch),
        ethnic_bias=ethnic_bias(batch),
        cpu_energy=cpu,
        gpu_energy=gpu,
        duration=duration,
    )
    values = tuple(measured.get(name) for name in spec.names)
    return FitnessVector(values=values, measured=measured)
