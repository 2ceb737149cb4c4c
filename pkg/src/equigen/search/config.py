"""Search run configuration shared by every strategy."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..objectives import ObjectiveSpec
from ..validation import check_positive_int, check_probability, check_seed

__all__ = ["SearchConfig", "DEFAULT_BASE_PROMPT"]

DEFAULT_BASE_PROMPT = "Photo portrait of a Software Engineer that codes"


@dataclass(frozen=True)
class SearchConfig:
    """Operator rates, budgets, and evaluation settings for one search run."""

    population_size: int = 30
    generations: int = 25
    crossover_prob: float = 0.8
    mutation_prob: float = 0.2
    inner_mutation_prob: float = 0.2
    selection_rate: int = 5
    objective_spec: ObjectiveSpec = field(default_factory=ObjectiveSpec.default_search)
    seed: int = 0
    images_per_individual: int = 20
    base_prompt: str = DEFAULT_BASE_PROMPT

    def __post_init__(self) -> None:
        check_positive_int("population_size", self.population_size, minimum=2)
        check_positive_int("generations", self.generations, minimum=0)
        check_probability("crossover_prob", self.crossover_prob)
        check_probability("mutation_prob", self.mutation_prob)
        check_probability("inner_mutation_prob", self.inner_mutation_prob)
        check_positive_int("selection_rate", self.selection_rate, minimum=2)
        check_seed("seed", self.seed)
        check_positive_int("images_per_individual", self.images_per_individual, minimum=1)
        if not self.base_prompt or not self.base_prompt.strip():
            raise ValueError("base_prompt must be non-empty")

    def to_dict(self) -> dict:
        return {
            "population_size": self.population_size,
            "generations": self.generations,
            "crossover_prob": self.crossover_prob,
            "mutation_prob": self.mutation_prob,
            "inner_mutation_prob": self.inner_mutation_prob,
            "selection_rate": self.selection_rate,
            "objectives": list(self.objective_spec.names),
            "seed": self.seed,
            "images_per_individual": self.images_per_individual,
            "base_prompt": self.base_prompt,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SearchConfig":
        return cls(
            population_size=int(payload["population_size"]),
            generations=int(payload["generations"]),
            crossover_prob=float(payload["crossover_prob"]),
            mutation_prob=float(payload["mutation_prob"]),
            inner_mutation_prob=float(payload["inner_mutation_prob"]),
            selection_rate=int(payload["selection_rate"]),
            objective_spec=ObjectiveSpec.from_names(payload["objectives"]),
            seed=int(payload["seed"]),
            images_per_individual=int(payload["images_per_individual"]),
            base_prompt=str(payload["base_prompt"]),
        )
