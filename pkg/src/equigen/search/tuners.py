"""Estimator-style wrappers around the search strategies.

The tuners follow scikit-learn conventions: constructor parameters are stored
verbatim, validation happens in ``fit``, fitted state lives in
trailing-underscore attributes, and ``get_params``/``set_params``/``clone``
work out of the box. ``fit`` consumes an evaluator (the black box being
optimized against) instead of a data matrix.
"""

from __future__ import annotations

from typing import Optional, Sequence

from sklearn.base import BaseEstimator

from ..evaluation.base import Evaluator
from ..genotype import KeywordPools, SearchBounds
from ..objectives import ObjectiveSpec
from .config import DEFAULT_BASE_PROMPT, SearchConfig
from .engine import run_nsga2, run_random_search, run_single_objective_ga
from .runlog import RunLog

__all__ = ["Nsga2Tuner", "RandomSearchTuner", "TournamentGaTuner"]


def _resolve_spec(objectives: "ObjectiveSpec | Sequence[str] | None", default: ObjectiveSpec) -> ObjectiveSpec:
    if objectives is None:
        return default
    if isinstance(objectives, ObjectiveSpec):
        return objectives
    return ObjectiveSpec.from_names(objectives)


class _TunerMixin:
    """Shared fitted-state plumbing."""

    run_log_: RunLog

    def _finish(self, run_log: RunLog) -> "_TunerMixin":
        self.run_log_ = run_log
        self.front_ = list(run_log.final_front)
        self.n_evaluations_ = sum(s.new_evaluations for s in run_log.snapshots)
        return self


class Nsga2Tuner(_TunerMixin, BaseEstimator):
    """Multi-objective configuration search (the flagship strategy)."""

    def __init__(
        self,
        population_size: int = 30,
        generations: int = 25,
        crossover_prob: float = 0.8,
        mutation_prob: float = 0.2,
        inner_mutation_prob: float = 0.2,
        selection_rate: int = 5,
        objectives: "ObjectiveSpec | Sequence[str] | None" = None,
        seed: int = 0,
        images_per_individual: int = 20,
        base_prompt: str = DEFAULT_BASE_PROMPT,
        bounds: Optional[SearchBounds] = None,
        pools: Optional[KeywordPools] = None,
    ) -> None:
        self.population_size = population_size
        self.generations = generations
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.inner_mutation_prob = inner_mutation_prob
        self.selection_rate = selection_rate
        self.objectives = objectives
        self.seed = seed
        self.images_per_individual = images_per_individual
        self.base_prompt = base_prompt
        self.bounds = bounds
        self.pools = pools

    def _config(self) -> SearchConfig:
        return SearchConfig(
            population_size=self.population_size,
            generations=self.generations,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            inner_mutation_prob=self.inner_mutation_prob,
            selection_rate=self.selection_rate,
            objective_spec=_resolve_spec(self.objectives, ObjectiveSpec.default_search()),
            seed=self.seed,
            images_per_individual=self.images_per_individual,
            base_prompt=self.base_prompt,
        )

    def fit(self, evaluator: Evaluator) -> "Nsga2Tuner":
        self._finish(run_nsga2(self._config(), evaluator, bounds=self.bounds, pools=self.pools))
        return self


class RandomSearchTuner(_TunerMixin, BaseEstimator):
    """Uniform random draws at a fixed evaluation budget."""

    def __init__(
        self,
        evals_per_iter: int = 4,
        iterations: int = 25,
        objectives: "ObjectiveSpec | Sequence[str] | None" = None,
        seed: int = 0,
        images_per_individual: int = 20,
        base_prompt: str = DEFAULT_BASE_PROMPT,
        bounds: Optional[SearchBounds] = None,
        pools: Optional[KeywordPools] = None,
    ) -> None:
        self.evals_per_iter = evals_per_iter
        self.iterations = iterations
        self.objectives = objectives
        self.seed = seed
        self.images_per_individual = images_per_individual
        self.base_prompt = base_prompt
        self.bounds = bounds
        self.pools = pools

    def fit(self, evaluator: Evaluator) -> "RandomSearchTuner":
        config = SearchConfig(
            objective_spec=_resolve_spec(self.objectives, ObjectiveSpec.default_search()),
            seed=self.seed,
            images_per_individual=self.images_per_individual,
            base_prompt=self.base_prompt,
        )
        self._finish(
            run_random_search(
                config,
                evaluator,
                evals_per_iter=self.evals_per_iter,
                iterations=self.iterations,
                bounds=self.bounds,
                pools=self.pools,
            )
        )
        return self


class TournamentGaTuner(_TunerMixin, BaseEstimator):
    """Single-objective GA with size-k tournament selection."""

    def __init__(
        self,
        objective: str = "cpu_energy",
        tournament_k: int = 5,
        population_size: int = 30,
        generations: int = 25,
        crossover_prob: float = 0.8,
        mutation_prob: float = 0.2,
        inner_mutation_prob: float = 0.2,
        seed: int = 0,
        images_per_individual: int = 20,
        base_prompt: str = DEFAULT_BASE_PROMPT,
        bounds: Optional[SearchBounds] = None,
        pools: Optional[KeywordPools] = None,
    ) -> None:
        self.objective = objective
        self.tournament_k = tournament_k
        self.population_size = population_size
        self.generations = generations
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.inner_mutation_prob = inner_mutation_prob
        self.seed = seed
        self.images_per_individual = images_per_individual
        self.base_prompt = base_prompt
        self.bounds = bounds
        self.pools = pools

    def fit(self, evaluator: Evaluator) -> "TournamentGaTuner":
        config = SearchConfig(
            population_size=self.population_size,
            generations=self.generations,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            inner_mutation_prob=self.inner_mutation_prob,
            selection_rate=self.tournament_k,
            objective_spec=ObjectiveSpec.from_names([self.objective]),
            seed=self.seed,
            images_per_individual=self.images_per_individual,
            base_prompt=self.base_prompt,
        )
        self._finish(
            run_single_objective_ga(
                config,
                evaluator,
                tournament_k=self.tournament_k,
                bounds=self.bounds,
                pools=self.pools,
            )
        )
        return self
