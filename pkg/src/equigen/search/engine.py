"""Search strategy implementations: NSGA-II, random search, single-objective GA.

Every strategy is a deterministic function of (config, landscape): one seeded
``random.Random`` drives sampling and selection in a fixed draw order, and
per-individual evaluation seeds derive from a stable hash of the run seed,
the generation of first evaluation, and the genotype key. A genotype-keyed
cache guarantees that re-encountered individuals never cost a second
evaluator call.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..evaluation.base import Evaluator
from ..evaluation.cache import EvaluationCache
from ..genotype import (
    Individual,
    KeywordPools,
    SearchBounds,
    canonical_key,
    check_individual,
    default_pools,
    new_random,
)
from ..objectives import Direction, FitnessVector, fitness_vector
from ..seeding import stable_hash
from .config import SearchConfig
from .dominance import crowding_distance, fast_non_dominated_sort, orient
from .operators import GENOTYPE_KEYS, crossover_single_point, mutate
from .runlog import GenerationSnapshot, RunLog

__all__ = ["SearchConfig", "run_nsga2", "run_random_search", "run_single_objective_ga"]

# Give up on novelty after this many consecutive duplicate draws; tiny search
# spaces would otherwise spin forever.
_MAX_REDRAWS = 100


@dataclass
class _EvalContext:
    """Evaluation plumbing shared by all strategies within one run."""

    config: SearchConfig
    evaluator: Evaluator
    bounds: SearchBounds
    pools: KeywordPools
    cache: EvaluationCache = field(default_factory=EvaluationCache)
    seed_by_key: dict[str, int] = field(default_factory=dict)
    new_evaluations: int = 0

    def evaluate(self, ind: Individual, generation: int) -> FitnessVector:
        """Evaluate one individual, counting only genuine evaluator calls.

        The request seed is fixed at an individual's first evaluation (run
        seed, that generation, genotype key) and memoized, so duplicates in
        later generations reuse the same seed and hit the cache.
        """
        check_individual(ind, self.bounds, self.pools)
        key = canonical_key(ind)
        seed = self.seed_by_key.get(key)
        if seed is None:
            seed = stable_hash(self.config.seed, generation, key)
            self.seed_by_key[key] = seed
        batch, was_cached = self.cache.get_or_evaluate(
            self.evaluator,
            ind,
            self.config.base_prompt,
            self.config.images_per_individual,
            seed,
        )
        if not was_cached:
            self.new_evaluations += 1
        return fitness_vector(batch, self.config.objective_spec)

    def take_new_evaluations(self) -> int:
        count = self.new_evaluations
        self.new_evaluations = 0
        return count


def _initial_population(
    rng: random.Random, size: int, bounds: SearchBounds, pools: KeywordPools
) -> list[Individual]:
    """Random init without repeated genotypes (best effort in tiny spaces)."""
    population: list[Individual] = []
    seen: set[str] = set()
    stale = 0
    while len(population) < size:
        ind = new_random(rng, bounds, pools)
        key = canonical_key(ind)
        if key in seen and stale < _MAX_REDRAWS:
            stale += 1
            continue
        stale = 0
        seen.add(key)
        population.append(ind)
    return population


def _ranks_of(population_fitness: Sequence[FitnessVector], spec) -> list[int]:
    fronts = fast_non_dominated_sort(population_fitness, spec)
    ranks = [0] * len(population_fitness)
    for rank, front in enumerate(fronts):
        for i in front:
            ranks[i] = rank
    return ranks


def _snapshot(
    index: int,
    members: Sequence[tuple[Individual, FitnessVector]],
    spec,
    new_evaluations: int,
) -> GenerationSnapshot:
    ranks = _ranks_of([fv for _, fv in members], spec)
    return GenerationSnapshot(
        index=index,
        population=tuple(members),
        front_ranks=tuple(ranks),
        new_evaluations=new_evaluations,
    )


def _final_front(
    members: Sequence[tuple[Individual, FitnessVector]], spec
) -> tuple[tuple[Individual, FitnessVector], ...]:
    fronts = fast_non_dominated_sort([fv for _, fv in members], spec)
    return tuple(members[i] for i in fronts[0]) if fronts else ()


# ---------------------------------------------------------------------------
# NSGA-II
# ---------------------------------------------------------------------------

def _binary_tournament(
    rng: random.Random, ranks: Sequence[int], crowding: Sequence[float]
) -> int:
    """Pick the (rank, crowding)-better of two uniform contestants."""
    i = rng.randrange(len(ranks))
    j = rng.randrange(len(ranks))
    if ranks[i] != ranks[j]:
        return i if ranks[i] < ranks[j] else j
    if crowding[i] != crowding[j]:
        return i if crowding[i] > crowding[j] else j
    return i if rng.random() < 0.5 else j


def _crowding_by_front(
    fitness: Sequence[FitnessVector], fronts: Sequence[Sequence[int]]
) -> list[float]:
    crowding = [0.0] * len(fitness)
    for front in fronts:
        for member, distance in zip(front, crowding_distance([fitness[i] for i in front])):
            crowding[member] = distance
    return crowding


def _make_offspring(
    rng: random.Random,
    parents: Sequence[Individual],
    parent_fitness: Sequence[FitnessVector],
    config: SearchConfig,
    bounds: SearchBounds,
    pools: KeywordPools,
    spec,
) -> list[Individual]:
    """One lambda = population_size batch of children via tournament + variation."""
    fronts = fast_non_dominated_sort(parent_fitness, spec)
    ranks = [0] * len(parents)
    for rank, front in enumerate(fronts):
        for i in front:
            ranks[i] = rank
    crowding = _crowding_by_front(parent_fitness, fronts)

    offspring: list[Individual] = []
    while len(offspring) < config.population_size:
        first = parents[_binary_tournament(rng, ranks, crowding)]
        second = parents[_binary_tournament(rng, ranks, crowding)]
        if rng.random() < config.crossover_prob:
            cut = rng.randrange(len(GENOTYPE_KEYS))
            child_one, child_two = crossover_single_point(first, second, cut)
        else:
            child_one, child_two = first, second
        if rng.random() < config.mutation_prob:
            child_one = mutate(child_one, rng, config.inner_mutation_prob, bounds, pools)
        if rng.random() < config.mutation_prob:
            child_two = mutate(child_two, rng, config.inner_mutation_prob, bounds, pools)
        offspring.append(child_one)
        if len(offspring) < config.population_size:
            offspring.append(child_two)
    return offspring


def _truncate(
    pool: Sequence[tuple[Individual, FitnessVector]], size: int, spec
) -> list[tuple[Individual, FitnessVector]]:
    """Elitist mu+lambda truncation: whole fronts first, crowding on the split front."""
    fronts = fast_non_dominated_sort([fv for _, fv in pool], spec)
    survivors: list[tuple[Individual, FitnessVector]] = []
    for front in fronts:
        if len(survivors) + len(front) <= size:
            survivors.extend(pool[i] for i in front)
            continue
        crowding = crowding_distance([pool[i][1] for i in front])
        # Most isolated first; ties broken by pool index for determinism.
        order = sorted(range(len(front)), key=lambda k: (-crowding[k], front[k]))
        remaining = size - len(survivors)
        survivors.extend(pool[front[k]] for k in order[:remaining])
        break
    return survivors


def run_nsga2(
    config: SearchConfig,
    evaluator: Evaluator,
    bounds: SearchBounds | None = None,
    pools: KeywordPools | None = None,
    strategy: str = "nsga2",
    label: Optional[str] = None,
) -> RunLog:
    """Elitist multi-objective search over the configuration space."""
    bounds = bounds or SearchBounds()
    pools = pools or default_pools()
    spec = config.objective_spec
    rng = random.Random(config.seed)
    ctx = _EvalContext(config=config, evaluator=evaluator, bounds=bounds, pools=pools)

    individuals = _initial_population(rng, config.population_size, bounds, pools)
    members = [(ind, ctx.evaluate(ind, 0)) for ind in individuals]
    snapshots = [_snapshot(0, members, spec, ctx.take_new_evaluations())]

    for generation in range(1, config.generations + 1):
        parents = [ind for ind, _ in members]
        parent_fitness = [fv for _, fv in members]
        offspring = _make_offspring(rng, parents, parent_fitness, config, bounds, pools, spec)
        evaluated_offspring = [(ind, ctx.evaluate(ind, generation)) for ind in offspring]
        members = _truncate(members + evaluated_offspring, config.population_size, spec)
        snapshots.append(_snapshot(generation, members, spec, ctx.take_new_evaluations()))

    return RunLog(
        strategy=strategy,
        label=label or strategy,
        seed=config.seed,
        config=config,
        snapshots=tuple(snapshots),
        final_front=_final_front(members, spec),
    )


# ---------------------------------------------------------------------------
# Random search
# ---------------------------------------------------------------------------

def run_random_search(
    config: SearchConfig,
    evaluator: Evaluator,
    evals_per_iter: int = 4,
    iterations: int = 25,
    bounds: SearchBounds | None = None,
    pools: KeywordPools | None = None,
    label: Optional[str] = None,
) -> RunLog:
    """Budget-matched baseline: fresh uniform draws, no selection pressure.

    Each iteration draws ``evals_per_iter`` individuals, re-drawing up to 100
    times when a genotype was already evaluated; the final front is the
    non-dominated subset of everything evaluated.
    """
    if evals_per_iter < 1 or iterations < 1:
        raise ValueError("evals_per_iter and iterations must be positive")
    bounds = bounds or SearchBounds()
    pools = pools or default_pools()
    spec = config.objective_spec
    rng = random.Random(config.seed)
    ctx = _EvalContext(config=config, evaluator=evaluator, bounds=bounds, pools=pools)

    archive: list[tuple[Individual, FitnessVector]] = []
    seen: set[str] = set()
    snapshots = []
    for iteration in range(iterations):
        batch: list[tuple[Individual, FitnessVector]] = []
        for _ in range(evals_per_iter):
            ind = new_random(rng, bounds, pools)
            for _ in range(_MAX_REDRAWS):
                if canonical_key(ind) not in seen:
                    break
                ind = new_random(rng, bounds, pools)
            seen.add(canonical_key(ind))
            batch.append((ind, ctx.evaluate(ind, iteration)))
        archive.extend(batch)
        snapshots.append(_snapshot(iteration, batch, spec, ctx.take_new_evaluations()))

    return RunLog(
        strategy="random_search",
        label=label or "random_search",
        seed=config.seed,
        config=config,
        snapshots=tuple(snapshots),
        final_front=_final_front(archive, spec),
    )


# ---------------------------------------------------------------------------
# Single-objective GA
# ---------------------------------------------------------------------------

def _scalar(fv: FitnessVector, spec) -> float:
    # Oriented so that smaller is always better.
    return orient(fv, spec)[0]


def _k_tournament(
    rng: random.Random, scores: Sequence[float], k: int
) -> int:
    best = rng.randrange(len(scores))
    for _ in range(k - 1):
        contender = rng.randrange(len(scores))
        if scores[contender] < scores[best]:
            best = contender
    return best


def run_single_objective_ga(
    config: SearchConfig,
    evaluator: Evaluator,
    tournament_k: Optional[int] = None,
    bounds: SearchBounds | None = None,
    pools: KeywordPools | None = None,
    strategy: str = "ga_single",
    label: Optional[str] = None,
) -> RunLog:
    """Scalar GA with size-k tournaments and one elitist survivor slot.

    Uses the same variation pipeline as the multi-objective search. The
    objective spec must contain exactly one objective; maximize objectives
    are handled by orientation.
    """
    spec = config.objective_spec
    if len(spec) != 1:
        raise ValueError("single-objective GA requires an objective spec of arity 1")
    k = tournament_k if tournament_k is not None else config.selection_rate
    if k < 2:
        raise ValueError("tournament size must be at least 2")
    bounds = bounds or SearchBounds()
    pools = pools or default_pools()
    rng = random.Random(config.seed)
    ctx = _EvalContext(config=config, evaluator=evaluator, bounds=bounds, pools=pools)

    individuals = _initial_population(rng, config.population_size, bounds, pools)
    members = [(ind, ctx.evaluate(ind, 0)) for ind in individuals]
    snapshots = [_snapshot(0, members, spec, ctx.take_new_evaluations())]

    for generation in range(1, config.generations + 1):
        scores = [_scalar(fv, spec) for _, fv in members]
        offspring: list[Individual] = []
        while len(offspring) < config.population_size:
            first = members[_k_tournament(rng, scores, k)][0]
            second = members[_k_tournament(rng, scores, k)][0]
            if rng.random() < config.crossover_prob:
                cut = rng.randrange(len(GENOTYPE_KEYS))
                child_one, child_two = crossover_single_point(first, second, cut)
            else:
                child_one, child_two = first, second
            if rng.random() < config.mutation_prob:
                child_one = mutate(child_one, rng, config.inner_mutation_prob, bounds, pools)
            if rng.random() < config.mutation_prob:
                child_two = mutate(child_two, rng, config.inner_mutation_prob, bounds, pools)
            offspring.append(child_one)
            if len(offspring) < config.population_size:
                offspring.append(child_two)

        pool = members + [(ind, ctx.evaluate(ind, generation)) for ind in offspring]
        pool_scores = [_scalar(fv, spec) for _, fv in pool]
        best_index = min(range(len(pool)), key=lambda i: (pool_scores[i], i))
        survivors = [pool[best_index]]  # elitist slot keeps the incumbent
        while len(survivors) < config.population_size:
            survivors.append(pool[_k_tournament(rng, pool_scores, k)])
        members = survivors
        snapshots.append(_snapshot(generation, members, spec, ctx.take_new_evaluations()))

    return RunLog(
        strategy=strategy,
        label=label or strategy,
        seed=config.seed,
        config=config,
        snapshots=tuple(snapshots),
        final_front=_final_front(members, spec),
    )
