"""equigen: multi-objective tuning of text-to-image model configurations.

Searches over generation hyperparameters and weighted prompt keywords to
jointly improve image quality, demographic balance, and energy cost, and
ships the statistics needed to compare strategies rigorously.
"""

from .genotype import (
    Individual,
    KeywordPools,
    PromptPair,
    SearchBounds,
    canonical_key,
    default_pools,
    new_random,
    render_prompts,
)
from .objectives import (
    Direction,
    EvaluationBatch,
    FitnessVector,
    ImageRecord,
    MeasuredObjectives,
    Objective,
    ObjectiveSpec,
    SEARCH_OBJECTIVE_NAMES,
    TRACKED_OBJECTIVE_NAMES,
)
from .search import (
    RunLog,
    SearchConfig,
    Nsga2Tuner,
    RandomSearchTuner,
    TournamentGaTuner,
    run_nsga2,
    run_random_search,
    run_single_objective_ga,
)
from .evaluation import (
    BridgeEvaluator,
    EvaluationCache,
    Evaluator,
    SyntheticEvaluator,
    SyntheticLandscape,
)
from .seeding import counter_rng, stable_hash

__version__ = "0.1.0"

__all__ = [
    "Individual",
    "KeywordPools",
    "PromptPair",
    "SearchBounds",
    "canonical_key",
    "default_pools",
    "new_random",
    "render_prompts",
    "Direction",
    "EvaluationBatch",
    "FitnessVector",
    "ImageRecord",
    "MeasuredObjectives",
    "Objective",
    "ObjectiveSpec",
    "SEARCH_OBJECTIVE_NAMES",
    "TRACKED_OBJECTIVE_NAMES",
    "RunLog",
    "SearchConfig",
    "Nsga2Tuner",
    "RandomSearchTuner",
    "TournamentGaTuner",
    "run_nsga2",
    "run_random_search",
    "run_single_objective_ga",
    "BridgeEvaluator",
    "EvaluationCache",
    "Evaluator",
    "SyntheticEvaluator",
    "SyntheticLandscape",
    "counter_rng",
    "stable_hash",
    "__version__",
]
