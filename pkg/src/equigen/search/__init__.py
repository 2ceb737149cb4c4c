"""Search strategies over the configuration space and their shared kernels."""

from .dominance import crowding_distance, dominates, fast_non_dominated_sort, orient, orient_matrix
from .operators import GENOTYPE_KEYS, crossover_single_point, mutate
from .runlog import STRATEGIES, GenerationSnapshot, RunLog, load_runlog, save_runlog
from .engine import SearchConfig, run_nsga2, run_random_search, run_single_objective_ga
from .tuners import Nsga2Tuner, RandomSearchTuner, TournamentGaTuner

__all__ = [
    "crowding_distance",
    "dominates",
    "fast_non_dominated_sort",
    "orient",
    "orient_matrix",
    "GENOTYPE_KEYS",
    "crossover_single_point",
    "mutate",
    "STRATEGIES",
    "GenerationSnapshot",
    "RunLog",
    "load_runlog",
    "save_runlog",
    "SearchConfig",
    "run_nsga2",
    "run_random_search",
    "run_single_objective_ga",
    "Nsga2Tuner",
    "RandomSearchTuner",
    "TournamentGaTuner",
]
