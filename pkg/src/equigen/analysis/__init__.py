"""Statistical comparison toolkit: fronts, hypervolume, rank tests, win-tie-loss."""

from .pareto import count_optimal_by_strategy, pareto_front
from .hypervolume import (
    ReferencePoint,
    hypervolume,
    hypervolume_oriented,
    normalize_fronts,
    reference_point,
)
from .stats import (
    EffectSize,
    TestResult,
    dunn_posthoc,
    kruskal_wallis,
    spearman,
    vargha_delaney_a12,
    wilcoxon_signed_rank,
)
from .wtl import WinTieLoss, win_tie_loss

__all__ = [
    "count_optimal_by_strategy",
    "pareto_front",
    "ReferencePoint",
    "hypervolume",
    "hypervolume_oriented",
    "normalize_fronts",
    "reference_point",
    "EffectSize",
    "TestResult",
    "dunn_posthoc",
    "kruskal_wallis",
    "spearman",
    "vargha_delaney_a12",
    "wilcoxon_signed_rank",
    "WinTieLoss",
    "win_tie_loss",
]
