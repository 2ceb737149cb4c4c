"""Global Pareto front extraction and per-strategy optimal counts.

The front uses an archive sweep over lexicographically sorted points: any
dominator of a point sorts before it, so each candidate only checks the
current archive. Duplicate vectors never dominate each other, so both copies
survive and both are counted.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..objectives import FitnessVector, ObjectiveSpec
from ..search.dominance import orient_matrix

__all__ = ["pareto_front", "count_optimal_by_strategy"]


def pareto_front(
    points: Sequence["FitnessVector | Sequence[float]"], spec: ObjectiveSpec
) -> list[int]:
    """Indices of the non-dominated points, ascending."""
    oriented = orient_matrix(points, spec)
    n = oriented.shape[0]
    if n == 0:
        return []
    order = np.lexsort(oriented.T[::-1])  # lexicographic by first objective, then second, ...
    archive: list[int] = []
    for idx in order:
        row = oriented[idx]
        dominated = False
        for keeper in archive:
            other = oriented[keeper]
            if np.all(other <= row) and np.any(other < row):
                dominated = True
                break
        if not dominated:
            archive.append(int(idx))
    return sorted(archive)


def count_optimal_by_strategy(
    entries: Sequence[tuple[str, "FitnessVector | Sequence[float]"]], spec: ObjectiveSpec
) -> dict[str, int]:
    """Pool labeled points, take the global front, and count members per label.

    Every label present in the input appears in the result, including labels
    that contributed nothing to the front. Counts sum to the front size.
    """
    labels = [label for label, _ in entries]
    points = [point for _, point in entries]
    counts: dict[str, int] = {}
    for label in labels:
        counts.setdefault(label, 0)
    for idx in pareto_front(points, spec):
        counts[labels[idx]] += 1
    return counts
