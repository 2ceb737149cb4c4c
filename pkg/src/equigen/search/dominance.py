"""Pareto dominance, non-dominated sorting, and crowding distance.

All public entry points take an ObjectiveSpec and orient values internally so
that every comparison is a minimization: maximize objectives are negated
before any dominance arithmetic. Kernels are pure; the sort builds its
dominance matrix with numpy, which changes speed but never results.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..objectives import Direction, FitnessVector, ObjectiveSpec
from ..validation import as_objective_matrix

__all__ = ["orient", "orient_matrix", "dominates", "fast_non_dominated_sort", "crowding_distance"]

Point = "FitnessVector | Sequence[float]"


def orient(values: "FitnessVector | Sequence[float]", spec: ObjectiveSpec) -> tuple[float, ...]:
    """Map a fitness point to minimization orientation (maximize values negated)."""
    raw = values.values if isinstance(values, FitnessVector) else tuple(values)
    if len(raw) != len(spec):
        raise ValueError(f"point has {len(raw)} values, objective spec expects {len(spec)}")
    return tuple(
        -float(v) if d is Direction.MAXIMIZE else float(v)
        for v, d in zip(raw, spec.directions)
    )


def orient_matrix(points: Sequence["FitnessVector | Sequence[float]"], spec: ObjectiveSpec) -> np.ndarray:
    """Stack points into an oriented (n, d) array."""
    matrix = as_objective_matrix(points, spec)
    signs = np.array(
        [-1.0 if d is Direction.MAXIMIZE else 1.0 for d in spec.directions], dtype=float
    )
    return matrix * signs


def dominates(
    a: "FitnessVector | Sequence[float]", b: "FitnessVector | Sequence[float]", spec: ObjectiveSpec
) -> bool:
    """True when ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    oa, ob = orient(a, spec), orient(b, spec)
    return all(x <= y for x, y in zip(oa, ob)) and any(x < y for x, y in zip(oa, ob))


def _dominance_matrix(oriented: np.ndarray) -> np.ndarray:
    """Boolean matrix D with D[i, j] true when point i dominates point j."""
    le = np.all(oriented[:, None, :] <= oriented[None, :, :], axis=2)
    lt = np.any(oriented[:, None, :] < oriented[None, :, :], axis=2)
    return le & lt


def fast_non_dominated_sort(
    points: Sequence["FitnessVector | Sequence[float]"], spec: ObjectiveSpec
) -> list[list[int]]:
    """Partition point indices into fronts, best (rank 0) first.

    Every index appears in exactly one front; indices inside a front are
    ascending. An empty input yields an empty partition.
    """
    oriented = orient_matrix(points, spec)
    n = oriented.shape[0]
    if n == 0:
        return []
    dom = _dominance_matrix(oriented)
    counts = dom.sum(axis=0).astype(int)  # how many points dominate each point
    assigned = np.zeros(n, dtype=bool)
    fronts: list[list[int]] = []
    while not assigned.all():
        current = np.flatnonzero((counts == 0) & ~assigned)
        if current.size == 0:  # defensive: dominance is acyclic, so this cannot happen
            raise RuntimeError("non-dominated sort failed to make progress")
        assigned[current] = True
        counts = counts - dom[current, :].sum(axis=0)
        fronts.append([int(i) for i in current])
    return fronts


def crowding_distance(front: Sequence["FitnessVector | Sequence[float]"]) -> list[float]:
    """Crowding distances for the members of one front.

    Boundary points per objective get infinity; interior points accumulate the
    normalized gap between their neighbors. Objectives with zero range
    contribute nothing. Fronts of one or two points are all infinite.
    """
    values = [
        tuple(p.values) if isinstance(p, FitnessVector) else tuple(float(v) for v in p)
        for p in front
    ]
    n = len(values)
    if n == 0:
        return []
    arity = len(values[0])
    if any(len(v) != arity for v in values):
        raise ValueError("front contains points of mixed arity")
    if n <= 2:
        return [float("inf")] * n
    distances = [0.0] * n
    for m in range(arity):
        order = sorted(range(n), key=lambda i: (values[i][m], i))
        lo, hi = values[order[0]][m], values[order[-1]][m]
        span = hi - lo
        distances[order[0]] = float("inf")
        distances[order[-1]] = float("inf")
        if span == 0:
            continue
        for pos in range(1, n - 1):
            i = order[pos]
            if distances[i] == float("inf"):
                continue
            gap = values[order[pos + 1]][m] - values[order[pos - 1]][m]
            distances[i] += gap / span
    return distances
