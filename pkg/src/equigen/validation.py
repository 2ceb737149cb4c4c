"""Input validation helpers shared by the tuner estimators and the kernels."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .objectives import FitnessVector, ObjectiveSpec

__all__ = [
    "check_probability",
    "check_positive_int",
    "check_seed",
    "as_objective_matrix",
]


def check_probability(name: str, value: float) -> float:
    if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be a probability in [0, 1], got {value!r}")
    return float(value)


def check_positive_int(name: str, value: int, minimum: int = 1) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return value


def check_seed(name: str, value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
    return value


def _point_values(point: "FitnessVector | Sequence[float]") -> Sequence[float]:
    return point.values if isinstance(point, FitnessVector) else point


def as_objective_matrix(
    points: Sequence["FitnessVector | Sequence[float]"], spec: ObjectiveSpec
) -> np.ndarray:
    """Stack points into an (n, d) float array, checking arity against the spec.

    Accepts plain value sequences or FitnessVector instances.
    """
    rows = []
    for i, point in enumerate(points):
        values = tuple(_point_values(point))
        if len(values) != len(spec):
            raise ValueError(
                f"point {i} has {len(values)} values, objective spec expects {len(spec)}"
            )
        rows.append(values)
    if not rows:
        return np.empty((0, len(spec)), dtype=float)
    return np.asarray(rows, dtype=float)
