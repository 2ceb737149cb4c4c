"""Exact hypervolume and reference-point construction.

Hypervolume is the Lebesgue measure of the region dominated by a front and
bounded by a reference point, computed exactly by recursive slicing along the
first objective: each slab's width multiplies the (d-1)-dimensional volume of
the points that reach it. Everything runs in minimization orientation;
maximize objectives are negated on the way in.

The reference point follows the worst-plus-epsilon rule over a union of
fronts (epsilon 0.5 by default). A normalize-first mode scales the union to
the unit box per objective, which pins the reference at 1.5 everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..objectives import FitnessVector, ObjectiveSpec
from ..search.dominance import orient, orient_matrix

__all__ = [
    "ReferencePoint",
    "reference_point",
    "normalize_fronts",
    "hypervolume",
    "hypervolume_oriented",
]

Point = tuple[float, ...]


@dataclass(frozen=True)
class ReferencePoint:
    """Reference coordinates in minimization orientation."""

    values: tuple[float, ...]
    epsilon: float = 0.5
    normalized: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("reference point must have at least one coordinate")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")


def reference_point(
    fronts: Sequence[Sequence["FitnessVector | Sequence[float]"]],
    spec: ObjectiveSpec,
    epsilon: float = 0.5,
) -> ReferencePoint:
    """Worst oriented value per objective across all fronts, plus epsilon."""
    union = [point for front in fronts for point in front]
    if not union:
        raise ValueError("cannot build a reference point from empty fronts")
    oriented = orient_matrix(union, spec)
    worst = oriented.max(axis=0)
    return ReferencePoint(values=tuple(float(w) + epsilon for w in worst), epsilon=epsilon)


def normalize_fronts(
    fronts: Sequence[Sequence["FitnessVector | Sequence[float]"]],
    spec: ObjectiveSpec,
    epsilon: float = 0.5,
) -> tuple[list[list[Point]], ReferencePoint]:
    """Scale the union to [0, 1] per objective (oriented); reference sits at 1 + epsilon.

    Objectives with zero range across the union collapse to 0. Returns the
    scaled fronts (already oriented) and the shared reference point.
    """
    union = [point for front in fronts for point in front]
    if not union:
        raise ValueError("cannot normalize empty fronts")
    oriented_union = orient_matrix(union, spec)
    lows = oriented_union.min(axis=0)
    highs = oriented_union.max(axis=0)
    spans = highs - lows
    scaled_fronts: list[list[Point]] = []
    for front in fronts:
        oriented = orient_matrix(front, spec)
        scaled = []
        for row in oriented:
            scaled.append(
                tuple(
                    0.0 if spans[m] == 0 else float((row[m] - lows[m]) / spans[m])
                    for m in range(len(spans))
                )
            )
        scaled_fronts.append(scaled)
    ref = ReferencePoint(
        values=tuple(1.0 + epsilon for _ in spans), epsilon=epsilon, normalized=True
    )
    return scaled_fronts, ref


def _prune_min(points: list[Point]) -> list[Point]:
    """Drop duplicates and dominated points (minimization orientation)."""
    unique = sorted(set(points))
    kept: list[Point] = []
    for p in unique:
        dominated = False
        for q in unique:
            if q is p or q == p:
                continue
            if all(a <= b for a, b in zip(q, p)) and any(a < b for a, b in zip(q, p)):
                dominated = True
                break
        if not dominated:
            kept.append(p)
    return kept


def _hv_recursive(points: list[Point], ref: tuple[float, ...]) -> float:
    if not points:
        return 0.0
    if len(ref) == 1:
        return ref[0] - min(p[0] for p in points)
    pts = sorted(set(points))
    volume = 0.0
    for i, p in enumerate(pts):
        upper = pts[i + 1][0] if i + 1 < len(pts) else ref[0]
        width = upper - p[0]
        if width <= 0:
            continue
        slab = [q[1:] for q in pts[: i + 1]]
        volume += width * _hv_recursive(_prune_min(slab), ref[1:])
    return volume


def hypervolume_oriented(points: Sequence[Sequence[float]], ref: ReferencePoint) -> float:
    """Exact hypervolume of already-oriented points against ``ref``."""
    tuples = [tuple(float(v) for v in p) for p in points]
    for p in tuples:
        if len(p) != len(ref.values):
            raise ValueError("point arity does not match the reference point")
        if any(v > r for v, r in zip(p, ref.values)):
            raise ValueError(f"front point {p} lies beyond the reference point {ref.values}")
    return _hv_recursive(_prune_min(tuples), ref.values)


def hypervolume(
    front: Sequence["FitnessVector | Sequence[float]"],
    ref: ReferencePoint,
    spec: ObjectiveSpec,
) -> float:
    """Exact hypervolume of a front in raw objective space."""
    if not front:
        return 0.0
    oriented = [orient(p, spec) for p in front]
    return hypervolume_oriented(oriented, ref)
