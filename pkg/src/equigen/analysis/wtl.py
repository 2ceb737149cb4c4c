"""Per-prompt win/tie/loss bucketing of a candidate against a baseline.

For each paired observation the candidate Wins when it is strictly better in
every objective, Ties when it is strictly better in at least half of them
(ceiling) without winning, and Loses otherwise. Identical vectors therefore
count as losses under the default rule. The alternative ``"lenient"`` rule
counts non-worse objectives toward the tie threshold instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..objectives import FitnessVector, ObjectiveSpec
from ..search.dominance import orient

__all__ = ["WinTieLoss", "win_tie_loss", "TIE_RULES"]

TIE_RULES = ("strict", "lenient")


@dataclass(frozen=True)
class WinTieLoss:
    wins: int
    ties: int
    losses: int

    def __post_init__(self) -> None:
        if min(self.wins, self.ties, self.losses) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.wins + self.ties + self.losses


def win_tie_loss(
    candidate: Sequence["FitnessVector | Sequence[float]"],
    baseline: Sequence["FitnessVector | Sequence[float]"],
    spec: ObjectiveSpec,
    tie_rule: str = "strict",
) -> WinTieLoss:
    """Bucket every paired observation; buckets are exhaustive and exclusive."""
    if len(candidate) != len(baseline):
        raise ValueError("candidate and baseline must be paired (equal length)")
    if tie_rule not in TIE_RULES:
        raise ValueError(f"tie_rule must be one of {TIE_RULES}")
    threshold = math.ceil(len(spec) / 2)
    wins = ties = losses = 0
    for cand, base in zip(candidate, baseline):
        oc, ob = orient(cand, spec), orient(base, spec)
        strictly_better = sum(1 for c, b in zip(oc, ob) if c < b)
        non_worse = sum(1 for c, b in zip(oc, ob) if c <= b)
        if strictly_better == len(spec):
            wins += 1
            continue
        tie_score = strictly_better if tie_rule == "strict" else non_worse
        if tie_score >= threshold:
            ties += 1
        else:
            losses += 1
    return WinTieLoss(wins=wins, ties=ties, losses=losses)
