"""Rank-based statistics: Wilcoxon signed-rank, A12 effect size, Kruskal-Wallis,
Dunn post-hoc comparisons, and Spearman correlation.

These are implemented here rather than wrapped because the behaviors the rest
of the pipeline depends on are pinned: the Wilcoxon p-value is exact (full
sign-assignment distribution, midranks for ties) up to n = 20, degenerate
inputs return defined results instead of raising, and Dunn corrections use
plain Bonferroni over all pairs. scipy supplies only the chi-square and
normal distribution functions.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from scipy.stats import chi2 as _chi2
from scipy.stats import norm as _norm

__all__ = [
    "EffectSize",
    "TestResult",
    "wilcoxon_signed_rank",
    "vargha_delaney_a12",
    "kruskal_wallis",
    "dunn_posthoc",
    "spearman",
]

_EXACT_LIMIT = 20
ALTERNATIVES = ("two_sided", "greater", "less")


@dataclass(frozen=True)
class EffectSize:
    """A12 effect size with its magnitude class (large / medium / small)."""

    value: float
    magnitude: str


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    significant: bool
    effect_size: Optional[EffectSize] = None
    p_uncorrected: Optional[float] = None
    note: str = ""

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value outside [0, 1]: {self.p_value!r}")


def _midranks(values: Sequence[float]) -> list[float]:
    """Average ranks (1-based); tied values share the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    pos = 0
    while pos < len(order):
        end = pos
        while end + 1 < len(order) and values[order[end + 1]] == values[order[pos]]:
            end += 1
        shared = (pos + end) / 2.0 + 1.0
        for k in range(pos, end + 1):
            ranks[order[k]] = shared
        pos = end + 1
    return ranks


def _tie_term(values: Sequence[float]) -> float:
    """Sum of t^3 - t over tie groups."""
    return float(sum(t**3 - t for t in Counter(values).values()))


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank
# ---------------------------------------------------------------------------

def _exact_tail_probabilities(doubled_ranks: Sequence[int], doubled_w: int) -> tuple[float, float]:
    """P(T <= w) and P(T >= w) over all 2^n equiprobable sign assignments.

    Ranks are doubled so midranks (always multiples of 0.5) become integers;
    the distribution of the positive-rank sum is built by convolution.
    """
    total = sum(doubled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    for rank in doubled_ranks:
        for s in range(total, rank - 1, -1):
            if counts[s - rank]:
                counts[s] += counts[s - rank]
    n_assignments = float(2 ** len(doubled_ranks))
    p_le = sum(counts[: doubled_w + 1]) / n_assignments
    p_ge = sum(counts[doubled_w:]) / n_assignments
    return p_le, p_ge


def wilcoxon_signed_rank(
    a: Sequence[float],
    b: Sequence[float],
    alternative: str = "two_sided",
    alpha: float = 0.05,
) -> TestResult:
    """Paired signed-rank test of ``a`` against ``b``.

    Zero differences are dropped; ties among the absolute differences take
    midranks. The statistic is the positive-rank sum W+. With at most 20
    informative pairs the p-value is exact over all sign assignments; beyond
    that a tie-corrected normal approximation is used. The two-sided p-value
    doubles the smaller tail (clamped to 1). ``alternative="greater"`` asks
    whether ``a`` tends to exceed ``b``.

    All-zero differences are reported as p = 1 with a note. Fewer than five
    informative pairs is an error.
    """
    if len(a) != len(b):
        raise ValueError("samples must be paired (equal length)")
    if alternative not in ALTERNATIVES:
        raise ValueError(f"alternative must be one of {ALTERNATIVES}")
    diffs = [float(x) - float(y) for x, y in zip(a, b) if float(x) != float(y)]
    if not diffs:
        return TestResult(statistic=0.0, p_value=1.0, significant=False, note="all differences zero")
    n = len(diffs)
    if n < 5:
        raise ValueError(f"need at least 5 non-zero differences, got {n}")
    abs_diffs = [abs(d) for d in diffs]
    ranks = _midranks(abs_diffs)
    w_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)

    if n <= _EXACT_LIMIT:
        doubled = [int(round(2 * r)) for r in ranks]
        p_le, p_ge = _exact_tail_probabilities(doubled, int(round(2 * w_plus)))
    else:
        mu = n * (n + 1) / 4.0
        sigma_sq = n * (n + 1) * (2 * n + 1) / 24.0 - _tie_term(abs_diffs) / 48.0
        sigma = math.sqrt(sigma_sq)
        z = (w_plus - mu) / sigma
        p_ge = float(_norm.sf(z))
        p_le = float(_norm.cdf(z))

    if alternative == "greater":
        p = p_ge
    elif alternative == "less":
        p = p_le
    else:
        p = min(1.0, 2.0 * min(p_le, p_ge))
    return TestResult(statistic=float(w_plus), p_value=float(p), significant=p < alpha)


# ---------------------------------------------------------------------------
# Vargha-Delaney A12
# ---------------------------------------------------------------------------

def vargha_delaney_a12(a: Sequence[float], b: Sequence[float]) -> EffectSize:
    """Probability that a value from ``a`` exceeds one from ``b`` (ties count half).

    The magnitude class follows the 0.72 / 0.64 thresholds applied to
    max(A12, 1 - A12), so strong effects in either direction read "large".
    """
    if not a or not b:
        raise ValueError("both samples must be non-empty")
    greater = sum(1 for x in a for y in b if x > y)
    equal = sum(1 for x in a for y in b if x == y)
    value = (greater + 0.5 * equal) / (len(a) * len(b))
    strength = max(value, 1.0 - value)
    if strength >= 0.72:
        magnitude = "large"
    elif strength >= 0.64:
        magnitude = "medium"
    else:
        magnitude = "small"
    return EffectSize(value=value, magnitude=magnitude)


# ---------------------------------------------------------------------------
# Kruskal-Wallis and Dunn
# ---------------------------------------------------------------------------

def kruskal_wallis(groups: Sequence[Sequence[float]], alpha: float = 0.05) -> TestResult:
    """Tie-corrected H test over two or more groups; p from chi-square (k-1 df).

    All-identical inputs return H = 0, p = 1 rather than raising.
    """
    if len(groups) < 2 or any(len(g) == 0 for g in groups):
        raise ValueError("need at least two non-empty groups")
    pooled = [float(v) for g in groups for v in g]
    n_total = len(pooled)
    ranks = _midranks(pooled)
    h_raw = 0.0
    offset = 0
    for g in groups:
        r_sum = sum(ranks[offset : offset + len(g)])
        h_raw += r_sum * r_sum / len(g)
        offset += len(g)
    h_raw = 12.0 / (n_total * (n_total + 1)) * h_raw - 3.0 * (n_total + 1)
    correction = 1.0 - _tie_term(pooled) / float(n_total**3 - n_total)
    if correction <= 0.0:
        return TestResult(statistic=0.0, p_value=1.0, significant=False, note="all values identical")
    h = h_raw / correction
    p = float(_chi2.sf(h, df=len(groups) - 1))
    return TestResult(statistic=float(h), p_value=p, significant=p < alpha)


def dunn_posthoc(groups: Sequence[Sequence[float]], alpha: float = 0.05) -> list[list[TestResult]]:
    """Pairwise mean-rank z tests after Kruskal-Wallis, Bonferroni over all pairs.

    Returns a symmetric k x k matrix; the diagonal is p = 1. Each cell carries
    both the corrected p-value (``p_value``) and the raw one
    (``p_uncorrected``); corrected values are clamped to 1.
    """
    k = len(groups)
    if k < 2 or any(len(g) == 0 for g in groups):
        raise ValueError("need at least two non-empty groups")
    pooled = [float(v) for g in groups for v in g]
    n_total = len(pooled)
    ranks = _midranks(pooled)
    mean_ranks = []
    offset = 0
    for g in groups:
        mean_ranks.append(sum(ranks[offset : offset + len(g)]) / len(g))
        offset += len(g)
    variance_base = n_total * (n_total + 1) / 12.0 - _tie_term(pooled) / (12.0 * (n_total - 1))
    corrections = k * (k - 1) // 2

    identity = TestResult(statistic=0.0, p_value=1.0, significant=False, p_uncorrected=1.0)
    matrix: list[list[TestResult]] = [[identity for _ in range(k)] for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            if variance_base <= 0.0:
                z, p_raw = 0.0, 1.0
            else:
                se = math.sqrt(variance_base * (1.0 / len(groups[i]) + 1.0 / len(groups[j])))
                z = (mean_ranks[i] - mean_ranks[j]) / se
                p_raw = float(2.0 * _norm.sf(abs(z)))
            p_corrected = min(1.0, p_raw * corrections)
            cell = TestResult(
                statistic=float(z),
                p_value=p_corrected,
                significant=p_corrected < alpha,
                p_uncorrected=p_raw,
            )
            matrix[i][j] = cell
            matrix[j][i] = TestResult(
                statistic=float(-z),
                p_value=p_corrected,
                significant=p_corrected < alpha,
                p_uncorrected=p_raw,
            )
    return matrix


# ---------------------------------------------------------------------------
# Spearman
# ---------------------------------------------------------------------------

def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation: Pearson correlation of the midranks.

    Returns NaN when either rank vector has zero variance (undefined).
    """
    if len(x) != len(y):
        raise ValueError("samples must have equal length")
    if len(x) < 3:
        raise ValueError("need at least 3 pairs")
    rx = _midranks([float(v) for v in x])
    ry = _midranks([float(v) for v in y])
    mean_x = sum(rx) / len(rx)
    mean_y = sum(ry) / len(ry)
    dx = [v - mean_x for v in rx]
    dy = [v - mean_y for v in ry]
    var_x = sum(v * v for v in dx)
    var_y = sum(v * v for v in dy)
    if var_x == 0.0 or var_y == 0.0:
        return float("nan")
    cov = sum(a * b for a, b in zip(dx, dy))
    return cov / math.sqrt(var_x * var_y)
