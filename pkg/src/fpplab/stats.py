"""Confidence intervals and one-sided trend tests for replicate statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from statsmodels.stats.proportion import confint_proportions_2indep, proportion_confint

from .errors import InsufficientDataError

TREND_LEVEL = 0.01


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise InsufficientDataError("no trials")
    lo, hi = proportion_confint(successes, trials, alpha=1 - level, method="wilson")
    # the closed form can land a rounding error outside [0, 1] at k = 0 or k = n
    return max(0.0, float(lo)), min(1.0, float(hi))


def difference_lower_bound(k1: int, n1: int, k2: int, n2: int, alpha: float = TREND_LEVEL) -> float:
    """One-sided lower confidence bound for ``p1 - p2`` (Newcombe hybrid score, Wilson based)."""
    if n1 < 1 or n2 < 1:
        raise InsufficientDataError("no trials")
    lo, _ = confint_proportions_2indep(k1, n1, k2, n2, method="newcomb", compare="diff", alpha=2 * alpha)
    return float(lo)


def mean_interval(values, level: float = 0.95) -> tuple[float, float, float]:
    """``(mean, lo, hi)`` with a Student-t interval."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise InsufficientDataError("need at least two values")
    m = float(v.mean())
    half = float(stats.t.ppf(0.5 + level / 2, v.size - 1) * v.std(ddof=1) / math.sqrt(v.size))
    return m, m - half, m + half


@dataclass(frozen=True)
class TrendTest:
    holds: bool
    lower_bounds: tuple  # lower bound of p_i - p_{i+1} for each consecutive pair
    alpha: float


def strictly_decreasing(counts, alpha: float = TREND_LEVEL) -> TrendTest:
    """Every consecutive drop ``p_i - p_{i+1}`` is significantly positive.  ``counts`` is ``[(k, n), ...]``."""
    lb = tuple(difference_lower_bound(*a, *b, alpha) for a, b in zip(counts, counts[1:]))
    return TrendTest(all(x > 0 for x in lb), lb, alpha)


def nondecreasing(counts, alpha: float = TREND_LEVEL) -> TrendTest:
    """No consecutive pair shows a significant decrease."""
    lb = tuple(difference_lower_bound(*a, *b, alpha) for a, b in zip(counts, counts[1:]))
    return TrendTest(all(x <= 0 for x in lb), lb, alpha)
