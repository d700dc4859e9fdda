"""Prediction-accuracy statistics for out-of-sample model checks.

Two tools: Pearson correlation between predicted and observed series, and
a paired Wilcoxon signed-rank test of whether predictions are biased.

The signed-rank test here computes its null distribution by direct
convolution over sign assignments (probabilities, not counts, so it never
overflows), which keeps small-sample p-values exact even when tied
absolute differences produce half-integer ranks.  Large samples switch to
the usual normal approximation with tie and continuity corrections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

from .errors import ValidationError
from .validation import as_float_array, require

__all__ = [
    "EvaluationResult",
    "WilcoxonResult",
    "evaluate_predictions",
    "wilcoxon_signed_rank",
]


@dataclass(frozen=True)
class EvaluationResult:
    """Pearson correlation between predictions and observations."""

    r: float
    r_squared: float
    n: int

    def __post_init__(self) -> None:
        require(-1.0 - 1e-12 <= self.r <= 1.0 + 1e-12, f"correlation out of range: {self.r}")
        require(-1e-12 <= self.r_squared <= 1.0 + 1e-12, f"r_squared out of range: {self.r_squared}")


def evaluate_predictions(predicted: np.ndarray, observed: np.ndarray) -> EvaluationResult:
    """Pearson ``r`` and ``r**2`` between two paired series.

    Both series need at least two points and non-zero variance.
    """
    p = as_float_array(predicted, "predicted")
    o = as_float_array(observed, "observed", length=p.size)
    require(p.size >= 2, "need at least two paired values to correlate")
    if float(np.std(p)) == 0.0 or float(np.std(o)) == 0.0:
        raise ValidationError("correlation undefined: one of the series is constant")
    r = float(np.corrcoef(p, o)[0, 1])
    return EvaluationResult(r=r, r_squared=r * r, n=int(p.size))


@dataclass(frozen=True)
class WilcoxonResult:
    """Paired signed-rank test result.

    ``statistic`` is the sum of ranks of the positive differences,
    ``n`` the number of non-zero pairs entering the test, and
    ``median_difference`` the median of *all* paired differences
    (observed minus predicted), zeros included.
    """

    statistic: float
    p_value: float
    median_difference: float
    n: int
    method: str


def _exact_two_sided(doubled_ranks: np.ndarray, doubled_stat: int) -> float:
    """Exact two-sided p by convolving the null distribution.

    Works on doubled ranks so tied (half-integer) ranks become integers.
    Each difference contributes its rank with probability 1/2 under the
    null; the distribution of the positive-rank sum follows by dynamic
    programming over probabilities.
    """
    total = int(doubled_ranks.sum())
    probs = np.zeros(total + 1)
    probs[0] = 1.0
    top = 0
    for r2 in doubled_ranks:
        new = 0.5 * probs[: top + r2 + 1].copy()
        new[r2:] += 0.5 * probs[: top + 1]
        probs[: top + r2 + 1] = new
        top += r2
    lower = float(probs[: doubled_stat + 1].sum())
    upper = float(probs[doubled_stat:].sum())
    return min(1.0, 2.0 * min(lower, upper))


def _approx_two_sided(ranks: np.ndarray, stat: float) -> float:
    n = ranks.size
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, counts = np.unique(ranks, return_counts=True)
    var -= float(np.sum(counts**3 - counts)) / 48.0
    if var <= 0.0:
        return 1.0
    z = (abs(stat - mean) - 0.5) / np.sqrt(var)
    return float(min(1.0, 2.0 * norm.sf(z)))


def wilcoxon_signed_rank(
    observed: np.ndarray,
    predicted: np.ndarray | None = None,
    *,
    method: str = "auto",
    exact_limit: int = 25,
) -> WilcoxonResult:
    """Two-sided paired Wilcoxon signed-rank test.

    Call with two paired series, or with a single series of differences.
    Zero differences are dropped before ranking (the classic treatment);
    ties in absolute value receive average ranks.  ``method`` is
    ``"exact"``, ``"approx"``, or ``"auto"`` (exact up to ``exact_limit``
    non-zero pairs, normal approximation beyond).
    """
    require(method in ("auto", "exact", "approx"), f"unknown method {method!r}")
    obs = as_float_array(observed, "observed")
    if predicted is None:
        diffs = obs
    else:
        pred = as_float_array(predicted, "predicted", length=obs.size)
        diffs = obs - pred
    require(diffs.size > 0, "need at least one pair")
    median_diff = float(np.median(diffs))

    nonzero = diffs[diffs != 0.0]
    if nonzero.size == 0:
        raise ValidationError("all paired differences are zero; the signed-rank test is undefined")
    ranks = rankdata(np.abs(nonzero))
    stat = float(ranks[nonzero > 0.0].sum())

    use_exact = method == "exact" or (method == "auto" and nonzero.size <= exact_limit)
    if use_exact:
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        p = _exact_two_sided(doubled, int(round(2.0 * stat)))
        chosen = "exact"
    else:
        p = _approx_two_sided(ranks, stat)
        chosen = "approx"
    return WilcoxonResult(
        statistic=stat,
        p_value=p,
        median_difference=median_diff,
        n=int(nonzero.size),
        method=chosen,
    )
