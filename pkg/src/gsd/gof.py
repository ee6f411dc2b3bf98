"""Pearson chi-squared goodness of fit and the global p-value meta-test."""

import math
from dataclasses import dataclass

import numpy as np

from .special import chi_squared_sf, log_binomial

__all__ = [
    "GofResult",
    "GlobalTestResult",
    "merge_cells",
    "chi_squared_gof",
    "binomial_upper_tail",
    "global_pvalue_test",
    "pvalue_histogram",
]


@dataclass(frozen=True)
class GofResult:
    statistic: float
    df: int
    p_value: float
    merged_cells: list
    expected: np.ndarray
    observed: np.ndarray
    untestable: bool = False


@dataclass(frozen=True)
class GlobalTestResult:
    n_tests: int
    n_below_alpha: int
    alpha: float
    p_value: float

    @property
    def fraction_below_alpha(self):
        return self.n_below_alpha / self.n_tests


def merge_cells(expected, min_expected):
    """Group adjacent categories until every group expects ``min_expected``.

    Works outward-in: the deficient group nearest an end of the scale is
    merged first, always into its neighbour on the side of that nearer end
    (end groups merge inward since they have no outer neighbour).  Returns a
    list of inclusive ``(first, last)`` index pairs, 0-based.
    """
    groups = [[i, i, float(e)] for i, e in enumerate(expected)]
    last_index = len(expected) - 1
    while len(groups) > 1:
        deficient = [g for g in groups if g[2] < min_expected]
        if not deficient:
            break
        target = min(deficient, key=lambda g: (min(g[0], last_index - g[1]), g[0]))
        pos = groups.index(target)
        if pos == 0:
            other = 1
        elif pos == len(groups) - 1:
            other = pos - 1
        elif target[0] <= last_index - target[1]:
            other = pos - 1
        else:
            other = pos + 1
        lo, hi = sorted((pos, other))
        a, b = groups[lo], groups[hi]
        groups[lo:hi + 1] = [[a[0], b[1], a[2] + b[2]]]
    return [(g[0], g[1]) for g in groups]


def chi_squared_gof(sample, model_pmf, n_fitted_params=2, min_expected=1.0):
    """Pearson chi-squared test of a sample against model cell probabilities.

    Cells with small expected counts are merged first (see
    :func:`merge_cells`).  Degrees of freedom are
    ``cells - 1 - n_fitted_params``; when fewer than one remain the result is
    flagged ``untestable`` and the p-value is taken at one degree of freedom.
    """
    probs = np.asarray(model_pmf, dtype=float)
    if probs.size != sample.M:
        raise ValueError(f"model has {probs.size} cells, sample scale has {sample.M}")
    if n_fitted_params not in (0, 1, 2):
        raise ValueError("n_fitted_params must be 0, 1 or 2")
    n = sample.n
    expected_raw = n * probs / probs.sum()
    cells = merge_cells(expected_raw, min_expected)
    observed = np.array([sample.counts[a:b + 1].sum() for a, b in cells])
    expected = np.array([expected_raw[a:b + 1].sum() for a, b in cells])

    statistic = 0.0
    for o, e in zip(observed, expected):
        if e > 0.0:
            statistic += (o - e) ** 2 / e
        elif o > 0:
            statistic = math.inf
    dof = len(cells) - 1 - n_fitted_params
    untestable = dof < 1
    dof = max(1, dof)
    p_value = chi_squared_sf(statistic, dof)
    merged = [(a + 1, b + 1) for a, b in cells]
    return GofResult(statistic, dof, p_value, merged, expected, observed, untestable)


def binomial_upper_tail(n, x, p):
    """P(Binomial(n, p) >= x), summed exactly in log space."""
    if x <= 0:
        return 1.0
    if x > n:
        return 0.0
    log_p, log_q = math.log(p), math.log1p(-p)
    j = np.arange(x, n + 1)
    # log C(n, j) built by recurrence from the first term
    ratios = np.log((n - j[:-1]) / (j[:-1] + 1.0))
    log_comb = log_binomial(n, x) + np.concatenate(([0.0], np.cumsum(ratios)))
    log_terms = log_comb + j * log_p + (n - j) * log_q
    top = log_terms.max()
    return float(min(1.0, math.exp(top) * np.exp(log_terms - top).sum()))


def global_pvalue_test(pvalues, alpha=0.05):
    """Exact one-sided binomial test of H0: P(p-value < alpha) <= alpha."""
    pvalues = np.asarray(pvalues, dtype=float)
    if pvalues.size == 0:
        raise ValueError("need at least one p-value")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    n = int(pvalues.size)
    below = int(np.count_nonzero(pvalues < alpha))
    return GlobalTestResult(n, below, alpha, binomial_upper_tail(n, below, alpha))


def pvalue_histogram(pvalues, n_bins=20):
    """Counts in equal-width bins over [0, 1]; the last bin includes 1."""
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    counts, _ = np.histogram(np.asarray(pvalues, dtype=float), bins=n_bins, range=(0.0, 1.0))
    return counts
