"""The Generalized Score Distribution on an M-point scale {1, ..., M}.

A GSD is parameterised by its mean ``psi`` in [1, M] and a confidence
parameter ``rho`` in (0, 1].  The variance falls linearly in ``rho`` from
the largest value a distribution with mean ``psi`` can have (rho -> 0) to
the smallest (rho = 1).  Below the shifted-binomial point ``rho = C(psi)``
the law is a Beta-Binomial; above it, a mixture of the shifted binomial and
the minimum-variance law.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .special import log_binomial

__all__ = [
    "GsdParams",
    "VarianceBounds",
    "ScoreSample",
    "variance_bounds",
    "gsd_pmf",
    "gsd_log_pmf",
    "gsd_log_pmf_vector",
    "gsd_mean_variance",
    "gsd_sample",
]

DEFAULT_M = 5


@dataclass(frozen=True)
class GsdParams:
    psi: float
    rho: float
    M: int = DEFAULT_M

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"M must be an integer >= 2, got {self.M!r}")
        if not 1.0 <= self.psi <= self.M:
            raise ValueError(f"psi must lie in [1, {self.M}], got {self.psi!r}")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must lie in (0, 1], got {self.rho!r}")

    @property
    def degenerate(self):
        """True when psi sits on an end of the scale, forcing a point mass."""
        return self.psi == 1.0 or self.psi == self.M


@dataclass(frozen=True)
class VarianceBounds:
    """Feasible variance range for a discrete law with mean psi on {1..M}.

    ``c`` is the value of rho that reproduces the shifted binomial; it is NaN
    when psi is 1 or M, where every bound collapses to zero.
    """

    v_min: float
    v_max: float
    v_bin: float
    c: float

    @property
    def degenerate(self):
        return math.isnan(self.c)


@dataclass
class ScoreSample:
    """Integer answers given to one scored item (one PVS)."""

    scores: np.ndarray
    M: int = DEFAULT_M
    id: str = "sample"
    counts: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        scores = np.asarray(self.scores)
        if scores.ndim != 1 or scores.size == 0:
            raise ValueError("a score sample needs at least one answer")
        if not np.all(np.equal(np.mod(scores, 1), 0)):
            raise ValueError(f"scores must be integers (sample {self.id!r})")
        scores = scores.astype(np.int64)
        if scores.min() < 1 or scores.max() > self.M:
            raise ValueError(f"scores of sample {self.id!r} must lie in 1..{self.M}")
        self.scores = scores
        self.counts = np.bincount(scores - 1, minlength=self.M)

    @classmethod
    def from_counts(cls, counts, id="sample"):
        counts = np.asarray(counts, dtype=np.int64)
        scores = np.repeat(np.arange(1, counts.size + 1), counts)
        return cls(scores, M=counts.size, id=id)

    @property
    def n(self):
        return int(self.scores.size)

    def mean(self):
        return float(self.scores.mean())

    def variance(self, ddof=0):
        return float(self.scores.var(ddof=ddof))


def _bounds(psi, M):
    v_min = (math.ceil(psi) - psi) * (psi - math.floor(psi))
    v_max = (psi - 1.0) * (M - psi)
    return v_min, v_max


def variance_bounds(psi, M=DEFAULT_M):
    """Minimal, maximal and shifted-binomial variance at mean ``psi``."""
    if not 1.0 <= psi <= M:
        raise ValueError(f"psi must lie in [1, {M}], got {psi!r}")
    v_min, v_max = _bounds(psi, M)
    v_bin = v_max / (M - 1)
    if v_max == 0.0:
        return VarianceBounds(0.0, 0.0, 0.0, math.nan)
    # on {1, 2} every law with mean psi is the same two-point law
    c = 0.0 if M == 2 else (M - 2) / (M - 1) * v_max / (v_max - v_min)
    return VarianceBounds(v_min, v_max, v_bin, c)


@lru_cache(maxsize=64)
def _log_binomials(n):
    return tuple(log_binomial(n, j) for j in range(n + 1))


def _log_pmf_list(psi, rho, M):
    """Log-probabilities of 1..M as a list of floats.

    Hot path of every likelihood evaluation; kept in plain Python because
    M is small and numpy call overhead dominates at this size.
    """
    if psi == 1.0 or psi == M:
        return [0.0 if k == psi else -math.inf for k in range(1, M + 1)]

    n = M - 1
    log_comb = _log_binomials(n)
    v_min, v_max = _bounds(psi, M)
    c = 0.0 if M == 2 else (M - 2) / n * v_max / (v_max - v_min)

    if rho < c:
        # Beta-Binomial(n, a, b) shifted by one.  The beta-function ratio
        # B(a + j, b + n - j) / B(a, b) is a finite product for integer n,
        # which stays accurate when a, b blow up as rho -> C.
        scale = rho / (n * (c - rho))
        a = (psi - 1.0) * scale
        b = (M - psi) * scale
        log_a = [0.0]
        log_b = [0.0]
        for i in range(n):
            log_a.append(log_a[-1] + math.log(a + i))
            log_b.append(log_b[-1] + math.log(b + i))
        log_norm = 0.0
        for i in range(n):
            log_norm += math.log(a + b + i)
        return [log_comb[j] + log_a[j] + log_b[n - j] - log_norm for j in range(n + 1)]

    log_p = math.log(psi - 1.0) - math.log(n)
    log_q = math.log(M - psi) - math.log(n)
    log_binom = [log_comb[j] + j * log_p + (n - j) * log_q for j in range(n + 1)]
    if rho == 1.0:
        out = []
        for k in range(1, M + 1):
            spike = 1.0 - abs(k - psi)
            out.append(math.log(spike) if spike > 0.0 else -math.inf)
        return out

    # mixture of the min-variance law and the shifted binomial, combined in
    # log space around log1p
    one_minus_c = 1.0 - c
    log_w_bin = math.log((1.0 - rho) / one_minus_c)
    w_spike = (rho - c) / one_minus_c
    out = []
    for j in range(n + 1):
        lb = log_w_bin + log_binom[j]
        spike = 1.0 - abs(j + 1 - psi)
        if spike <= 0.0 or w_spike <= 0.0:
            out.append(lb)
            continue
        ls = math.log(w_spike) + math.log(spike)
        if lb >= ls:
            out.append(lb + math.log1p(math.exp(ls - lb)))
        else:
            out.append(ls + math.log1p(math.exp(lb - ls)))
    return out


def gsd_log_pmf_vector(params):
    """Log-probabilities of every category 1..M as an array (``-inf`` for zero mass)."""
    return np.array(_log_pmf_list(float(params.psi), float(params.rho), params.M))


def gsd_log_pmf(k, params):
    """ln P(U = k) for a single category ``k``."""
    if not 1 <= k <= params.M:
        raise ValueError(f"k must lie in 1..{params.M}, got {k!r}")
    return _log_pmf_list(float(params.psi), float(params.rho), params.M)[int(k) - 1]


def gsd_pmf(params):
    """Probability vector over 1..M; index 0 holds P(U = 1)."""
    probs = np.exp(gsd_log_pmf_vector(params))
    return probs / probs.sum()


def gsd_mean_variance(params):
    """Mean and variance of the distribution, computed from its PMF."""
    probs = gsd_pmf(params)
    support = np.arange(1, params.M + 1)
    mean = float(np.dot(support, probs))
    variance = float(np.dot((support - params.psi) ** 2, probs))
    return mean, variance


def gsd_sample(params, n, seed=None, id="sample"):
    """Draw ``n`` iid answers by inverse-CDF lookup.

    ``seed`` is anything ``numpy.random.default_rng`` accepts; a fixed seed
    gives a fixed sample.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(gsd_pmf(params))
    cdf[-1] = 1.0
    scores = np.searchsorted(cdf, rng.random(n), side="right") + 1
    # guards against u landing on a zero-width final step
    np.minimum(scores, params.M, out=scores)
    return ScoreSample(scores, M=params.M, id=id)
