"""Quantized, censored Normal model of ordinal scores.

A continuous opinion ``O ~ Normal(psi_o, sigma_o)`` is rounded to the nearest
category, with everything below 1.5 reported as 1 and everything above
M - 0.5 reported as M.  The helpers here compute the induced PMF and the
moments it actually has on the discrete scale.
"""

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_M
from .special import std_normal_cdf

__all__ = [
    "NormalParams",
    "DiscretizedMoments",
    "qnormal_pmf",
    "discretization_map",
    "mean_curve",
    "variance_ceiling_map",
]


@dataclass(frozen=True)
class NormalParams:
    psi_o: float
    sigma_o: float
    M: int = DEFAULT_M

    def __post_init__(self):
        if not self.sigma_o > 0:
            raise ValueError(f"sigma_o must be > 0, got {self.sigma_o!r}")
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"M must be an integer >= 2, got {self.M!r}")


@dataclass(frozen=True)
class DiscretizedMoments:
    psi_u: float
    sigma_u_sq: float


def _bin_mass(lo, hi):
    # P(lo < Z <= hi) taken on whichever side of zero avoids 1 - 1 cancellation
    if lo >= 0.0:
        return std_normal_cdf(-lo) - std_normal_cdf(-hi)
    return std_normal_cdf(hi) - std_normal_cdf(lo)


def qnormal_pmf_list(psi_o, sigma_o, M):
    z = [(s + 0.5 - psi_o) / sigma_o for s in range(1, M)]
    probs = [std_normal_cdf(z[0])]
    for lo, hi in zip(z[:-1], z[1:]):
        probs.append(_bin_mass(lo, hi))
    probs.append(std_normal_cdf(-z[-1]))
    return probs


def qnormal_pmf(params):
    """Probability vector over 1..M for the censored, rounded Normal."""
    return np.array(qnormal_pmf_list(float(params.psi_o), float(params.sigma_o), params.M))


def discretization_map(params):
    """Mean and variance that the quantized model really has on 1..M."""
    probs = qnormal_pmf(params)
    support = np.arange(1, params.M + 1)
    psi_u = float(np.dot(support, probs))
    sigma_u_sq = float(np.dot((support - psi_u) ** 2, probs))
    return DiscretizedMoments(psi_u, sigma_u_sq)


def mean_curve(psi_o_grid, sigma_o, M=DEFAULT_M):
    """``(psi_u, sigma_u_sq)`` arrays over a grid of continuous means at fixed sigma_o."""
    psi_u = np.empty(len(psi_o_grid))
    sigma_u_sq = np.empty(len(psi_o_grid))
    for i, psi_o in enumerate(psi_o_grid):
        moments = discretization_map(NormalParams(float(psi_o), sigma_o, M))
        psi_u[i] = moments.psi_u
        sigma_u_sq[i] = moments.sigma_u_sq
    return psi_u, sigma_u_sq


def variance_ceiling_map(psi_o_grid, M=DEFAULT_M):
    """Discrete variance reached when sigma_o^2 is set to the largest feasible variance.

    For each psi_o the continuous variance is ``(psi_o - 1)(M - psi_o)``;
    quantization and censoring always pull the observed variance below it.
    Points with zero ceiling (psi_o at an end of the scale) yield 0.
    """
    grid = np.asarray(psi_o_grid, dtype=float)
    if np.any((grid < 1) | (grid > M)):
        raise ValueError(f"psi_o grid must lie within [1, {M}]")
    v_max = (grid - 1.0) * (M - grid)
    out = np.zeros_like(grid)
    for i, (psi_o, v) in enumerate(zip(grid, v_max)):
        if v > 0.0:
            out[i] = discretization_map(NormalParams(float(psi_o), float(np.sqrt(v)), M)).sigma_u_sq
    return out
