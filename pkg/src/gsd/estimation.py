"""Parameter estimation for the GSD and the Normal comparison models.

The GSD maximum-likelihood fit works on an unconstrained pair ``(a, b)``
mapped into the admissible box through logistic functions, and climbs the
log-likelihood with a first-order method: central finite-difference
gradients, sign-based per-coordinate step adaptation, and step halving
whenever a move fails to improve the objective.  Several starting points
are tried and the best optimum is kept.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import GsdParams, _log_pmf_list, variance_bounds
from .normal import NormalParams, qnormal_pmf_list

__all__ = [
    "DegenerateSampleError",
    "FitConfig",
    "FitResult",
    "gsd_log_likelihood",
    "qnormal_log_likelihood",
    "log_likelihood_gradient",
    "fit_gsd_moments",
    "fit_gsd_mle",
    "fit_qnormal_mle",
    "fit_normal_moments",
]

# keeps logistic(x) strictly inside (0, 1) in double precision
_X_LIMIT = 30.0
_LOG_FLOOR = math.log(1e-300)


class DegenerateSampleError(ValueError):
    """The sample cannot identify the model (e.g. every answer is identical)."""


@dataclass(frozen=True)
class FitConfig:
    grad_tolerance: float = 1e-5
    max_steps: int = 5000
    fd_step: float = 1e-5
    n_restarts: int = 4
    boundary_margin: float = 1e-4
    learning_rate: float = 0.05

    def __post_init__(self):
        for name in ("grad_tolerance", "max_steps", "fd_step", "n_restarts",
                     "boundary_margin", "learning_rate"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.boundary_margin < 0.01:
            raise ValueError("boundary_margin must be below 0.01")


@dataclass(frozen=True)
class FitResult:
    params: object
    log_likelihood: float
    converged: bool
    steps_used: int
    restarts_tried: int
    degenerate: bool = False


def _check_same_scale(sample, M):
    if sample.M != M:
        raise ValueError(f"sample is on a {sample.M}-point scale, model on {M}")


def gsd_log_likelihood(sample, params):
    """Sum of log-probabilities of the observed answers; ``-inf`` on impossible data."""
    _check_same_scale(sample, params.M)
    log_p = _log_pmf_list(float(params.psi), float(params.rho), params.M)
    total = 0.0
    for count, lp in zip(sample.counts, log_p):
        if count:
            total += count * lp
    return total


def qnormal_log_likelihood(sample, params):
    _check_same_scale(sample, params.M)
    probs = qnormal_pmf_list(float(params.psi_o), float(params.sigma_o), params.M)
    total = 0.0
    for count, p in zip(sample.counts, probs):
        if count:
            total += count * (math.log(p) if p > 0.0 else -math.inf)
    return total


def _logistic(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _logit(u):
    return math.log(u) - math.log1p(-u)


class _GsdBox:
    """Maps unconstrained (a, b) onto [1+m, M-m] x (m, 1)."""

    def __init__(self, M, margin):
        self.M = M
        self.margin = margin
        self.psi_lo = 1.0 + margin
        self.psi_span = (M - 1.0) - 2.0 * margin
        self.rho_span = 1.0 - margin

    def to_params(self, x):
        psi = self.psi_lo + self.psi_span * _logistic(x[0])
        rho = self.margin + self.rho_span * _logistic(x[1])
        return psi, rho

    def from_params(self, psi, rho):
        u = (psi - self.psi_lo) / self.psi_span
        v = (rho - self.margin) / self.rho_span
        u = min(max(u, 1e-9), 1.0 - 1e-9)
        v = min(max(v, 1e-9), 1.0 - 1e-9)
        return (_logit(u), _logit(v))

    def jacobian(self, x):
        # d(psi)/da and d(rho)/db
        sa, sb = _logistic(x[0]), _logistic(x[1])
        return self.psi_span * sa * (1.0 - sa), self.rho_span * sb * (1.0 - sb)


def _gsd_objective(sample, box):
    terms = [(k, int(c)) for k, c in enumerate(sample.counts) if c]
    M = box.M

    def objective(x):
        psi, rho = box.to_params(x)
        log_p = _log_pmf_list(psi, rho, M)
        return sum(c * log_p[k] for k, c in terms)

    return objective


def _qnormal_objective(sample):
    terms = [(k, int(c)) for k, c in enumerate(sample.counts) if c]
    M = sample.M

    def objective(x):
        probs = qnormal_pmf_list(x[0], math.exp(x[1]), M)
        # floor keeps the surface finite when sigma collapses
        return sum(c * (math.log(probs[k]) if probs[k] > 1e-300 else _LOG_FLOOR)
                   for k, c in terms)

    return objective


def _fd_slopes(objective, x, fx, h):
    """Central, forward and backward difference slopes along each axis."""
    central, forward, backward = [], [], []
    for i in range(len(x)):
        up = objective(x[:i] + (x[i] + h,) + x[i + 1:])
        down = objective(x[:i] + (x[i] - h,) + x[i + 1:])
        central.append((up - down) / (2.0 * h))
        forward.append((up - fx) / h)
        backward.append((fx - down) / h)
    return central, forward, backward


def _stationary(central, forward, backward, tol):
    if math.hypot(*central) <= tol:
        return True
    # a kink maximum (e.g. psi on an integer) never zeroes the central
    # slope; no axis direction ascending by more than tol counts as stationary
    return all(f <= tol for f in forward) and all(b >= -tol for b in backward)


def _ascend(objective, x0, config, limit=_X_LIMIT):
    """Maximize ``objective`` from ``x0``; returns (x, f, converged, steps).

    Sign-based per-coordinate steps: a coordinate's step grows while its
    slope keeps its sign and halves when the sign flips, so progress does
    not stall where the slope decays exponentially (parameters pushed to
    the edge of their box).  A move is only taken if it raises the
    objective; otherwise every step is halved.
    """
    x = tuple(min(max(float(v), -limit), limit) for v in x0)
    fx = objective(x)
    dim = len(x)
    steps = [config.learning_rate] * dim
    previous = [0.0] * dim
    for step in range(config.max_steps):
        central, forward, backward = _fd_slopes(objective, x, fx, config.fd_step)
        if _stationary(central, forward, backward, config.grad_tolerance):
            return x, fx, True, step
        if not all(math.isfinite(g) for g in central):
            return x, fx, False, step
        for i, g in enumerate(central):
            if g * previous[i] > 0.0:
                steps[i] = min(steps[i] * 1.2, 2.0)
            elif g * previous[i] < 0.0:
                steps[i] *= 0.5
        candidate = tuple(
            min(max(v + math.copysign(s, g) * (g != 0.0), -limit), limit)
            for v, s, g in zip(x, steps, central)
        )
        f_candidate = objective(candidate)
        if f_candidate > fx:
            x, fx = candidate, f_candidate
            previous = central
        else:
            steps = [s * 0.5 for s in steps]
            previous = [0.0] * dim
            if max(steps) < 1e-13:
                return x, fx, False, step + 1
    return x, fx, False, config.max_steps


def log_likelihood_gradient(sample, params, config=FitConfig()):
    """Gradient of the GSD log-likelihood in (psi, rho) as the optimizer sees it.

    The optimizer differentiates in its unconstrained coordinates; this maps
    that gradient back through the logistic Jacobian.
    """
    box = _GsdBox(params.M, config.boundary_margin)
    objective = _gsd_objective(sample, box)
    x = box.from_params(params.psi, params.rho)
    central, _, _ = _fd_slopes(objective, x, objective(x), config.fd_step)
    d_psi, d_rho = box.jacobian(x)
    return np.array([central[0] / d_psi, central[1] / d_rho])


def fit_gsd_moments(sample, boundary_margin=1e-4):
    """Method-of-moments GSD estimate: mean for psi, inverted variance law for rho."""
    M = sample.M
    psi = min(max(sample.mean(), 1.0), float(M))
    if psi in (1.0, float(M)):
        return GsdParams(psi, 1.0, M)
    bounds = variance_bounds(psi, M)
    spread = bounds.v_max - bounds.v_min
    if spread <= 0.0:
        return GsdParams(psi, 1.0, M)
    rho = (bounds.v_max - sample.variance()) / spread
    rho = min(max(rho, boundary_margin), 1.0)
    return GsdParams(psi, rho, M)


def _best_grid_starts(objective, candidates, k):
    scored = []
    for x in candidates:
        f = objective(x)
        if math.isfinite(f):
            scored.append((f, len(scored), x))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [x for _, _, x in scored[:k]]


def _gsd_grid(box):
    # coarse start grid in (psi, rho) space, fixed so restarts are reproducible
    psis = np.linspace(box.psi_lo, box.psi_lo + box.psi_span, 11)[1:-1]
    rhos = (0.05, 0.25, 0.5, 0.75, 0.95)
    return [box.from_params(p, r) for p in psis for r in rhos]


def _ridge_polish(objective, box, x, fx, config):
    """Climb along the regime boundary rho = C(psi), then resume the 2-D ascent.

    The log-likelihood is continuous but kinked across the boundary curve.
    When the maximum lies on it, the kink is an oblique ridge that axis-wise
    steps cannot follow, so the plain ascent stalls short of the top.
    """
    margin = box.margin

    def on_ridge(t):
        psi = box.psi_lo + box.psi_span * _logistic(t[0])
        c = variance_bounds(psi, box.M).c
        if not margin < c < 1.0:
            return -math.inf
        return objective(box.from_params(psi, c))

    t, ft, _, steps = _ascend(on_ridge, (x[0],), config)
    if not ft > fx:
        return x, fx, False, steps
    psi = box.psi_lo + box.psi_span * _logistic(t[0])
    y = box.from_params(psi, variance_bounds(psi, box.M).c)
    y, fy, converged, more = _ascend(objective, y, config)
    return y, fy, converged, steps + more


def fit_gsd_mle(sample, config=FitConfig()):
    """Maximum-likelihood GSD fit with multi-start first-order ascent.

    A constant sample ``k`` is fitted exactly by the point mass ``(k, 1)``.
    That fit is flagged ``degenerate`` when ``k`` is an end of the scale,
    where the regime boundary C(psi) is undefined.
    """
    M = sample.M
    if np.count_nonzero(sample.counts) == 1:
        k = float(sample.scores[0])
        return FitResult(GsdParams(k, 1.0, M), 0.0, True, 0, 0,
                         degenerate=k in (1.0, float(M)))

    box = _GsdBox(M, config.boundary_margin)
    objective = _gsd_objective(sample, box)
    moment = fit_gsd_moments(sample, config.boundary_margin)
    starts = [box.from_params(moment.psi, moment.rho)]
    starts += _best_grid_starts(objective, _gsd_grid(box), config.n_restarts)

    best = None
    total_steps = 0
    for x0 in starts:
        x, fx, converged, steps = _ascend(objective, x0, config)
        total_steps += steps
        if not converged:
            x, fx, converged, steps = _ridge_polish(objective, box, x, fx, config)
            total_steps += steps
        if best is None or fx > best[1]:
            best = (x, fx, converged)
    x, fx, converged = best
    psi, rho = box.to_params(x)
    if rho >= 1.0 - config.boundary_margin:
        at_one = gsd_log_likelihood(sample, GsdParams(psi, 1.0, M))
        if at_one >= fx:
            rho, fx = 1.0, at_one
    return FitResult(GsdParams(psi, rho, M), fx, converged, total_steps, len(starts))


def fit_normal_moments(sample):
    """Normal fit by sample mean and unbiased standard deviation."""
    sd = math.sqrt(sample.variance(ddof=1)) if sample.n > 1 else 0.0
    if sd == 0.0:
        raise DegenerateSampleError(f"sample {sample.id!r} has zero variance")
    return NormalParams(sample.mean(), sd, sample.M)


def fit_qnormal_mle(sample, config=FitConfig()):
    """Maximum-likelihood fit of the quantized, censored Normal.

    Optimizes over ``(psi_o, log sigma_o)``.  Raises
    :class:`DegenerateSampleError` for a constant sample, whose likelihood
    keeps growing as sigma_o shrinks to zero.
    """
    if np.count_nonzero(sample.counts) == 1:
        raise DegenerateSampleError(f"sample {sample.id!r} is constant")
    M = sample.M
    objective = _qnormal_objective(sample)
    sd = max(math.sqrt(sample.variance(ddof=1)), 0.1)
    starts = [(sample.mean(), math.log(sd))]
    grid = [(float(p), math.log(s)) for p in np.linspace(1.0, M, 7) for s in (0.3, 0.7, 1.5, 3.0)]
    starts += _best_grid_starts(objective, grid, config.n_restarts)

    best = None
    total_steps = 0
    for x0 in starts:
        x, fx, converged, steps = _ascend(objective, x0, config, limit=math.inf)
        total_steps += steps
        if best is None or fx > best[1]:
            best = (x, fx, converged)
    x, fx, converged = best
    params = NormalParams(float(x[0]), math.exp(x[1]), M)
    return FitResult(params, qnormal_log_likelihood(sample, params), converged,
                     total_steps, len(starts))
