"""Monte-Carlo check of the GSD estimator and the rho-prior fit.

Samples are drawn from the GSD over a grid of (N, psi, rho) design cells,
re-estimated by maximum likelihood, and the errors are summarised per N.
Every record gets its own seed, derived from the master seed and the cell's
position in the design, so any subset of the study reproduces on its own.
"""

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import DEFAULT_M, GsdParams, gsd_sample
from .estimation import DegenerateSampleError, FitConfig, fit_gsd_mle

__all__ = [
    "SimDesign",
    "SimRecord",
    "RhoPrior",
    "record_seed",
    "run_sim_study",
    "records_to_csv",
    "records_from_csv",
    "accuracy_summary",
    "fit_rho_prior",
]

RECORD_FIELDS = ("n", "true_psi", "true_rho", "rep", "est_psi", "est_rho", "converged", "loglik")


def _default_psi_grid():
    return [float(v) for v in np.linspace(1.05, 4.95, 23)]


def _default_rho_grid():
    return [float(v) for v in np.linspace(0.01, 0.99, 23)]


@dataclass(frozen=True)
class SimDesign:
    n_values: tuple = (6, 12, 24, 48)
    psi_grid: tuple = field(default_factory=lambda: tuple(_default_psi_grid()))
    rho_grid: tuple = field(default_factory=lambda: tuple(_default_rho_grid()))
    repetitions: int = 30
    seed: int = 0
    M: int = DEFAULT_M

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.n_values or min(self.n_values) < 1:
            raise ValueError("n_values must be positive sample sizes")
        if any(not 1.0 <= p <= self.M for p in self.psi_grid):
            raise ValueError(f"psi grid must lie in [1, {self.M}]")
        if any(not 0.0 < r <= 1.0 for r in self.rho_grid):
            raise ValueError("rho grid must lie in (0, 1]")

    @classmethod
    def from_mapping(cls, mapping):
        """Build a design from a parsed config table.

        Grids are given either as explicit lists or as
        ``{start = .., stop = .., num = ..}`` ranges.
        """
        kwargs = {}
        for key in ("psi_grid", "rho_grid"):
            if key in mapping:
                value = mapping[key]
                if isinstance(value, dict):
                    value = np.linspace(value["start"], value["stop"], int(value["num"]))
                kwargs[key] = tuple(float(v) for v in value)
        if "n_values" in mapping:
            kwargs["n_values"] = tuple(int(v) for v in mapping["n_values"])
        for key in ("repetitions", "seed", "M"):
            if key in mapping:
                kwargs[key] = int(mapping[key])
        unknown = set(mapping) - {"psi_grid", "rho_grid", "n_values", "repetitions", "seed", "M"}
        if unknown:
            raise ValueError(f"unknown design keys: {sorted(unknown)}")
        return cls(**kwargs)

    def cells(self):
        """Design cells in fixed order: N outermost, then psi, rho, repetition."""
        for i_n, n in enumerate(self.n_values):
            for i_psi, psi in enumerate(self.psi_grid):
                for i_rho, rho in enumerate(self.rho_grid):
                    for rep in range(self.repetitions):
                        yield (i_n, i_psi, i_rho, rep), (n, psi, rho)

    def __len__(self):
        return len(self.n_values) * len(self.psi_grid) * len(self.rho_grid) * self.repetitions


@dataclass(frozen=True)
class SimRecord:
    n: int
    true_psi: float
    true_rho: float
    rep: int
    est_psi: float
    est_rho: float
    converged: bool
    loglik: float


@dataclass(frozen=True)
class RhoPrior:
    """Normal law for rho, with draws above ``upper`` set to ``upper``."""

    mu: float
    sigma: float
    upper: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")

    def sample(self, n, seed=None, lower=1e-4):
        rng = np.random.default_rng(seed)
        return np.clip(rng.normal(self.mu, self.sigma, n), lower, self.upper)


def record_seed(master_seed, index):
    """Seed of one record: a SeedSequence keyed by the master seed and the cell index."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(index))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _run_cell(args):
    index, (n, psi, rho), master_seed, M, config = args
    sample = gsd_sample(GsdParams(psi, rho, M), n, seed=record_seed(master_seed, index))
    fit = fit_gsd_mle(sample, config)
    return SimRecord(n, psi, rho, index[3], fit.params.psi, fit.params.rho,
                     fit.converged, fit.log_likelihood)


def run_sim_study(design, config=FitConfig(), workers=None):
    """Run every design cell and return one record per (N, psi, rho, repetition).

    ``workers`` > 1 fans the fits out over processes; the output order is the
    design order either way.
    """
    jobs = [(index, values, design.seed, design.M, config) for index, values in design.cells()]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_cell, jobs, chunksize=32))
    return [_run_cell(job) for job in jobs]


def _fmt(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def records_to_csv(records, stream=None):
    """Write records as CSV; returns the text when no stream is given."""
    out = stream if stream is not None else io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for rec in records:
        row = asdict(rec)
        writer.writerow([_fmt(row[name]) for name in RECORD_FIELDS])
    if stream is None:
        return out.getvalue()
    return None


def records_from_csv(stream):
    records = []
    for row in csv.DictReader(stream):
        records.append(SimRecord(
            n=int(row["n"]), true_psi=float(row["true_psi"]), true_rho=float(row["true_rho"]),
            rep=int(row["rep"]), est_psi=float(row["est_psi"]), est_rho=float(row["est_rho"]),
            converged=row["converged"] in ("1", "True", "true"), loglik=float(row["loglik"]),
        ))
    return records


def _band(errors, level=0.95):
    tail = (1.0 - level) / 2.0 * 100.0
    lo, hi = np.percentile(errors, [tail, 100.0 - tail])
    return float(lo), float(hi)


def _error_stats(psi_err, rho_err):
    return {
        "count": int(psi_err.size),
        "bias_psi": float(psi_err.mean()),
        "bias_rho": float(rho_err.mean()),
        "band_psi": _band(psi_err),
        "band_rho": _band(rho_err),
    }


def accuracy_summary(records, converged_only=True):
    """Per-N error statistics of ``true - estimate``.

    For each N the result holds the overall bias and central 95% band of
    psi and rho errors, the same split by true psi and by true rho (the
    error-versus-truth view), and the raw ``scatter`` arrays of true and
    estimated values.  Non-converged records are left out unless
    ``converged_only`` is false; their number is reported either way.
    """
    if not records:
        raise ValueError("no records to summarise")
    summary = {}
    for n in sorted({r.n for r in records}):
        at_n = [r for r in records if r.n == n]
        used = [r for r in at_n if r.converged or not converged_only]
        if not used:
            summary[n] = {"count": 0, "non_converged": len(at_n)}
            continue
        true_psi = np.array([r.true_psi for r in used])
        true_rho = np.array([r.true_rho for r in used])
        est_psi = np.array([r.est_psi for r in used])
        est_rho = np.array([r.est_rho for r in used])
        psi_err = true_psi - est_psi
        rho_err = true_rho - est_rho
        entry = _error_stats(psi_err, rho_err)
        entry["non_converged"] = len(at_n) - sum(r.converged for r in at_n)
        entry["by_true_psi"] = {
            float(v): _error_stats(psi_err[true_psi == v], rho_err[true_psi == v])
            for v in np.unique(true_psi)
        }
        entry["by_true_rho"] = {
            float(v): _error_stats(psi_err[true_rho == v], rho_err[true_rho == v])
            for v in np.unique(true_rho)
        }
        entry["scatter"] = {
            "true_psi": true_psi, "est_psi": est_psi,
            "true_rho": true_rho, "est_rho": est_rho,
        }
        summary[n] = entry
    return summary


def fit_rho_prior(rho_hats):
    """Moment fit of the Normal rho prior (sample mean and n-1 standard deviation)."""
    values = np.asarray(rho_hats, dtype=float)
    if values.size == 0:
        raise ValueError("need at least one rho estimate")
    if np.any((values <= 0.0) | (values > 1.0)):
        raise ValueError("rho estimates must lie in (0, 1]")
    if values.max() == values.min():
        raise DegenerateSampleError("rho estimates have zero spread")
    return RhoPrior(float(values.mean()), float(values.std(ddof=1)))
