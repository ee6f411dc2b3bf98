"""Batch goodness-of-fit over a dataset for the GSD, QNormal and Normal models.

For every sample each model is fitted, its cell probabilities are compared
to the observed answer counts with a chi-squared test, and the per-model
p-values are pooled into the global binomial test.
"""

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .core import gsd_pmf
from .estimation import (
    DegenerateSampleError,
    FitConfig,
    fit_gsd_mle,
    fit_normal_moments,
    fit_qnormal_mle,
    qnormal_log_likelihood,
)
from .gof import chi_squared_gof, global_pvalue_test
from .normal import qnormal_pmf

__all__ = ["MODELS", "BatchRow", "BatchReport", "fit_sample", "run_batch", "format_float"]

MODELS = ("GSD", "QNormal", "Normal")
ROW_FIELDS = ("id", "n", "model", "psi_hat", "rho_or_sigma_hat", "loglik",
              "chi2", "df", "p_value", "flags")


def format_float(value):
    """Nine significant digits; ``None`` for missing or non-finite values."""
    if value is None:
        return None
    value = float(value)
    if value != value or value in (float("inf"), float("-inf")):
        return None
    return float(format(value, ".9g"))


@dataclass
class BatchRow:
    id: str
    n: int
    model: str
    psi_hat: float = None
    rho_or_sigma_hat: float = None
    loglik: float = None
    chi2: float = None
    df: int = None
    p_value: float = None
    flags: list = field(default_factory=list)


@dataclass
class BatchReport:
    rows: list
    global_tests: dict
    config: dict

    def to_dict(self):
        rows = []
        for row in self.rows:
            d = asdict(row)
            for key in ("psi_hat", "rho_or_sigma_hat", "loglik", "chi2", "p_value"):
                d[key] = format_float(d[key])
            rows.append(d)
        return {"rows": rows, "global": self.global_tests, "config": self.config}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(ROW_FIELDS)
        for d in self.to_dict()["rows"]:
            writer.writerow(["" if d[k] is None else (";".join(d[k]) if k == "flags" else d[k])
                             for k in ROW_FIELDS])
        return out.getvalue()


def fit_sample(sample, config=FitConfig(), min_expected=1.0):
    """Fit all three models to one sample; returns one :class:`BatchRow` per model."""
    rows = []

    gsd = fit_gsd_mle(sample, config)
    row = BatchRow(sample.id, sample.n, "GSD", gsd.params.psi, gsd.params.rho, gsd.log_likelihood)
    if gsd.degenerate:
        row.flags.append("degenerate")
    if not gsd.converged:
        row.flags.append("not_converged")
    _attach_gof(row, sample, gsd_pmf(gsd.params), min_expected)
    rows.append(row)

    row = BatchRow(sample.id, sample.n, "QNormal")
    try:
        qn = fit_qnormal_mle(sample, config)
    except DegenerateSampleError:
        row.flags.append("degenerate")
    else:
        row.psi_hat, row.rho_or_sigma_hat, row.loglik = qn.params.psi_o, qn.params.sigma_o, qn.log_likelihood
        if not qn.converged:
            row.flags.append("not_converged")
        _attach_gof(row, sample, qnormal_pmf(qn.params), min_expected)
    rows.append(row)

    row = BatchRow(sample.id, sample.n, "Normal")
    try:
        nm = fit_normal_moments(sample)
    except DegenerateSampleError:
        row.flags.append("degenerate")
    else:
        row.psi_hat, row.rho_or_sigma_hat = nm.psi_o, nm.sigma_o
        row.loglik = qnormal_log_likelihood(sample, nm)
        _attach_gof(row, sample, qnormal_pmf(nm), min_expected)
    rows.append(row)
    return rows


def _attach_gof(row, sample, pmf, min_expected):
    result = chi_squared_gof(sample, pmf, n_fitted_params=2, min_expected=min_expected)
    row.chi2, row.df, row.p_value = result.statistic, result.df, result.p_value
    if result.untestable:
        row.flags.append("untestable")


def _fit_job(args):
    sample, config, min_expected = args
    return fit_sample(sample, config, min_expected)


def global_section(rows, alpha):
    """Pool per-model p-values; rows without a p-value (degenerate fits) are skipped."""
    section = {}
    for model in MODELS:
        pvalues = [r.p_value for r in rows if r.model == model and r.p_value is not None]
        if not pvalues:
            section[model] = {"n_tests": 0, "n_below_alpha": 0,
                              "fraction_below_alpha": None, "p_value": None}
            continue
        test = global_pvalue_test(pvalues, alpha)
        section[model] = {
            "n_tests": test.n_tests,
            "n_below_alpha": test.n_below_alpha,
            "fraction_below_alpha": format_float(test.fraction_below_alpha),
            "p_value": format_float(test.p_value),
        }
    return section


def run_batch(dataset, alpha=0.05, config=FitConfig(), min_expected=1.0, seed=0, workers=None):
    """Run the full fit-and-test pipeline over every sample of ``dataset``.

    Fitting is deterministic; ``seed`` is only echoed into the report.
    """
    if len(dataset) == 0:
        raise ValueError("dataset has no samples")
    jobs = [(s, config, min_expected) for s in dataset.samples]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_sample = list(pool.map(_fit_job, jobs))
    else:
        per_sample = [_fit_job(job) for job in jobs]
    rows = [row for rows in per_sample for row in rows]
    config_echo = {"alpha": alpha, "seed": seed, "min_expected": min_expected,
                   "M": dataset.M, "fit": asdict(config)}
    return BatchReport(rows, global_section(rows, alpha), config_echo)
