"""Generalized Score Distribution for ordinal subjective scores."""

from .core import (
    DEFAULT_M,
    GsdParams,
    ScoreSample,
    VarianceBounds,
    gsd_log_pmf,
    gsd_log_pmf_vector,
    gsd_mean_variance,
    gsd_pmf,
    gsd_sample,
    variance_bounds,
)
from .estimation import (
    DegenerateSampleError,
    FitConfig,
    FitResult,
    fit_gsd_mle,
    fit_gsd_moments,
    fit_normal_moments,
    fit_qnormal_mle,
    gsd_log_likelihood,
    qnormal_log_likelihood,
)
from .gof import GlobalTestResult, GofResult, chi_squared_gof, global_pvalue_test, pvalue_histogram
from .io import DataError, Dataset, parse_scores_csv, write_scores_csv
from .normal import DiscretizedMoments, NormalParams, discretization_map, mean_curve, qnormal_pmf, variance_ceiling_map
from .pipeline import BatchReport, run_batch
from .simstudy import RhoPrior, SimDesign, SimRecord, accuracy_summary, fit_rho_prior, run_sim_study

__version__ = "0.1.0"
