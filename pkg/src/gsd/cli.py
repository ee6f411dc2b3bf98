"""Command-line entry point: ``gsd <command> [options]``.

Exit codes: 0 success, 2 usage or configuration error, 3 data error.
Set ``GSD_LOG_LEVEL`` (e.g. ``DEBUG``) for diagnostics on stderr.
"""

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager

import numpy as np
import tomli

from .core import DEFAULT_M, GsdParams, gsd_pmf, gsd_sample
from .estimation import (
    DegenerateSampleError,
    FitConfig,
    fit_gsd_mle,
    fit_normal_moments,
    fit_qnormal_mle,
    qnormal_log_likelihood,
)
from .gof import chi_squared_gof
from .io import DataError, parse_scores_csv, write_scores_csv
from .normal import mean_curve, qnormal_pmf, variance_ceiling_map
from .pipeline import format_float, run_batch
from .simstudy import SimDesign, records_to_csv, run_sim_study

log = logging.getLogger("gsd")

EXIT_USAGE = 2
EXIT_DATA = 3


class UsageError(Exception):
    pass


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            yield handle


def _fit_config(args):
    kwargs = {}
    for name in ("grad_tolerance", "max_steps", "n_restarts", "boundary_margin"):
        value = getattr(args, name, None)
        if value is not None:
            kwargs[name] = value
    try:
        return FitConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(args):
    return parse_scores_csv(args.input, format=args.format, M=args.M)


def _fit_one(sample, model, config):
    """Returns (params dict, fit summary dict, pmf or None, flags)."""
    flags = []
    if model == "gsd":
        fit = fit_gsd_mle(sample, config)
        if fit.degenerate:
            flags.append("degenerate")
        params = {"psi": fit.params.psi, "rho": fit.params.rho}
        return params, fit, gsd_pmf(fit.params), flags
    try:
        if model == "qnormal":
            fit = fit_qnormal_mle(sample, config)
            normal = fit.params
        else:
            normal = fit_normal_moments(sample)
            fit = None
    except DegenerateSampleError:
        return None, None, None, ["degenerate"]
    params = {"psi_o": normal.psi_o, "sigma_o": normal.sigma_o}
    return params, fit, qnormal_pmf(normal), flags


def _fit_record(sample, model, config):
    params, fit, _, flags = _fit_one(sample, model, config)
    record = {"id": sample.id, "n": sample.n, "model": model, "flags": flags}
    if params is None:
        record.update(params=None, log_likelihood=None, converged=None,
                      steps_used=None, restarts_tried=None)
        return record
    record["params"] = {k: format_float(v) for k, v in params.items()}
    if fit is None:
        record.update(log_likelihood=format_float(qnormal_log_likelihood(
            sample, fit_normal_moments(sample))), converged=True, steps_used=0, restarts_tried=0)
    else:
        record.update(log_likelihood=format_float(fit.log_likelihood), converged=fit.converged,
                      steps_used=fit.steps_used, restarts_tried=fit.restarts_tried)
        if not fit.converged:
            flags.append("not_converged")
    return record


def cmd_fit(args):
    config = _fit_config(args)
    dataset = _load(args)
    with _output(args.output) as out:
        for sample in dataset:
            out.write(json.dumps(_fit_record(sample, args.model, config), sort_keys=True) + "\n")


def cmd_gof(args):
    config = _fit_config(args)
    dataset = _load(args)
    with _output(args.output) as out:
        for sample in dataset:
            params, _, pmf, flags = _fit_one(sample, args.model, config)
            record = {"id": sample.id, "n": sample.n, "model": args.model, "flags": flags,
                      "params": None if params is None
                      else {k: format_float(v) for k, v in params.items()}}
            if pmf is not None:
                result = chi_squared_gof(sample, pmf, n_fitted_params=2,
                                         min_expected=args.min_expected)
                if result.untestable:
                    flags.append("untestable")
                record.update(
                    statistic=format_float(result.statistic), df=result.df,
                    p_value=format_float(result.p_value),
                    merged_cells=[list(c) for c in result.merged_cells],
                    observed=[int(v) for v in result.observed],
                    expected=[format_float(v) for v in result.expected],
                )
            out.write(json.dumps(record, sort_keys=True) + "\n")


def cmd_pmf(args):
    try:
        params = GsdParams(args.psi, args.rho, args.M)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _output(args.output) as out:
        for k, p in enumerate(gsd_pmf(params), start=1):
            out.write(f"{k}:{format_float(p)}\n")


def cmd_sample(args):
    try:
        params = GsdParams(args.psi, args.rho, args.M)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.n < 1 or args.samples < 1:
        raise UsageError("--n and --samples must be positive")
    seeds = np.random.SeedSequence(args.seed).spawn(args.samples)
    width = len(str(args.samples))
    samples = [
        gsd_sample(params, args.n, seed=seq, id=args.id if args.samples == 1
                   else f"{args.id}{i:0{width}d}")
        for i, seq in enumerate(seeds, start=1)
    ]
    with _output(args.output) as out:
        write_scores_csv(samples, out, format=args.format)


def cmd_batch(args):
    config = _fit_config(args)
    if not 0.0 < args.alpha < 1.0:
        raise UsageError("--alpha must lie in (0, 1)")
    dataset = _load(args)
    report = run_batch(dataset, alpha=args.alpha, config=config,
                       min_expected=args.min_expected, seed=args.seed, workers=args.workers)
    if args.output in (None, "-"):
        sys.stdout.write(report.to_json() + "\n")
        return
    with open(args.output + ".json", "w", encoding="utf-8") as handle:
        handle.write(report.to_json() + "\n")
    with open(args.output + ".csv", "w", newline="", encoding="utf-8") as handle:
        handle.write(report.to_csv())
    log.info("wrote %s.json and %s.csv", args.output, args.output)


def cmd_simstudy(args):
    config = _fit_config(args)
    mapping = {}
    if args.design:
        try:
            with open(args.design, "rb") as handle:
                mapping = tomli.load(handle)
        except OSError as exc:
            raise UsageError(f"cannot read design file: {exc}") from None
        except tomli.TOMLDecodeError as exc:
            raise UsageError(f"bad design file: {exc}") from None
    if args.seed is not None:
        mapping["seed"] = args.seed
    try:
        design = SimDesign.from_mapping(mapping)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad design: {exc}") from None
    log.info("running %d simulation records", len(design))
    records = run_sim_study(design, config, workers=args.workers)
    with _output(args.output) as out:
        records_to_csv(records, out)


def cmd_curves(args):
    M = args.M
    if args.points < 2:
        raise UsageError("--points must be >= 2")
    grid = np.linspace(1.0, M, args.points)
    with _output(args.output) as out:
        if args.kind == "ceiling":
            out.write("psi_o,sigma_o_sq,sigma_u_sq\n")
            ceiling = variance_ceiling_map(grid, M)
            for psi_o, su in zip(grid, ceiling):
                out.write(f"{format_float(psi_o)},{format_float((psi_o - 1) * (M - psi_o))},"
                          f"{format_float(su)}\n")
            return
        out.write("sigma_o,psi_o,psi_u,sigma_u_sq\n")
        for sigma in args.sigma:
            if not sigma > 0:
                raise UsageError("--sigma values must be positive")
            psi_u, sigma_u_sq = mean_curve(grid, sigma, M)
            for psi_o, pu, su in zip(grid, psi_u, sigma_u_sq):
                out.write(f"{format_float(sigma)},{format_float(psi_o)},"
                          f"{format_float(pu)},{format_float(su)}\n")


def _add_data_args(p):
    p.add_argument("--input", required=True, help="score CSV file")
    p.add_argument("--format", choices=("long", "wide"), default="long")
    p.add_argument("--M", type=int, default=DEFAULT_M, help="number of scale points")


def _add_fit_args(p):
    p.add_argument("--max-steps", dest="max_steps", type=int)
    p.add_argument("--n-restarts", dest="n_restarts", type=int)
    p.add_argument("--grad-tolerance", dest="grad_tolerance", type=float)
    p.add_argument("--boundary-margin", dest="boundary_margin", type=float)


def build_parser():
    parser = argparse.ArgumentParser(prog="gsd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model to every sample, one JSON line each")
    _add_data_args(p)
    _add_fit_args(p)
    p.add_argument("--model", choices=("gsd", "qnormal", "normal"), default="gsd")
    p.add_argument("--output")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("gof", help="fit and chi-squared test every sample")
    _add_data_args(p)
    _add_fit_args(p)
    p.add_argument("--model", choices=("gsd", "qnormal", "normal"), default="gsd")
    p.add_argument("--min-expected", dest="min_expected", type=float, default=1.0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("pmf", help="print the GSD probabilities as k:p lines")
    p.add_argument("--psi", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--M", type=int, default=DEFAULT_M)
    p.add_argument("--output")
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("sample", help="draw GSD scores as CSV")
    p.add_argument("--psi", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="answers per sample")
    p.add_argument("--samples", type=int, default=1, help="number of samples (PVSs)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--M", type=int, default=DEFAULT_M)
    p.add_argument("--id", default="pvs")
    p.add_argument("--format", choices=("long", "wide"), default="long")
    p.add_argument("--output")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("batch", help="three-model fit, GOF and global test report")
    _add_data_args(p)
    _add_fit_args(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-expected", dest="min_expected", type=float, default=1.0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output", help="path prefix; writes PREFIX.json and PREFIX.csv")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("simstudy", help="estimator accuracy simulation, CSV records")
    _add_fit_args(p)
    p.add_argument("--design", help="TOML design file (defaults to the full design)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output")
    p.set_defaults(func=cmd_simstudy)

    p = sub.add_parser("curves", help="quantized-Normal moment curves as CSV")
    p.add_argument("--sigma", type=float, nargs="+", default=[1.0])
    p.add_argument("--kind", choices=("mean", "ceiling"), default="mean")
    p.add_argument("--points", type=int, default=81)
    p.add_argument("--M", type=int, default=DEFAULT_M)
    p.add_argument("--output")
    p.set_defaults(func=cmd_curves)
    return parser


def main(argv=None):
    level = getattr(logging, os.environ.get("GSD_LOG_LEVEL", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"gsd {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"gsd {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
