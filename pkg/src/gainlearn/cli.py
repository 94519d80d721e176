"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 numerical or estimation failure,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import DomainError, EstimationError
from .estimators import estimate_all
from .harness import (
    emit_lemma_csv,
    emit_path_csv,
    load_config,
    print_limits,
    read_path_csv,
    run_experiment,
    with_overrides,
)
from .lemmas import run_lemma_suite
from .model import ModelParams, NoiseSource, simulate_path

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

DEFAULT_PARAMS = ModelParams(theta0=2.0, beta0=0.25, delta0=1.0)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        raise _UsageError(message)


def _n_list(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid n list {text!r}") from exc


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config file (key = value lines)")
    common.add_argument("--seed", type=_u64, help="master seed")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--reps", type=_positive, help="number of replications")
    common.add_argument("--n", type=_n_list, help="sample size(s), comma separated")
    common.add_argument("--threads", type=_positive, help="worker threads")

    p = _Parser(prog="gainlearn", description="Adaptive-learning regression toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    sub.add_parser("simulate", parents=[common], help="simulate one path and write it as CSV")
    fit = sub.add_parser("fit", parents=[common], help="fit all estimators to a path CSV")
    fit.add_argument("path", help="CSV with y and z columns")
    sub.add_parser("mc", parents=[common], help="run a Monte Carlo experiment")
    sub.add_parser("limits", parents=[common], help="print limit values and run lemma checks")
    return p


def _params(args) -> ModelParams:
    return load_config(args.config).params if args.config else DEFAULT_PARAMS


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _cmd_simulate(args) -> int:
    params = _params(args)
    n = args.n[0] if args.n else 1000
    path = simulate_path(params, n, NoiseSource(args.seed or 0, 0))
    fh, close = _open_out(args.out)
    try:
        emit_path_csv(path, fh)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def _cmd_fit(args) -> int:
    params = _params(args)
    try:
        with open(args.path, newline="") as fh:
            y, z = read_path_csv(fh)
    except OSError as exc:
        raise OSError(f"cannot read {args.path}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise _UsageError(f"{args.path}: {exc}") from exc
    theta0 = params.theta0 if args.config else None
    est = estimate_all(z, y, params.bounds, theta0=theta0)
    lines = [
        f"n                 {y.size}",
        f"theta_hat         {est.theta.theta_hat:.10g}",
        f"q_min             {est.theta.q_min:.10g}",
        f"theta_at_boundary {est.theta.at_boundary}",
        f"delta_hat         {est.lam.delta_hat:.10g}",
        f"beta_hat          {est.lam.beta_hat:.10g}",
    ]
    if est.lam_infeasible is not None:
        lines += [f"delta_hat_theta0  {est.lam_infeasible.delta_hat:.10g}",
                  f"beta_hat_theta0   {est.lam_infeasible.beta_hat:.10g}"]
    if est.kappa is not None:
        lines += [f"kappa_beta        {est.kappa.beta_hat:.10g}",
                  f"kappa_theta       {est.kappa.theta_hat:.10g}",
                  f"kappa_delta       {est.kappa.delta_hat_implied:.10g}"]
    lines += [f"alpha_hat         {est.alpha_hat:.10g}",
              f"sigma_u_hat       {est.sigma_u_hat:.10g}",
              f"sigma_eps_hat     {est.sigma_eps_hat:.10g}"]
    print("\n".join(lines))
    return EXIT_OK


def _cmd_mc(args) -> int:
    if not args.config:
        raise _UsageError("mc requires --config")
    cfg = with_overrides(load_config(args.config), master_seed=args.seed, reps=args.reps,
                         n_values=tuple(args.n) if args.n else None, threads=args.threads,
                         output_path=args.out)
    report = run_experiment(cfg)
    if not cfg.output_path:
        sys.stdout.write(report.to_text())
    else:
        for c in report.cells:
            print(f"n={c.n:<8d} {c.estimator:<15s} {c.coordinate:<6s} bias={c.bias: .4g} "
                  f"scaled_sd={c.scaled_sd:.4g} theory={c.theory_sd:.4g} ratio={c.ratio:.3f} "
                  f"cover={c.coverage_95:.3f} used={c.reps_used} failed={c.failures}")
    return EXIT_OK


def _cmd_limits(args) -> int:
    params = _params(args)
    print(print_limits(params))
    kw = {}
    if args.n:
        kw["n_grid"] = tuple(args.n)
        kw["a2_n"] = max(args.n)
    results = run_lemma_suite(params, reps=args.reps or 100, master_seed=args.seed or 0,
                              threads=args.threads or 1, **kw)
    for r in results:
        print(f"{r.lemma_id:<16s} {'PASS' if r.passed else 'FAIL'}  {r.detail}")
    if args.out:
        fh, _ = _open_out(args.out)
        with fh:
            emit_lemma_csv(results, fh)
    return EXIT_OK


_COMMANDS = {"simulate": _cmd_simulate, "fit": _cmd_fit, "mc": _cmd_mc, "limits": _cmd_limits}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EstimationError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
