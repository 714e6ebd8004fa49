"""Command-line interface.

Subcommands
-----------
fit       Train on a ``x1,...,xd,y`` CSV file and write the model JSON.
predict   Apply a saved model JSON to a ``x1,...,xd`` CSV of points.
simulate  Run the Monte Carlo comparison study and write CSV or JSON.
verify    Run the numerical certification suites; exit 1 on failure.

Exit codes: 0 success, 1 certification failure, 2 usage or input error.
The seed defaults to the ``PPGD_SEED`` environment variable when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .datasets import ParseError, load_csv, load_design_csv
from .experiment import ExperimentSpec, run_experiment
from .training import (
    fit as fit_network,
    make_config,
    model_from_dict,
    model_to_dict,
    predict as predict_network,
    select_hyperparams,
)
from .verify import run_suites

__all__ = ["run_cli", "main"]


def _default_seed() -> int:
    return int(os.environ.get("PPGD_SEED", "0"))


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty grid")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppgd",
        description="Projection pursuit regression by gradient-descent-trained "
        "logistic networks, with baselines, a simulation study and "
        "numerical verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p_fit = sub.add_parser("fit", help="train on a CSV data set", formatter_class=fmt)
    p_fit.add_argument("--data", required=True, help="input CSV with header x1,...,xd,y")
    p_fit.add_argument("--out", required=True, help="output model JSON path")
    p_fit.add_argument("--r", type=int, default=None, help="ridge terms (with --k: skip selection)")
    p_fit.add_argument("--k", type=int, default=None, help="breakpoints per term")
    p_fit.add_argument("--r-grid", type=_int_list, default=(1, 2), help="selection grid for r")
    p_fit.add_argument("--k-grid", type=_int_list, default=(5, 10, 20), help="selection grid for K")
    p_fit.add_argument("--restarts", type=int, default=50, help="random restarts per fit")
    p_fit.add_argument("--steps", type=int, default=None, help="cap on gradient steps per run")
    p_fit.add_argument("--c1", type=float, default=1.0, help="outer-weight penalty constant")
    p_fit.add_argument("--beta-c3", type=float, default=1.0, help="prediction clamp scale c3")
    p_fit.add_argument("--seed", type=int, default=None, help="root seed (default: $PPGD_SEED or 0)")

    p_pred = sub.add_parser("predict", help="apply a saved model", formatter_class=fmt)
    p_pred.add_argument("--model", required=True, help="model JSON from `ppgd fit`")
    p_pred.add_argument("--data", required=True, help="input CSV with header x1,...,xd")
    p_pred.add_argument("--out", required=True, help="output CSV of predictions")

    p_sim = sub.add_parser("simulate", help="run the comparison study", formatter_class=fmt)
    p_sim.add_argument("--model", choices=("m1", "m2"), default="m1", help="synthetic target")
    p_sim.add_argument("--noise", type=float, choices=(0.05, 0.2), default=0.05, help="noise fraction")
    p_sim.add_argument("--n", type=int, default=100, help="training sample size")
    p_sim.add_argument("--reps", type=int, default=25, help="repetitions")
    p_sim.add_argument("--test-size", type=int, default=10_000, help="test design size")
    p_sim.add_argument("--seed", type=int, default=None, help="base seed (default: $PPGD_SEED or 0)")
    p_sim.add_argument("--restarts", type=int, default=50, help="random restarts per fit")
    p_sim.add_argument("--steps", type=int, default=None, help="cap on gradient steps per run")
    p_sim.add_argument("--c1", type=float, default=1.0, help="outer-weight penalty constant")
    p_sim.add_argument("--beta-c3", type=float, default=1.0, help="prediction clamp scale c3")
    p_sim.add_argument("--r-grid", type=_int_list, default=(1, 2), help="selection grid for r")
    p_sim.add_argument("--k-grid", type=_int_list, default=(5, 10, 20), help="selection grid for K")
    p_sim.add_argument("--out", required=True, help="output path")
    p_sim.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p_sim.add_argument("--threads", type=int, default=0, help="worker processes (0 = all cores)")

    p_ver = sub.add_parser("verify", help="run certification suites", formatter_class=fmt)
    p_ver.add_argument(
        "--suite",
        choices=("all", "linear", "approx", "init", "drift"),
        default="all",
        help="which suite to run",
    )
    p_ver.add_argument("--out", default=None, help="write the JSON certificates here")
    p_ver.add_argument(
        "--sweep-out",
        default=None,
        help="write the approximation sweep (target,K,rho,empirical_sup,bound) CSV here",
    )
    return parser


def _cmd_fit(args) -> int:
    data = load_csv(args.data)
    seed = args.seed if args.seed is not None else _default_seed()
    if (args.r is None) != (args.k is None):
        print("error: give both --r and --k or neither", file=sys.stderr)
        return 2
    if args.r is not None:
        config = make_config(
            data.n,
            args.r,
            args.k,
            c1=args.c1,
            c3=args.beta_c3,
            restarts=args.restarts,
            steps_cap=args.steps,
            seed=seed,
        )
        model = fit_network(data, config)
    else:
        sel = select_hyperparams(
            data,
            args.r_grid,
            args.k_grid,
            c1=args.c1,
            c3=args.beta_c3,
            restarts=args.restarts,
            steps_cap=args.steps,
            seed=seed,
        )
        model = sel.model
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")
    print(f"penalized_risk {model.best.penalized_risk!r}")
    return 0


def _cmd_predict(args) -> int:
    with open(args.model, encoding="utf-8") as fh:
        model = model_from_dict(json.load(fh))
    xs = load_design_csv(args.data)
    preds = predict_network(model, xs)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("prediction\n")
        for v in preds:
            fh.write(f"{float(v)!r}\n")
    return 0


def _cmd_simulate(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    threads = args.threads if args.threads > 0 else (os.cpu_count() or 1)
    spec = ExperimentSpec(
        model_id=args.model,
        noise=args.noise,
        n=args.n,
        repetitions=args.reps,
        test_size=args.test_size,
        r_grid=args.r_grid,
        K_grid=args.k_grid,
        restarts=args.restarts,
        steps_cap=args.steps,
        c1=args.c1,
        c3=args.beta_c3,
        base_seed=seed,
        threads=threads,
    )
    table = run_experiment(spec)
    payload = table.to_csv() if args.format == "csv" else table.to_json()
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(payload)
    return 0


def _cmd_verify(args) -> int:
    names = ("linear", "approx", "init", "drift") if args.suite == "all" else (args.suite,)
    certs, sweep_rows = run_suites(names)
    text = json.dumps(certs, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if sweep_rows and args.sweep_out:
        with open(args.sweep_out, "w", encoding="utf-8", newline="") as fh:
            fh.write("target,K,rho,empirical_sup,bound\n")
            for name, K, rho, emp, bound in sweep_rows:
                fh.write(f"{name},{K},{rho!r},{emp!r},{bound!r}\n")
    return 0 if certs["passed"] else 1


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "predict":
            return _cmd_predict(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_verify(args)
    except (ParseError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
