"""Command-line entry point.

    melasso run      --scenario table1 --sigma-u-sq 0.2 --s0 5 --replicates 50 --out results/t1
    melasso roc      --s0 5 --replicates 50 --out results/roc
    melasso fit      --W W.csv --y y.csv --sigma-uu-diag var.csv --method corrected --cv --out fit/
    melasso simulate --scenario table1 --seed 3 --out data/

Exit codes: 0 success, 2 configuration error, 3 data validation error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .errors import ConfigError, MelassoError
from .experiment import (
    FitRequest, ExperimentConfig, SCENARIOS, fit_file, load_config, run_experiment, run_roc, _model_for,
)
from .report import write_csv, write_json
from .simulate import export_dataset, replicate_seed, simulate_glm, simulate_linear

log = logging.getLogger("melasso")


def _experiment_args(sp, roc=False):
    sp.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    if not roc:
        sp.add_argument("--scenario", choices=[s for s in SCENARIOS if s != "roc-logistic"])
    sp.add_argument("--replicates", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--sigma-u-sq", type=float, dest="sigma_u_sq")
    sp.add_argument("--s0", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("--out", dest="output_dir")
    sp.add_argument("--threads", type=int, help="worker processes (default: logical cores)")
    if roc:
        sp.add_argument("--kappa-grid", type=float, nargs="+", dest="kappa_values")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="melasso", description="Lasso under covariate measurement error.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    _experiment_args(sub.add_parser("run", help="linear simulation table (naive vs corrected lasso)"))
    _experiment_args(sub.add_parser("roc", help="logistic ROC and l1-error sweep"), roc=True)

    sim = sub.add_parser("simulate", help="write one simulated data set as CSV")
    _experiment_args(sim)
    sim.add_argument("--family", choices=["linear", "logistic", "poisson"], default="linear")
    sim.add_argument("--replicate", type=int, default=0)

    fit = sub.add_parser("fit", help="fit CSV data")
    fit.add_argument("--W", required=True, dest="W_csv", help="n x p design with a header row")
    fit.add_argument("--y", required=True, dest="y_csv", help="single-column response with a header row")
    src = fit.add_mutually_exclusive_group(required=True)
    src.add_argument("--sigma-uu", type=float, help="measurement error variance shared by all covariates")
    src.add_argument("--sigma-uu-diag", help="CSV column of per-covariate error variances")
    src.add_argument("--sigma-uu-dense", help="CSV p x p error covariance")
    fit.add_argument("--method", choices=["naive", "corrected", "cs-glm"], default="naive")
    fit.add_argument("--family", choices=["linear", "logistic", "poisson"], default="linear")
    tune = fit.add_mutually_exclusive_group(required=True)
    tune.add_argument("--lambda", type=float, dest="lam")
    tune.add_argument("--kappa", type=float)
    tune.add_argument("--cv", action="store_true")
    tune.add_argument("--elbow", action="store_true")
    fit.add_argument("--elbow-scale", type=float, help="l1 scale of the elbow grid (default: naive CV fit)")
    fit.add_argument("--filter-noise", action="store_true",
                     help="drop covariates whose error variance is at least half their total variance")
    fit.add_argument("--folds", type=int, default=10)
    fit.add_argument("--cv-loss", choices=["corrected", "squared-error"], default="corrected", dest="cv_loss",
                     help="held-out loss for the corrected lasso")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--out", help="directory for fit.json and the tuning trace")
    return ap


def _config_from(args, scenario=None) -> ExperimentConfig:
    base = load_config(args.config).to_dict() if args.config else {}
    for key in ("scenario", "replicates", "seed", "sigma_u_sq", "s0", "n", "p", "output_dir", "kappa_values"):
        v = getattr(args, key, None)
        if v is not None:
            base[key] = v
    if scenario is not None:
        base["scenario"] = scenario
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    base["threads"] = max(1, threads)
    return ExperimentConfig.from_dict(base)


def _print_table(rows, cols):
    print(",".join(cols))
    for r in rows:
        print(",".join(f"{r[c]:.4g}" if isinstance(r[c], float) else str(r[c]) for c in cols))


def cmd_run(args) -> int:
    cfg = _config_from(args)
    if cfg.is_roc:
        raise ConfigError("use the roc subcommand for the roc-logistic scenario")
    res = run_experiment(cfg)
    _print_table(res.table, ["method", "tp_mean", "fp_mean", "l2_err_mean", "l1_err_mean", "nonconverged"])
    log.info("wrote %s", ", ".join(str(p) for p in res.paths.values()))
    return 0


def cmd_roc(args) -> int:
    res = run_roc(_config_from(args, "roc-logistic"))
    _print_table(res.table, ["kappa", "method", "tpr_mean", "fpr_mean", "l1_err_mean"])
    return 0


def cmd_simulate(args) -> int:
    scen = "roc-logistic" if args.family == "logistic" and args.scenario is None else None
    cfg = _config_from(args, scen)
    seeds = replicate_seed(cfg.seed, args.replicate).spawn(3)
    model = _model_for(cfg, args.replicate, seeds)
    if args.family == "linear":
        ds = simulate_linear(model, cfg.n, center=True, seed=seeds[1])
    else:
        ds = simulate_glm(model, cfg.n, args.family, seed=seeds[1])
    paths = export_dataset(ds, cfg.output_dir)
    print("\n".join(str(p) for p in paths.values()))
    return 0


def cmd_fit(args) -> int:
    req = FitRequest(method=args.method, family=args.family, lam=args.lam, kappa=args.kappa, cv=args.cv,
                     elbow=args.elbow, filter_noise=args.filter_noise, folds=args.folds, seed=args.seed,
                     cv_loss=args.cv_loss,
                     elbow_scale=args.elbow_scale)
    if args.sigma_uu is not None:
        source = args.sigma_uu
    else:
        source = args.sigma_uu_diag or args.sigma_uu_dense
    res = fit_file(args.W_csv, args.y_csv, source, req)
    out = res.to_dict()
    sel = out["selected"]
    print(f"method={res.fit.method} {res.fit.tuning_name}={res.fit.tuning:.6g} selected={len(sel)} "
          f"converged={res.fit.converged}")
    for name in sel:
        print(f"  {name}")
    if res.low_confidence:
        print("warning: no plateau in the nonzero-count curve; elbow choice is low-confidence")
    if args.out:
        d = Path(args.out)
        write_json(d / "fit.json", out)
        if res.trace:
            cols = list(res.trace[0].keys())
            write_csv(d / "trace.csv", res.trace, cols)
    return 0


COMMANDS = {"run": cmd_run, "roc": cmd_roc, "simulate": cmd_simulate, "fit": cmd_fit}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except MelassoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
