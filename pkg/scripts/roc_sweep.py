"""Logistic ROC and l1-error sweep, naive vs conditional-scores lasso.

    python scripts/roc_sweep.py --s0 5 --replicates 50 --out results/roc_s05
"""

import argparse

from melasso.experiment import ExperimentConfig, run_roc


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--s0", type=int, default=5)
    ap.add_argument("--replicates", type=int, default=50)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--kappa-grid", nargs="+", type=float, dest="kappa_values")
    ap.add_argument("--out", default="results/roc")
    args = ap.parse_args()
    cfg = ExperimentConfig(scenario="roc-logistic", s0=args.s0, replicates=args.replicates, seed=args.seed,
                           threads=args.threads, kappa_values=args.kappa_values, output_dir=args.out)
    res = run_roc(cfg)
    print("kappa,method,tpr,fpr,l1_err")
    for r in res.table:
        print(f"{r['kappa']:.3g},{r['method']},{r['tpr_mean']:.3f},{r['fpr_mean']:.4f},{r['l1_err_mean']:.3f}")


if __name__ == "__main__":
    main()
