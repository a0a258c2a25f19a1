"""FDR / TPR / time for each error family and sample size (p=5000, rho=0, vartheta=0.05).

    python3 scripts/error_family_table.py --reps 200 --bootstrap   # bootstrap rows take much longer
"""

import argparse
import time

from ress.simulation import SimConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--p", type=int, default=5000)
    ap.add_argument("--families", nargs="+", default=["t5", "exp1_centered", "mixed"])
    ap.add_argument("--n-t", type=int, nargs="+", default=[50, 100])
    ap.add_argument("--signal-law", default="mixed_sign")
    ap.add_argument("--bootstrap", action="store_true", help="add A- and I-bootstrap rows")
    ap.add_argument("--bootstrap-b", type=int, default=200)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    methods = ["ress", "ress0", "bh"] + (["aboot", "iboot"] if args.bootstrap else [])
    print("family,n_t,method,fdr,fdr_sd,tpr,tpr_sd,seconds")
    for fam in args.families:
        for n_t in args.n_t:
            cfg = SimConfig(p=args.p, n_t=n_t, vartheta=0.05, error_family=fam, alpha=0.2,
                            reps=args.reps, master_seed=args.seed, signal_law=args.signal_law,
                            bootstrap_b=args.bootstrap_b, methods=methods)
            t0 = time.perf_counter()
            res = run_experiment(cfg, workers=args.threads)
            for m, e in res.items():
                print(f"{fam},{n_t},{m},{100 * e.fdr_mean:.1f},{100 * e.fdr_sd:.1f},"
                      f"{100 * e.tpr_mean:.1f},{100 * e.tpr_sd:.1f},{e.time_mean:.3f}", flush=True)
            print(f"# {fam} n_t={n_t}: {time.perf_counter() - t0:.1f} s wall")


if __name__ == "__main__":
    main()
