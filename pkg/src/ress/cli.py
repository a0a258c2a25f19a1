"""Command-line entry point: ``ress analyze | simulate | power-bounds | ratio-check``.

Data goes to stdout (or ``--output``); diagnostics and error objects go to
stderr. Exit codes: 0 success, 1 usage, 2 data, 3 numeric/degenerate input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import baselines, engine
from .errors import RessError, ZeroVarianceError
from .io import (
    AnalysisReport,
    _num,
    dumps,
    load_config,
    load_matrix,
    rows_to_csv,
    split_groups,
)
from .simulation import deviation_ratio_check, run_experiment

RESS_METHODS = {"ress": "refined", "ress0": "raw", "ress_plus": "plus"}
BASELINE_METHODS = ("bh", "iboot", "aboot")


class UsageError(RessError):
    exit_code = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(s):
    return [float(v) for v in s.replace(",", " ").split()] if s.strip() else []


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ress", description="FDR control for large-scale t-tests by sample splitting")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="test every column of a data matrix")
    a.add_argument("input")
    a.add_argument("--mode", choices=["one_sample", "two_sample", "one_sided"], default="one_sample")
    a.add_argument("--method", choices=[*RESS_METHODS, *BASELINE_METHODS], default=None,
                   help="default: ress (ress0 in one_sided mode)")
    a.add_argument("--alpha", type=float, default=0.1)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--bootstrap-b", type=int, default=baselines.DEFAULT_B)
    a.add_argument("--format", choices=["json", "csv"], default="json")
    a.add_argument("--threads", type=int, default=1)
    a.add_argument("--label-column", default=None, help="group label column (name or 1-based index)")
    a.add_argument("--groups", default=None, help="'X,Z' labels; X minus Z is tested")
    a.add_argument("--delimiter", default=None)
    a.add_argument("--no-header", action="store_true")
    a.add_argument("--timing", action="store_true", help="record wall time in the report")
    a.add_argument("--output", "-o", default=None)

    s = sub.add_parser("simulate", help="run a Monte-Carlo experiment from a JSON config")
    s.add_argument("config")
    s.add_argument("--out", default=None, help="directory for metrics/replication/result files")
    s.add_argument("--format", choices=["json", "csv"], default="csv")
    s.add_argument("--threads", type=int, default=1)

    b = sub.add_parser("power-bounds", help="power-ratio bounds over a grid of mu/sigma")
    b.add_argument("--snr", type=_float_list, default=None, help="comma/space separated values")
    b.add_argument("--snr-grid", nargs=3, type=float, metavar=("START", "STOP", "NUM"))
    b.add_argument("--n", type=int, required=True, help="size of one half-sample")
    b.add_argument("--alpha", type=float, default=0.05)
    b.add_argument("--format", choices=["json", "csv"], default="csv")

    r = sub.add_parser("ratio-check", help="null tail ratio of W against its skewness expansion")
    r.add_argument("--family", default="exp1_centered")
    r.add_argument("--n", type=int, default=100)
    r.add_argument("--t", type=_float_list, default=[4.0])
    r.add_argument("--draws", type=float, default=1e6)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--format", choices=["json", "csv"], default="csv")
    return p


def _feature_list(a):
    return [float(v) for v in np.asarray(a)]


def cmd_analyze(args) -> AnalysisReport:
    mode = args.mode
    method = args.method or ("ress0" if mode == "one_sided" else "ress")
    if mode == "one_sided" and method != "ress0":
        raise UsageError("one_sided mode supports only --method ress0")
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    engine.check_alpha(args.alpha)

    t0 = time.perf_counter()
    label_column = args.label_column
    if mode == "two_sample" and label_column is None:
        raise UsageError("two_sample mode needs --label-column")
    m = load_matrix(
        args.input,
        delimiter=args.delimiter,
        header=False if args.no_header else None,
        label_column=label_column,
    )
    x, z, groups = m.values, None, None
    if mode == "two_sample":
        gl = args.groups.split(",") if args.groups else None
        if gl is not None and len(gl) != 2:
            raise UsageError("--groups takes exactly two labels")
        x, z, groups = split_groups(m, gl)

    try:
        report = _analyze(x, z, m.names, mode, method, args)
    except ZeroVarianceError as exc:
        names = [m.names[c] for c in exc.columns]
        raise ZeroVarianceError(
            exc.columns,
            f"zero variance in feature(s) {', '.join(names[:20])}"
            + (f" ... ({len(names)} total)" if len(names) > 20 else ""),
        ) from None
    report.groups = list(groups) if groups else None
    if args.timing:
        report.timing = time.perf_counter() - t0
    return report


def _analyze(x, z, names, mode, method, args) -> AnalysisReport:
    n_obs = [int(x.shape[0])] + ([int(z.shape[0])] if z is not None else [])
    common = dict(mode=mode, method=method, alpha=float(args.alpha), seed=int(args.seed),
                  n_obs=n_obs, p=len(names))
    if method in RESS_METHODS:
        variant = "one_sided" if mode == "one_sided" else RESS_METHODS[method]
        res = engine.ress(x, args.alpha, variant, seed=args.seed, z=z)
        r, ws, tb = res.result, res.stats, res.tstats
        split = {
            "group_a": [int(i) + 1 for i in res.plan.group_a],
            "group_b": [int(i) + 1 for i in res.plan.group_b],
            "dropped": None if res.plan.dropped is None else res.plan.dropped + 1,
        }
        if res.plan_z is not None:
            split["z_group_a"] = [int(i) + 1 for i in res.plan_z.group_a]
            split["z_group_b"] = [int(i) + 1 for i in res.plan_z.group_b]
            split["z_dropped"] = None if res.plan_z.dropped is None else res.plan_z.dropped + 1
        features = {
            "name": list(names),
            "T1": _feature_list(tb.t1),
            "T2": _feature_list(tb.t2),
            "W": _feature_list(ws.w),
            "W_tilde": _feature_list(ws.w_tilde),
        }
        bootstrap_b = None
    else:
        t_full = baselines.full_tstats(x, z)
        split = None
        bootstrap_b = None
        if method == "bh":
            r = baselines.bh_normal_threshold(t_full, args.alpha)
            pv = baselines.two_sided_pvalues(t_full)
        else:
            cfg = baselines.BootstrapConfig(b=args.bootstrap_b, seed=args.seed, workers=args.threads)
            fn = (baselines.bootstrap_individual_pvalues if method == "iboot"
                  else baselines.bootstrap_aggregate_pvalues)
            pv = fn(x, cfg, z, t_obs=t_full)
            rej = baselines.bh_step_up(pv, args.alpha)
            r = engine.ThresholdResult(
                threshold=float(np.min(np.abs(t_full[rej]))) if rej.size else np.inf,
                variant=method, alpha=args.alpha, rejected=rej, curve=np.empty((0, 2)),
            )
            bootstrap_b = int(args.bootstrap_b)
        features = {"name": list(names), "T": _feature_list(t_full), "p_value": _feature_list(pv)}

    rejected = [int(j) for j in r.rejected]
    return AnalysisReport(
        **common,
        threshold=_num(r.threshold),
        rejected=[j + 1 for j in rejected],
        rejected_names=[names[j] for j in rejected],
        curve=[[float(t), float(e)] for t, e in r.curve],
        features=features,
        split=split,
        bootstrap_b=bootstrap_b,
    )


def _simulation_tables(cfg, metrics):
    summary = [e.summary() for e in metrics.values()]
    reps = [
        {"method": m, "replication": i, "fdp": float(e.fdp[i]), "tpp": float(e.tpp[i])}
        for m, e in metrics.items()
        for i in range(len(e.fdp))
    ]
    timing = [{"method": m, "mean_seconds": e.time_mean} for m, e in metrics.items()]
    doc = {
        "schema_version": 1,
        "config": cfg.to_dict(),
        "methods": {
            m: {**e.summary(), "fdp": [float(v) for v in e.fdp], "tpp": [float(v) for v in e.tpp]}
            for m, e in metrics.items()
        },
    }
    return summary, reps, timing, doc


def cmd_simulate(args):
    """Run the configured experiment; returns ``(summary_rows, result_doc)``.

    Timing is kept out of the metrics and result files (it goes to
    ``timing.csv``) so those two stay byte-identical for a fixed seed.
    """
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    cfg = load_config(args.config)
    metrics = run_experiment(cfg, workers=args.threads)
    summary, reps, timing, doc = _simulation_tables(cfg, metrics)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        files = {
            "metrics.csv": rows_to_csv(summary),
            "replications.csv": rows_to_csv(reps),
            "result.json": dumps(doc),
            "timing.csv": rows_to_csv(timing),
        }
        for name, text in files.items():
            with open(os.path.join(args.out, name), "w") as fh:
                fh.write(text)
    return summary, doc


def cmd_power_bounds(args):
    if args.snr is not None and args.snr_grid is not None:
        raise UsageError("give either --snr or --snr-grid, not both")
    if args.snr_grid is not None:
        start, stop, num = args.snr_grid
        grid = list(np.linspace(start, stop, int(num)))
    else:
        grid = args.snr or []
    rows = []
    for s in grid:
        pb = engine.power_bounds(s, args.n, args.alpha)
        rows.append({"snr": float(s), "lower": pb.lower, "upper": pb.upper})
    return rows


def cmd_ratio_check(args):
    out = deviation_ratio_check(
        args.family, args.n, args.t, int(args.draws), seed=args.seed, workers=args.threads
    )
    return [
        {"t": c.t, "mc_ratio": c.mc_ratio, "predicted": c.predicted, "se": c.se,
         "n_pos": c.n_pos, "n_neg": c.n_neg, "insufficient": c.insufficient}
        for c in out
    ]


def _emit(text, path=None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_object(exc) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
    for attr in ("row", "column", "field", "columns", "rep", "method"):
        v = getattr(exc, attr, None)
        if v is not None:
            err[attr] = v
    return {"error": err}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "analyze":
            rep = cmd_analyze(args)
            _emit(rep.to_json() if args.format == "json" else rep.to_csv(), args.output)
        elif args.command == "simulate":
            summary, doc = cmd_simulate(args)
            _emit(dumps(doc) if args.format == "json" else rows_to_csv(summary))
        elif args.command == "power-bounds":
            rows = cmd_power_bounds(args)
            _emit(dumps(rows) if args.format == "json"
                  else rows_to_csv(rows, ["snr", "lower", "upper"]))
        elif args.command == "ratio-check":
            rows = cmd_ratio_check(args)
            _emit(dumps(rows) if args.format == "json" else rows_to_csv(rows))
    except RessError as exc:
        sys.stderr.write(json.dumps(_error_object(exc)) + "\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": {"type": "OSError", "message": str(exc), "exit_code": 2}}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
