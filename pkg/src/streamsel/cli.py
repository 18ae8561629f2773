"""Command line entry point: ``streamsel {select,compare,simulate,report}``.

Exit codes: 0 success (including partial success with error rows),
1 configuration error, 2 data error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .data import FeatureStream
from .errors import ConfigError, DataError
from .harness import ExperimentConfig, emit_csv, prepare, run_experiment
from .ogfs import OgfsConfig, ogfs_run

MODES = {"abs": "absolute", "absolute": "absolute", "signed": "signed"}
CONTEXTS = {"group": "group-local", "group-local": "group-local", "global": "global"}


def parse_seeds(text: str) -> list[int]:
    """``0..19`` (inclusive range) or ``1,2,5``."""
    if ".." in text:
        a, b = text.split("..", 1)
        return list(range(int(a), int(b) + 1))
    return [int(s) for s in text.split(",") if s.strip()]


def _ogfs_params(args) -> dict:
    out = {"epsilon": args.epsilon, "lam": args.lam, "mode": MODES[args.mode],
           "context": CONTEXTS[args.context]}
    if args.stop_k is not None:
        out["stop_k"] = args.stop_k
    return out


def _add_data(p):
    p.add_argument("--data", help="CSV or libsvm file")
    p.add_argument("--format", choices=["csv", "libsvm"], default="csv")
    p.add_argument("--label-col", default="last", help="last, first, a header name or an index")


def _add_groups(p):
    p.add_argument("--groups", default="half",
                   help="natural|half|tenth|hundredth|two-hundredth|explicit-size|file:PLAN.json")
    p.add_argument("--group-size", type=int, help="group size for explicit-size")
    p.add_argument("--seed", type=int, default=0, help="group-plan seed")


def _add_ogfs(p):
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--lambda", dest="lam", type=float, default=0.3)
    p.add_argument("--mode", choices=sorted(MODES), default="abs")
    p.add_argument("--context", choices=sorted(CONTEXTS), default="group")
    p.add_argument("--stop-k", type=int)


def _add_eval(p):
    p.add_argument("--algorithms", default="ogfs,alpha,grafting")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--knn", type=int, default=3)
    p.add_argument("--cv-seed", type=int, default=0)
    p.add_argument("--order-trials", type=int, default=0)
    p.add_argument("--curves", action="store_true", help="accuracy/compactness after every group")
    p.add_argument("--per-fold-normalization", action="store_true")


def _label_col(text):
    try:
        return int(text)
    except ValueError:
        return text


def _experiment(args, **extra) -> ExperimentConfig:
    return ExperimentConfig(
        data=getattr(args, "data", None),
        format=getattr(args, "format", "csv"),
        label_col=_label_col(getattr(args, "label_col", "last")),
        algorithms=[a.strip() for a in args.algorithms.split(",") if a.strip()],
        groups=args.groups,
        group_size=args.group_size,
        group_seed=args.seed,
        folds=args.folds,
        knn=args.knn,
        cv_seed=args.cv_seed,
        normalize_per_fold=args.per_fold_normalization,
        ogfs=_ogfs_params(args),
        order_trials=args.order_trials,
        curves=args.curves,
        **extra,
    )


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))


def cmd_select(args):
    if not args.data:
        raise ConfigError("--data is required")
    cfg = ExperimentConfig(data=args.data, format=args.format, label_col=_label_col(args.label_col),
                           groups=args.groups, group_size=args.group_size, group_seed=args.seed)
    ds, plan, _, _ = prepare(cfg)
    result = ogfs_run(FeatureStream(ds, plan), ds, OgfsConfig(**_ogfs_params(args)))
    _write(result.to_json(indent=2), args.out)


def cmd_compare(args):
    if not args.data:
        raise ConfigError("--data is required")
    report = run_experiment(_experiment(args))
    _write(report.to_json(), args.out)


def cmd_simulate(args):
    reports = []
    for s in parse_seeds(args.seeds):
        synthetic = {"n": args.n, "d": args.d, "groups": args.n_groups, "informative": args.informative,
                     "noise": args.noise, "margin": args.margin, "lead_weight": args.lead_weight,
                     "seed": s}
        cfg = _experiment(args, synthetic=synthetic)
        cfg.cv_seed = s if args.cv_seed < 0 else args.cv_seed
        reports.append(run_experiment(cfg).to_dict())
    summary = {}
    for rep in reports:
        for row in rep["rows"]:
            if "error" in row:
                continue
            agg = summary.setdefault(row["algorithm"], {"accuracy": [], "compactness": [],
                                                        "informative_recovered": [], "noise_selected": []})
            agg["accuracy"].append(row["accuracy_mean"])
            agg["compactness"].append(row["compactness"])
            agg["informative_recovered"].append(row.get("informative_recovered"))
            agg["noise_selected"].append(row.get("noise_selected"))
    medians = {alg: {k: float(np.median(v)) for k, v in agg.items()} for alg, agg in summary.items()}
    _write(json.dumps({"reports": reports, "median": medians}, indent=2, sort_keys=True), args.out)


def cmd_report(args):
    obj = json.loads(Path(args.input).read_text())
    if args.emit_csv:
        _write(emit_csv(obj), args.out)
        return
    reports = obj["reports"] if "reports" in obj else [obj]
    lines = []
    for rep in reports:
        for row in rep["rows"]:
            if "error" in row:
                lines.append(f"{row['algorithm']:<10} ERROR {row['error']}")
            else:
                lines.append(f"{row['algorithm']:<10} dim={row['compactness']:<5} "
                             f"acc={100 * row['accuracy_mean']:.2f}+-{100 * row['accuracy_std']:.2f} "
                             f"time={row['seconds']:.3f}s")
    _write("\n".join(lines), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="streamsel", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="run OGFS on a dataset and write the selection JSON")
    _add_data(p)
    _add_groups(p)
    _add_ogfs(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("compare", help="run several selectors on one stream and cross-validate")
    _add_data(p)
    _add_groups(p)
    _add_ogfs(p)
    _add_eval(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="planted-feature benchmark over several seeds")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--d", type=int, default=500)
    p.add_argument("--groups", dest="n_groups", type=int, default=10)
    p.add_argument("--informative", type=int, default=10)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--margin", type=float, default=1.0)
    p.add_argument("--lead-weight", type=float, default=3.0)
    p.add_argument("--seeds", default="0")
    _add_ogfs(p)
    _add_eval(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate, groups="natural", group_size=None, seed=0)
    p.set_defaults(cv_seed=-1)

    p = sub.add_parser("report", help="summarize a report JSON or emit plot-ready CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--emit-csv", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
