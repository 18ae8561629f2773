"""Experiment orchestration: build one stream, run each selector on it, score
every selected subset with k-NN cross-validation and write a JSON report."""
from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .baselines import alpha_investing_run, grafting_run
from .classify import cross_validate, thread_cap
from .data import Dataset, FeatureStream, GroupPlan, load_dataset, make_group_plan, normalize_features
from .errors import ConfigError
from .ogfs import OgfsConfig, SelectionResult, ogfs_run
from .synthetic import make_planted

log = logging.getLogger(__name__)

ALGORITHMS = ("ogfs", "alpha", "grafting", "full")


@dataclass
class ExperimentConfig:
    data: str | None = None
    format: str = "csv"
    label_col: str | int = "last"
    synthetic: dict | None = None
    algorithms: list[str] = field(default_factory=lambda: ["ogfs", "alpha", "grafting"])
    groups: str = "half"
    group_size: int | None = None
    group_seed: int = 0
    folds: int = 10
    knn: int = 3
    cv_seed: int = 0
    normalize_per_fold: bool = False
    ogfs: dict = field(default_factory=dict)
    alpha: dict = field(default_factory=dict)
    grafting: dict = field(default_factory=dict)
    order_trials: int = 0
    order_seed: int = 0
    curves: bool = False
    out: str | None = None

    def __post_init__(self):
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.knn < 1 or self.knn % 2 == 0:
            raise ConfigError("knn must be odd and >= 1")
        if (self.data is None) == (self.synthetic is None):
            raise ConfigError("give exactly one of data or synthetic")
        if self.synthetic is not None:
            s = self.synthetic
            if s.get("informative", 10) > s.get("d", 500):
                raise ConfigError("synthetic informative count exceeds d")
        if self.order_trials < 0:
            raise ConfigError("order_trials must be >= 0")


@dataclass
class ExperimentReport:
    config: dict
    dataset: dict
    rows: list[dict]
    order_trials: dict | None = None

    def to_dict(self) -> dict:
        out = {"config": self.config, "dataset": self.dataset, "rows": self.rows}
        if self.order_trials is not None:
            out["order_trials"] = self.order_trials
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def row(self, algorithm: str) -> dict:
        for r in self.rows:
            if r["algorithm"] == algorithm:
                return r
        raise KeyError(algorithm)


def prepare(config: ExperimentConfig) -> tuple[Dataset, GroupPlan, list[int], dict]:
    """Load or generate, normalize, and build the group plan."""
    info: dict = {}
    natural = None
    if config.synthetic is not None:
        planted = make_planted(**config.synthetic)
        raw = planted.dataset
        natural = planted.plan.groups
        info["informative"] = list(planted.informative)
        info["strongest"] = planted.strongest
    else:
        raw = load_dataset(config.data, config.format, config.label_col)
    ds, constant = normalize_features(raw)
    g = config.groups
    if g.startswith("file:"):
        plan = GroupPlan.from_json(Path(g[5:]).read_text())
    elif g == "natural":
        if natural is None:
            raise ConfigError("natural grouping needs a plan file (file:PLAN.json) for real data")
        plan = make_group_plan(ds.d, "natural", config.group_seed, groups=natural)
    else:
        plan = make_group_plan(ds.d, g, config.group_seed, size=config.group_size)
    info.update(n=ds.n, d=ds.d, c=ds.c, constant_features=constant, groups=len(plan))
    return ds, plan, constant, info


def _grafting(stream: FeatureStream, ds: Dataset, params: dict) -> SelectionResult:
    if ds.c == 2:
        return grafting_run(stream, ds, **params)
    # one-vs-rest, union of the per-class selections
    selected: list[int] = []
    seconds = 0.0
    for cls in range(1, ds.c + 1):
        binary = Dataset(ds.features, np.where(ds.labels == cls, 1, 2))
        r = grafting_run(FeatureStream(binary, stream.plan), binary, **params)
        selected += [i for i in r.selected if i not in selected]
        seconds += r.timings["total"]
    return SelectionResult(selected, "exhausted", [], {"total": seconds}, "grafting")


def run_algorithm(name: str, ds: Dataset, plan: GroupPlan, config: ExperimentConfig) -> SelectionResult:
    stream = FeatureStream(ds, plan)
    if name == "ogfs":
        return ogfs_run(stream, ds, OgfsConfig(**config.ogfs))
    if name == "alpha":
        return alpha_investing_run(stream, ds, **config.alpha)
    if name == "grafting":
        return _grafting(stream, ds, config.grafting)
    if name == "full":
        return SelectionResult(plan.indices, "exhausted", [], {"total": 0.0}, "full")
    raise ConfigError(f"unknown algorithm {name!r}")


def _curve(result: SelectionResult, ds: Dataset, config: ExperimentConfig) -> list[dict]:
    out = []
    for j, t in enumerate(result.trace, 1):
        acc, _ = cross_validate(ds, t["retained"], config.folds, config.knn, config.cv_seed,
                                config.normalize_per_fold)
        out.append({"groups": j, "compactness": len(t["retained"]), "accuracy": acc})
    return out


def evaluate_row(name: str, ds: Dataset, plan: GroupPlan, config: ExperimentConfig) -> dict:
    try:
        result = run_algorithm(name, ds, plan, config)
        mean, std = cross_validate(ds, result.selected, config.folds, config.knn, config.cv_seed,
                                   config.normalize_per_fold)
    except Exception as exc:  # one failing algorithm must not sink the report
        log.warning("algorithm %s failed: %s", name, exc)
        return {"algorithm": name, "error": f"{type(exc).__name__}: {exc}"}
    row = {
        "algorithm": name,
        "compactness": len(result.selected),
        "accuracy_mean": mean,
        "accuracy_std": std,
        "seconds": result.timings.get("total", 0.0),
        "selected": list(result.selected),
        "stop_reason": result.stop_reason,
    }
    if config.curves and result.trace:
        row["curve"] = _curve(result, ds, config)
    return row


def order_trials(ds: Dataset, plan: GroupPlan, config: ExperimentConfig) -> dict:
    """Rerun OGFS over random permutations of the group order."""
    rng = np.random.default_rng(config.order_seed)
    accs, sizes = [], []
    for _ in range(config.order_trials):
        order = rng.permutation(len(plan))
        r = ogfs_run(FeatureStream(ds, plan.reordered(order)), ds, OgfsConfig(**config.ogfs))
        acc, _ = cross_validate(ds, r.selected, config.folds, config.knn, config.cv_seed,
                                config.normalize_per_fold)
        accs.append(acc)
        sizes.append(len(r.selected))
    return {
        "accuracies": accs,
        "compactness": sizes,
        "mean": float(np.mean(accs)) if accs else None,
        "std": float(np.std(accs, ddof=1)) if len(accs) > 1 else 0.0,
    }


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    ds, plan, _, info = prepare(config)
    names = list(config.algorithms)
    workers = min(thread_cap(), max(1, len(names)))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda a: evaluate_row(a, ds, plan, config), names))
    else:
        rows = [evaluate_row(a, ds, plan, config) for a in names]
    informative = info.get("informative")
    if informative is not None:
        inf = set(informative)
        for r in rows:
            if "selected" in r:
                sel = set(r["selected"])
                r["informative_recovered"] = len(sel & inf)
                r["noise_selected"] = len(sel - inf)
    trials = order_trials(ds, plan, config) if config.order_trials else None
    report = ExperimentReport(asdict(config), info, rows, trials)
    if config.out:
        Path(config.out).write_text(report.to_json())
    return report


def emit_csv(report: dict) -> str:
    """Plot-ready rows of (algorithm, groups, compactness, accuracy)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "groups", "compactness", "accuracy"])
    reports = report["reports"] if "reports" in report else [report]
    for rep in reports:
        total = rep.get("dataset", {}).get("groups")
        for row in rep["rows"]:
            if "error" in row:
                continue
            if row.get("curve"):
                for pt in row["curve"]:
                    w.writerow([row["algorithm"], pt["groups"], pt["compactness"], pt["accuracy"]])
            else:
                w.writerow([row["algorithm"], total, row["compactness"], row["accuracy_mean"]])
    return buf.getvalue()
