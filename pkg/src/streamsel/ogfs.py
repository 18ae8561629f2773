"""Online group feature selection: intra-group screening followed by an L1 refit of
the running subset whenever a group contributes survivors."""
from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from sklearn.model_selection import train_test_split

from .classify import fold_accuracy
from .data import Dataset, FeatureStream
from .errors import ConfigError
from .intra import CONTEXTS, MODES, init_state, intra_group_select
from .lasso import RegressionProblem, lasso_solve

STOP_REASONS = ("exhausted", "k-reached", "accuracy-reached")


@dataclass
class OgfsConfig:
    epsilon: float = 0.001
    lam: float = 0.3
    mode: str = "absolute"
    context: str = "group-local"
    stop_k: int | None = None
    stop_accuracy: float | None = None
    validation_fraction: float = 0.3
    validation_seed: int = 0
    knn_k: int = 3
    zero_tol: float = 1e-8
    tol: float = 1e-6

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if self.lam < 0:
            raise ConfigError("lambda must be >= 0")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.context not in CONTEXTS:
            raise ConfigError(f"unknown context {self.context!r}")
        if self.stop_k is not None and self.stop_k < 1:
            raise ConfigError("stop_k must be >= 1")
        if self.stop_accuracy is not None and not 0 < self.stop_accuracy <= 1:
            raise ConfigError("stop_accuracy must be in (0, 1]")
        if not 0 < self.validation_fraction < 1:
            raise ConfigError("validation_fraction must be in (0, 1)")


@dataclass
class SelectionResult:
    selected: list[int]
    stop_reason: str
    trace: list[dict] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    algorithm: str = "ogfs"
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "selected": list(self.selected),
            "stop_reason": self.stop_reason,
            "trace": self.trace,
            "timings_ms": {k: v * 1000.0 for k, v in self.timings.items()},
        }
        if self.extras:
            out["extras"] = self.extras
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, obj: dict) -> "SelectionResult":
        return cls(
            selected=list(obj["selected"]),
            stop_reason=obj["stop_reason"],
            trace=list(obj.get("trace", [])),
            timings={k: v / 1000.0 for k, v in obj.get("timings_ms", {}).items()},
            algorithm=obj.get("algorithm", "ogfs"),
            extras=obj.get("extras", {}),
        )


def regression_targets(labels) -> np.ndarray:
    """+/-1 targets, shape (n, 1) for two classes, one-vs-rest columns (n, c) otherwise."""
    y = np.asarray(labels)
    classes = np.unique(y)
    if len(classes) == 2:
        return np.where(y == classes[0], 1.0, -1.0)[:, None]
    return np.where(y[:, None] == classes[None, :], 1.0, -1.0)


def _refit(candidates, ds, lam, tol, zero_tol) -> tuple[list[int], np.ndarray]:
    A = ds.matrix(candidates)
    weight = np.zeros(len(candidates))
    for t in regression_targets(ds.labels).T:
        sol = lasso_solve(RegressionProblem(A, t, lam), tol, warn=False)
        if not sol.certified:
            warnings.warn(
                f"inter-group lasso not certified (KKT residual {sol.kkt_violation:.3g})",
                RuntimeWarning,
                stacklevel=3,
            )
        weight = np.maximum(weight, np.abs(sol.beta))
    keep = np.flatnonzero(weight > zero_tol)
    return [candidates[j] for j in keep], weight[keep]


def inter_group_select(
    U: Sequence[int], g_new: Sequence[int], ds: Dataset, lam: float = 0.3,
    tol: float = 1e-6, zero_tol: float = 1e-8,
) -> list[int]:
    """L1 regression of the class targets on ``U + g_new``; returns the support.

    Members of ``U`` can be dropped. Multiclass labels are regressed one class
    at a time and the supports are merged.
    """
    candidates = [int(i) for i in U] + [int(i) for i in g_new]
    if not candidates:
        raise ValueError("nothing to select from")
    if len(set(candidates)) != len(candidates):
        raise ValueError("duplicate feature index among candidates")
    return _refit(candidates, ds, lam, tol, zero_tol)[0]


@dataclass(frozen=True)
class ValidationSplit:
    train: np.ndarray
    test: np.ndarray


def make_validation_split(ds: Dataset, fraction: float = 0.3, seed: int = 0) -> ValidationSplit:
    idx = np.arange(ds.n)
    tr, te = train_test_split(idx, test_size=fraction, random_state=seed, stratify=ds.labels)
    return ValidationSplit(np.sort(tr), np.sort(te))


def validation_accuracy(U, ds: Dataset, split: ValidationSplit, k: int = 3) -> float:
    X = ds.matrix(U)
    y = ds.labels
    return fold_accuracy(X[split.train], y[split.train], X[split.test], y[split.test], k)


def check_stop(
    U: Sequence[int], config: OgfsConfig, ds: Dataset, exhausted: bool = False,
    validation: ValidationSplit | None = None,
) -> tuple[bool, str | None]:
    if config.stop_k is not None and len(U) >= config.stop_k:
        return True, "k-reached"
    if config.stop_accuracy is not None:
        if validation is None:
            raise ConfigError("accuracy stop requested without a validation split")
        if U and validation_accuracy(U, ds, validation, config.knn_k) >= config.stop_accuracy:
            return True, "accuracy-reached"
    if exhausted:
        return True, "exhausted"
    return False, None


def ogfs_run(stream: FeatureStream, ds: Dataset, config: OgfsConfig | None = None) -> SelectionResult:
    config = config or OgfsConfig()
    validation = None
    if config.stop_accuracy is not None:
        validation = make_validation_split(ds, config.validation_fraction, config.validation_seed)
    state = init_state(ds.labels, config.epsilon, config.mode, config.context)
    U: list[int] = []
    trace = []
    t_intra = t_inter = 0.0
    reason = "exhausted"
    start = time.perf_counter()
    for gid, group in stream:
        t0 = time.perf_counter()
        _, accepted = intra_group_select(state, group)
        t1 = time.perf_counter()
        t_intra += t1 - t0
        if accepted:
            U, weight = _refit(U + accepted, ds, config.lam, config.tol, config.zero_tol)
            if config.stop_k is not None and len(U) > config.stop_k:
                top = np.sort(np.argsort(-weight, kind="stable")[: config.stop_k])
                U = [U[j] for j in top]
            if config.context == "global":
                state.reset(U, ds.features)
            t_inter += time.perf_counter() - t1
        trace.append(
            {"group": gid, "arrived": [i for i, _ in group], "intra": accepted, "retained": list(U)}
        )
        stop, why = check_stop(U, config, ds, stream.exhausted, validation)
        if stop:
            reason = why
            break
    total = time.perf_counter() - start
    return SelectionResult(
        U, reason, trace, {"intra": t_intra, "inter": t_inter, "total": total}, "ogfs"
    )
