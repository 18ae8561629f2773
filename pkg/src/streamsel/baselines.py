"""Single-feature streaming baselines: Alpha-investing and Grafting.

Both consume the same stream as OGFS but ignore group boundaries.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import stats
from scipy.special import expit

from .data import FeatureStream
from .errors import ConfigError
from .ogfs import SelectionResult


def pm_targets(labels) -> np.ndarray:
    y = np.asarray(labels)
    classes = np.unique(y)
    if len(classes) != 2:
        raise ConfigError(f"expected two classes, got {len(classes)}")
    return np.where(y == classes[0], 1.0, -1.0)


def _groups(stream) -> Iterable[tuple[int, list]]:
    if isinstance(stream, FeatureStream):
        yield from stream
    else:
        # a flat iterable of (idx, f): treat each feature as its own group
        for t, item in enumerate(stream):
            yield t, [item]


# -- Alpha-investing ---------------------------------------------------------


def p_value(f, U_features, y) -> float:
    """Two-sided t-test p-value of ``f``'s coefficient in OLS of ``y`` on [U, f, 1].

    Rank-deficient designs return 1.
    """
    f = np.asarray(f, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    U = np.asarray(U_features, dtype=float).reshape(n, -1) if U_features is not None else np.empty((n, 0))
    k = U.shape[1]
    dof = n - k - 2
    if dof < 1:
        raise ValueError(f"need n > |U| + 2 (n={n}, |U|={k})")
    A = np.column_stack([U, f, np.ones(n)])
    if np.linalg.matrix_rank(A) < A.shape[1]:
        return 1.0
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    rss = float(resid @ resid)
    cov = np.linalg.inv(A.T @ A)
    se2 = rss / dof * cov[k, k]
    if se2 <= 0:
        return 0.0 if coef[k] != 0 else 1.0
    t = coef[k] / np.sqrt(se2)
    return float(2 * stats.t.sf(abs(t), dof))


@dataclass
class WealthState:
    wealth: float = 0.5
    alpha_delta: float = 0.5
    step: int = 1
    selected: list[int] = field(default_factory=list)

    @property
    def alpha(self) -> float:
        return self.wealth / (2 * self.step)

    def update(self, idx: int, p: float) -> tuple[bool, float]:
        """Test one feature, then pay for it; returns (accepted, threshold used)."""
        a = self.alpha
        ok = p < a
        if ok:
            self.selected.append(int(idx))
            self.wealth = self.wealth + self.alpha_delta - a
        else:
            self.wealth = self.wealth - a
        self.step += 1
        return ok, a


def alpha_investing_run(stream, ds, w0: float = 0.5, alpha_delta: float = 0.5) -> SelectionResult:
    """Streamwise regression with an adaptive p-value threshold, no re-testing.

    Multiclass labels use the smallest one-vs-rest p-value times the class
    count (Bonferroni, capped at 1).
    """
    if not w0 > 0:
        raise ConfigError("w0 must be positive")
    classes = np.unique(ds.labels)
    targets = [np.where(ds.labels == c, 1.0, -1.0) for c in classes]
    if len(classes) == 2:
        targets = targets[:1]
    state = WealthState(w0, alpha_delta)
    cols: list[np.ndarray] = []
    log, trace = [], []
    start = time.perf_counter()
    for gid, group in _groups(stream):
        accepted = []
        for idx, f in group:
            U = np.column_stack(cols) if cols else None
            if ds.n - len(cols) - 2 < 1:
                p = 1.0
            else:
                p = min(1.0, len(targets) * min(p_value(f, U, t) for t in targets))
            before = state.wealth
            ok, a = state.update(idx, p)
            log.append({"feature": int(idx), "p": p, "alpha": a, "accepted": ok, "wealth": before})
            if ok:
                cols.append(np.asarray(f, dtype=float))
                accepted.append(int(idx))
        trace.append(
            {"group": gid, "arrived": [int(i) for i, _ in group], "intra": accepted,
             "retained": list(state.selected)}
        )
    total = time.perf_counter() - start
    return SelectionResult(
        list(state.selected), "exhausted", trace, {"total": total}, "alpha",
        {"log": log, "final_wealth": state.wealth},
    )


def replay_wealth(decisions, w0: float = 0.5, alpha_delta: float = 0.5) -> list[float]:
    """Wealth trajectory implied by a sequence of accept/reject decisions."""
    w = [w0]
    for i, ok in enumerate(decisions, 1):
        a = w[-1] / (2 * i)
        w.append(w[-1] + alpha_delta - a if ok else w[-1] - a)
    return w


# -- Grafting ----------------------------------------------------------------


@dataclass
class GraftingModel:
    lam: float = 0.3
    tol: float = 1e-5
    max_iter: int = 500
    selected: list[int] = field(default_factory=list)
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bias: float = 0.0

    def margins(self, X, y) -> np.ndarray:
        return y * (X @ self.weights + self.bias)


def bnll(X, y, w, b) -> float:
    return float(np.mean(np.logaddexp(0.0, -y * (X @ w + b))))


def penalized_objective(X, y, w, b, lam) -> float:
    return bnll(X, y, w, b) + lam * float(np.abs(w).sum())


def bnll_gradient(model: GraftingModel, x, X_selected, y) -> float:
    """d(mean BNLL)/dw_j for a column ``x`` under the current model."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    X_selected = np.asarray(X_selected, dtype=float).reshape(len(y), -1)
    if len(x) != len(y) or X_selected.shape[1] != len(model.weights):
        raise ValueError("dimension mismatch between model, column and targets")
    s = expit(-model.margins(X_selected, y))
    return float(-np.mean(y * x * s))


def _full_gradient(X, y, w, b):
    s = -y * expit(-y * (X @ w + b)) / len(y)
    return X.T @ s, float(s.sum())


def _optimality(gw, gb, w, lam) -> float:
    res = np.where(w != 0, np.abs(gw + lam * np.sign(w)), np.maximum(np.abs(gw) - lam, 0.0))
    return float(max(res.max(initial=0.0), abs(gb)))


def optimize(X, y, w, b, lam, tol=1e-5, max_iter=500):
    """Monotone FISTA on mean BNLL + lam * ||w||_1 (bias unpenalized).

    Returns ``(w, b, converged, objective_history)``.
    """
    n = len(y)
    Z = np.column_stack([X, np.ones(n)])
    L = max(np.linalg.norm(Z, 2) ** 2 / (4 * n), 1e-12)
    step = 1.0 / L
    obj = penalized_objective(X, y, w, b, lam)
    history = [obj]
    vw, vb, t = w.copy(), b, 1.0
    for _ in range(max_iter):
        gw, gb = _full_gradient(X, y, vw, vb)
        zw = vw - step * gw
        zw = np.sign(zw) * np.maximum(np.abs(zw) - step * lam, 0.0)
        zb = vb - step * gb
        zobj = penalized_objective(X, y, zw, zb, lam)
        t_next = (1 + np.sqrt(1 + 4 * t * t)) / 2
        if zobj <= obj:
            vw = zw + ((t - 1) / t_next) * (zw - w)
            vb = zb + ((t - 1) / t_next) * (zb - b)
            w, b, obj = zw, zb, zobj
        else:
            vw = w + (t / t_next) * (zw - w)
            vb = b + (t / t_next) * (zb - b)
        t = t_next
        history.append(obj)
        gw, gb = _full_gradient(X, y, w, b)
        if _optimality(gw, gb, w, lam) <= tol:
            return w, b, True, history
    return w, b, False, history


def _standardize(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    c = f - f.mean()
    sd = c.std()
    return c / sd if sd > 0 else np.zeros_like(c)


def grafting_run(
    stream, ds, lam: float = 0.3, tol: float = 1e-5, max_iter: int = 500, zero_tol: float = 1e-8,
) -> SelectionResult:
    """Gradient-test admission with full re-optimization after every admission.

    Columns are standardized to zero mean and unit variance before entering
    the model. After re-optimization, features whose weight returned to zero
    are dropped (equivalently: they fail the gradient test at zero weight).
    """
    y = pm_targets(ds.labels)
    model = GraftingModel(lam, tol, max_iter)
    cols: list[np.ndarray] = []
    trace = []
    unconverged = 0
    start = time.perf_counter()
    for gid, group in _groups(stream):
        accepted = []
        for idx, f in group:
            x = _standardize(f)
            X = np.column_stack(cols) if cols else np.empty((len(y), 0))
            g = bnll_gradient(model, x, X, y)
            if abs(g) <= lam:
                continue
            accepted.append(int(idx))
            X = np.column_stack([X, x])
            w, b, ok, _ = optimize(X, y, np.append(model.weights, 0.0), model.bias, lam, tol, max_iter)
            unconverged += not ok
            keep = np.abs(w) > zero_tol
            cols = [c for c, k in zip(cols + [x], keep) if k]
            model.selected = [i for i, k in zip(model.selected + [int(idx)], keep) if k]
            model.weights = w[keep]
            model.bias = b
        trace.append(
            {"group": gid, "arrived": [int(i) for i, _ in group], "intra": accepted,
             "retained": list(model.selected)}
        )
    total = time.perf_counter() - start
    return SelectionResult(
        list(model.selected), "exhausted", trace, {"total": total}, "grafting",
        {"unconverged_fits": unconverged, "bias": model.bias,
         "weights": [float(v) for v in model.weights]},
    )
