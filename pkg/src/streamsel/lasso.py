"""L1-regularized least squares, ``min 1/2 ||y - A b||^2 + lam ||b||_1``.

Solved by cyclic coordinate descent on the Gram matrix. A solution is
certified when the KKT residual, recomputed from scratch, is at most ``tol``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    design: np.ndarray  # (n, m)
    targets: np.ndarray  # (n,)
    lam: float = 0.3

    def __post_init__(self):
        A = np.asarray(self.design, dtype=float)
        y = np.asarray(self.targets, dtype=float)
        if A.ndim == 1:
            A = A[:, None]
        if A.ndim != 2 or y.ndim != 1 or A.shape[0] != len(y):
            raise ValueError(f"design {A.shape} does not match targets {y.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y)) and np.isfinite(self.lam)):
            raise ValueError("NaN or Inf in regression problem")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        object.__setattr__(self, "design", A)
        object.__setattr__(self, "targets", y)


@dataclass(eq=False)
class SparseSolution:
    beta: np.ndarray
    objective: float
    kkt_violation: float
    iterations: int
    certified: bool
    history: list[float] = field(default_factory=list)


class NotCertifiedWarning(RuntimeWarning):
    pass


def objective(A, y, beta, lam) -> float:
    r = y - A @ beta
    return 0.5 * float(r @ r) + lam * float(np.abs(beta).sum())


def kkt_violation(A, y, beta, lam) -> float:
    """Largest violation of the subgradient optimality conditions."""
    return _violation(A.T @ (y - A @ beta), beta, lam)


def _violation(g, beta, lam) -> float:
    if len(beta) == 0:
        return 0.0
    res = np.where(beta != 0, np.abs(g - lam * np.sign(beta)), np.maximum(np.abs(g) - lam, 0.0))
    return float(res.max())


def lasso_solve(
    problem: RegressionProblem, tol: float = 1e-6, max_iter: int | None = None,
    warn: bool = True,
) -> SparseSolution:
    if not tol > 0:
        raise ValueError("tol must be positive")
    A, y, lam = problem.design, problem.targets, problem.lam
    n, m = A.shape
    if max_iter is None:
        max_iter = 10 * m * (1 + n)
    beta = np.zeros(m)
    history = [objective(A, y, beta, lam)]
    if m == 0:
        return SparseSolution(beta, history[0], 0.0, 0, True, history)
    G = A.T @ A
    grad = A.T @ y  # A'(y - A beta), kept current
    diag = np.diag(G).copy()
    live = np.flatnonzero(diag > 0)
    # rows of G are read per coordinate; a list of views avoids repeated fancy indexing
    rows = [G[j] for j in range(m)]
    it = 0
    viol = np.inf
    while it < max_iter:
        it += 1
        for j in live:
            bj = beta[j]
            z = bj * diag[j] + grad[j]
            nb = np.sign(z) * max(abs(z) - lam, 0.0) / diag[j]
            if nb != bj:
                grad -= rows[j] * (nb - bj)
                beta[j] = nb
        history.append(objective(A, y, beta, lam))
        # refresh to drop accumulated rounding in the incremental gradient
        grad = A.T @ (y - A @ beta)
        viol = _violation(grad, beta, lam)
        if viol <= tol:
            break
    ok = viol <= tol
    if not ok and warn:
        warnings.warn(
            f"lasso did not reach KKT tolerance {tol} (residual {viol:.3g}) after {it} sweeps",
            NotCertifiedWarning,
            stacklevel=2,
        )
    return SparseSolution(beta, history[-1], viol, it, ok, history)


def solve(A, y, lam: float = 0.3, tol: float = 1e-6, **kw) -> SparseSolution:
    return lasso_solve(RegressionProblem(A, y, lam), tol, **kw)


def support(sol, zero_tol: float = 1e-8) -> list[int]:
    beta = sol.beta if isinstance(sol, SparseSolution) else np.asarray(sol)
    return [int(j) for j in np.flatnonzero(np.abs(beta) > zero_tol)]
