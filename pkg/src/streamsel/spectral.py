"""Supervised graph affinities, Laplacians and the scatter-ratio scores built on them.

The dense matrix path (``build_affinities`` -> ``laplacian`` ->
``quadratic_form``) is O(n^2) per feature and exists mainly as a reference.
Selection uses ``scatter_pair``/``scatter_columns``, which compute the same
quadratic forms from class means in O(n).

With ``L = D - S`` the quadratic form equals ``1/2 * sum_ij (f_i - f_j)^2 S_ij``.
For the supervised affinities below, ``f' L_w f`` is the within-class scatter
and ``f' L_b f`` the between-class scatter.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DataError

DELTA = 1e-9


@dataclass(frozen=True, eq=False)
class AffinityPair:
    s_b: np.ndarray
    s_w: np.ndarray
    class_sizes: dict[int, int]


@dataclass(frozen=True, eq=False)
class LaplacianPair:
    l_b: np.ndarray
    l_w: np.ndarray
    d_b: np.ndarray
    d_w: np.ndarray


@dataclass(frozen=True)
class ScatterPair:
    b: float
    w: float


def _check_labels(labels) -> np.ndarray:
    y = np.asarray(labels)
    if y.ndim != 1 or len(y) < 2:
        raise DataError("labels must be a vector with at least 2 entries")
    if len(np.unique(y)) < 2:
        raise DataError("single-class labels")
    return y


def build_affinities(labels, exact: bool = False) -> AffinityPair:
    """Within-class (``1/n_l`` on same-class pairs) and between-class affinities.

    ``exact=True`` returns object arrays of ``Fraction`` so identities can be
    checked without rounding.
    """
    y = _check_labels(labels)
    n = len(y)
    classes, counts = np.unique(y, return_counts=True)
    sizes = {int(k): int(v) for k, v in zip(classes, counts)}
    same = y[:, None] == y[None, :]
    if exact:
        inv_n = Fraction(1, n)
        inv = {k: Fraction(1, v) for k, v in sizes.items()}
        row = np.empty(n, dtype=object)
        row[:] = [inv[int(v)] for v in y]
        s_w = np.where(same, row[:, None], Fraction(0))
        s_b = np.where(same, inv_n - row[:, None], inv_n)
        return AffinityPair(s_b, s_w, sizes)
    inv_size = np.array([1.0 / sizes[int(v)] for v in y])
    s_w = np.where(same, inv_size[:, None], 0.0)
    s_b = np.where(same, 1.0 / n - inv_size[:, None], 1.0 / n)
    return AffinityPair(s_b, s_w, sizes)


def degree_matrix(S) -> np.ndarray:
    """Diagonal of the degree matrix, i.e. the row sums of ``S``."""
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"affinity matrix must be square, got shape {S.shape}")
    return S.sum(axis=1)


def laplacian(S, sym_tol: float = 1e-10) -> np.ndarray:
    S = np.asarray(S)
    deg = degree_matrix(S)
    if S.dtype != object and np.max(np.abs(S - S.T), initial=0.0) > sym_tol:
        raise ValueError("affinity matrix is not symmetric")
    L = -S.copy()
    L[np.diag_indices_from(L)] += deg
    return L


def laplacians(aff: AffinityPair) -> LaplacianPair:
    return LaplacianPair(
        laplacian(aff.s_b), laplacian(aff.s_w), degree_matrix(aff.s_b), degree_matrix(aff.s_w)
    )


def quadratic_form(f, L) -> float:
    f = np.asarray(f, dtype=float)
    L = np.asarray(L, dtype=float)
    if L.shape != (len(f), len(f)):
        raise ValueError(f"feature length {len(f)} does not match Laplacian shape {L.shape}")
    return float(f @ L @ f)


class ClassIndex:
    """Precomputed class structure for O(n) scatter evaluation."""

    def __init__(self, labels):
        y = _check_labels(labels)
        self.classes, self.codes, self.counts = np.unique(y, return_inverse=True, return_counts=True)
        self.n = len(y)
        self.onehot = np.zeros((self.n, len(self.counts)))
        self.onehot[np.arange(self.n), self.codes] = 1.0

    def scatter(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Between/within scatter for each row of ``X`` (shape ``(m, n)``)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n:
            raise ValueError(f"feature length {X.shape[1]} does not match {self.n} labels")
        mu = X.mean(axis=1, keepdims=True)
        means = (X @ self.onehot) / self.counts
        b = ((means - mu) ** 2 * self.counts).sum(axis=1)
        w = ((X - means[:, self.codes]) ** 2).sum(axis=1)
        return b, w


def scatter_pair(f, labels) -> ScatterPair:
    index = labels if isinstance(labels, ClassIndex) else ClassIndex(labels)
    b, w = index.scatter(np.asarray(f, dtype=float)[None, :])
    return ScatterPair(float(b[0]), float(w[0]))


def scatter_columns(X, labels) -> tuple[np.ndarray, np.ndarray]:
    index = labels if isinstance(labels, ClassIndex) else ClassIndex(labels)
    return index.scatter(X)


def feature_score(f, labels, delta: float = DELTA) -> float:
    s = scatter_pair(f, labels)
    return s.b / (s.w + delta)


def subset_score(sum_b: float, sum_w: float, delta: float = DELTA) -> float:
    """Trace ratio of a feature subset from its accumulated scatters; 0 for the empty set."""
    if sum_b < -1e-9 or sum_w < -1e-9:
        raise ValueError(f"negative scatter accumulator ({sum_b}, {sum_w})")
    if sum_b == 0 and sum_w == 0:
        return 0.0
    return sum_b / (sum_w + delta)
