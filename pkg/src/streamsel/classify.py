"""k-NN classification and stratified cross-validation over a feature subset."""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.model_selection import StratifiedKFold

from .data import Dataset


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("STREAMSEL_THREADS", "1")))
    except ValueError:
        return 1


def knn_predict(train_X, train_y, test_X, k: int = 3) -> np.ndarray:
    """Majority vote of the k nearest training points (Euclidean).

    Distance ties go to the smaller training index, vote ties to the smaller class id.
    """
    train_X = np.atleast_2d(np.asarray(train_X, dtype=float))
    test_X = np.atleast_2d(np.asarray(test_X, dtype=float))
    train_y = np.asarray(train_y, dtype=int)
    if train_X.shape[1] == 0:
        raise ValueError("empty feature subset; use the majority-class baseline instead")
    if not 1 <= k <= len(train_y):
        raise ValueError(f"k={k} must be in [1, {len(train_y)}]")
    dist = cdist(test_X, train_X, "sqeuclidean")
    nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
    votes = train_y[nearest]
    width = int(train_y.max()) + 1
    counts = np.apply_along_axis(np.bincount, 1, votes, minlength=width)
    return counts.argmax(axis=1)


def majority_class(y) -> int:
    counts = np.bincount(np.asarray(y, dtype=int))
    return int(counts.argmax())


def fold_accuracy(X_train, y_train, X_test, y_test, k: int, normalize: bool = False) -> float:
    if X_train.shape[1] == 0:
        pred = np.full(len(y_test), majority_class(y_train))
    else:
        if normalize:
            mu = X_train.mean(axis=0)
            sd = X_train.std(axis=0)
            sd[sd == 0] = 1.0
            X_train = (X_train - mu) / sd
            X_test = (X_test - mu) / sd
        pred = knn_predict(X_train, y_train, X_test, min(k, len(y_train)))
    return float(np.mean(pred == y_test))


def stratified_folds(y, folds: int, seed: int | None):
    y = np.asarray(y)
    counts = np.bincount(y)
    smallest = int(counts[counts > 0].min())
    if smallest < folds:
        new = max(2, smallest)
        warnings.warn(f"smallest class has {smallest} members; using {new} folds instead of {folds}")
        folds = new
    skf = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    return list(skf.split(np.zeros(len(y)), y))


def cross_validate(
    ds: Dataset,
    subset: Sequence[int],
    folds: int = 10,
    k: int = 3,
    seed: int | None = 0,
    normalize_per_fold: bool = False,
) -> tuple[float, float]:
    """Mean and standard deviation of k-NN accuracy over seeded stratified folds.

    An empty subset scores the training-fold majority class.
    """
    subset = [int(i) for i in subset]
    if any(i < 0 or i >= ds.d for i in subset):
        raise IndexError(f"subset index out of range for {ds.d} features")
    if folds < 2:
        raise ValueError("need at least 2 folds")
    X = ds.matrix(subset)
    y = ds.labels
    splits = stratified_folds(y, folds, seed)

    def run(split):
        tr, te = split
        return fold_accuracy(X[tr], y[tr], X[te], y[te], k, normalize_per_fold)

    workers = min(thread_cap(), len(splits))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            acc = list(pool.map(run, splits))
    else:
        acc = [run(s) for s in splits]
    return float(np.mean(acc)), float(np.std(acc))
