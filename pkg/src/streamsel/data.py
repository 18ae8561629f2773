"""Datasets, feature normalization, group plans and the simulated feature stream.

Feature and group indices are 0-based everywhere, including serialized group
plans. Features are stored one row per feature (shape ``(d, n)``) because the
selectors consume them one vector at a time.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import ConfigError, DataError

STRATEGIES = ("natural", "half", "tenth", "hundredth", "two-hundredth", "explicit-size")
_DIVISORS = {"half": 2, "tenth": 10, "hundredth": 100, "two-hundredth": 200}


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray  # (d, n)
    labels: np.ndarray  # (n,), dense class ids 1..c
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        X = np.array(self.features, dtype=float, ndmin=2)
        if X.size == 0 and X.shape[0] == 0:
            X = X.reshape(0, len(self.labels))
        y = np.asarray(self.labels)
        if y.ndim != 1:
            raise DataError("labels must be a vector")
        if len(y) < 2:
            raise DataError(f"need at least 2 samples, got {len(y)}")
        if X.shape[1] != len(y):
            raise DataError(
                f"feature vectors have length {X.shape[1]} but there are {len(y)} labels"
            )
        if not np.all(np.isfinite(X)):
            raise DataError("features contain NaN or Inf")
        y = y.astype(int)
        c = int(y.max()) if len(y) else 0
        if y.min() < 1 or set(np.unique(y)) != set(range(1, c + 1)):
            raise DataError("class ids must be dense in 1..c")
        if c < 2:
            raise DataError("single-class dataset")
        if self.feature_names is not None and len(self.feature_names) != X.shape[0]:
            raise DataError("feature_names length does not match feature count")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @classmethod
    def from_matrix(cls, X, labels, feature_names=None) -> "Dataset":
        """Build from a samples-by-features matrix and raw labels (remapped to 1..c)."""
        X = np.asarray(X, dtype=float)
        return cls(X.T.copy(), remap_labels(labels), feature_names)

    @property
    def n(self) -> int:
        return self.features.shape[1]

    @property
    def d(self) -> int:
        return self.features.shape[0]

    @property
    def c(self) -> int:
        return int(self.labels.max())

    def matrix(self, subset: Sequence[int] | None = None) -> np.ndarray:
        """Samples-by-features view restricted to ``subset``."""
        if subset is None:
            return self.features.T
        return self.features[np.asarray(subset, dtype=int)].T

    def with_features(self, features: np.ndarray) -> "Dataset":
        return Dataset(features, self.labels, self.feature_names)


def remap_labels(raw) -> np.ndarray:
    """Map arbitrary hashable labels to 1..c in order of first appearance."""
    ids: dict = {}
    out = np.empty(len(raw), dtype=int)
    for i, v in enumerate(raw):
        if isinstance(v, np.generic):
            v = v.item()
        if v not in ids:
            ids[v] = len(ids) + 1
        out[i] = ids[v]
    return out


def _parse_label(tok: str):
    tok = tok.strip()
    try:
        v = float(tok)
    except ValueError:
        return tok
    if v.is_integer():
        return int(v)
    return v


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def _load_csv(path: Path, label_col: int | str):
    with open(path, newline="") as fh:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh)) if r and any(t.strip() for t in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    first = rows[0][1]
    width = len(first)
    named = isinstance(label_col, str) and label_col not in ("last", "first")
    if named:
        if label_col not in [t.strip() for t in first]:
            raise DataError(f"{path}: label column {label_col!r} not found")
        col = [t.strip() for t in first].index(label_col)
    elif label_col == "last":
        col = width - 1
    elif label_col == "first":
        col = 0
    else:
        col = int(label_col) % width
    # labels may be strings, so only the feature fields decide whether row 1 is a header
    header = None
    if named or not all(_is_number(t) for k, t in enumerate(first) if k != col):
        header = [t.strip() for t in first]
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")
    feats, labels = [], []
    for lineno, r in rows:
        if len(r) != width:
            raise DataError(f"{path}:{lineno}: ragged row ({len(r)} fields, expected {width})")
        labels.append(_parse_label(r[col]))
        vals = r[:col] + r[col + 1:]
        try:
            feats.append([float(t) for t in vals])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
    names = None
    if header is not None:
        names = tuple(header[:col] + header[col + 1:])
    return np.array(feats, dtype=float).reshape(len(rows), width - 1), labels, names


def _load_libsvm(path: Path):
    labels, entries = [], []
    d = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            row = {}
            try:
                labels.append(_parse_label(toks[0]))
                for t in toks[1:]:
                    k, v = t.split(":", 1)
                    j = int(k)
                    if j < 1:
                        raise ValueError(f"feature index {j} < 1")
                    row[j - 1] = float(v)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            if row:
                d = max(d, max(row) + 1)
            entries.append(row)
    X = np.zeros((len(entries), d))
    for i, row in enumerate(entries):
        for j, v in row.items():
            X[i, j] = v
    return X, labels, None


def load_dataset(path, format: str = "csv", label_col: int | str = "last") -> Dataset:
    """Read a CSV or libsvm file.

    CSV headers are detected by a non-numeric first row; the label column
    defaults to the last one. libsvm indices are 1-based and gaps are zero-filled.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    if format == "csv":
        X, raw, names = _load_csv(path, label_col)
    elif format == "libsvm":
        X, raw, names = _load_libsvm(path)
    else:
        raise ConfigError(f"unknown format {format!r}")
    if len(raw) < 2:
        raise DataError(f"{path}: need at least 2 samples, got {len(raw)}")
    y = remap_labels(raw)
    if y.max() < 2:
        raise DataError(f"{path}: single-class dataset")
    return Dataset(X.T.copy(), y, names)


def normalize_features(ds: Dataset, tol: float = 1e-12) -> tuple[Dataset, list[int]]:
    """Center each feature and scale it to unit L2 norm.

    Returns the new dataset and the indices of constant features, which are
    set to zero rather than dropped.
    """
    X = ds.features
    centered = X - X.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(centered, axis=1)
    scale = np.maximum(np.linalg.norm(X, axis=1), 1.0)
    constant = norms <= tol * scale
    out = np.zeros_like(centered)
    ok = ~constant
    out[ok] = centered[ok] / norms[ok, None]
    return ds.with_features(out), [int(j) for j in np.flatnonzero(constant)]


@dataclass(frozen=True)
class GroupPlan:
    groups: tuple[tuple[int, ...], ...]
    seed: int | None = None
    strategy: str = "explicit-size"

    def __post_init__(self):
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        seen: set[int] = set()
        for g in groups:
            if not g:
                raise ConfigError("empty group in plan")
            for i in g:
                if i < 0:
                    raise ConfigError(f"negative feature index {i} in plan")
                if i in seen:
                    raise ConfigError(f"feature {i} appears in more than one group")
                seen.add(i)
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        object.__setattr__(self, "groups", groups)

    def __len__(self):
        return len(self.groups)

    @property
    def indices(self) -> list[int]:
        return [i for g in self.groups for i in g]

    def reordered(self, order: Sequence[int]) -> "GroupPlan":
        return GroupPlan(tuple(self.groups[j] for j in order), self.seed, self.strategy)

    def to_json(self) -> str:
        return json.dumps(
            {"seed": self.seed, "strategy": self.strategy, "groups": [list(g) for g in self.groups]}
        )

    @classmethod
    def from_json(cls, text: str) -> "GroupPlan":
        obj = json.loads(text)
        try:
            return cls(tuple(obj["groups"]), obj.get("seed"), obj.get("strategy", "natural"))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed group plan: {exc}") from None


def make_group_plan(
    d: int,
    strategy: str = "half",
    seed: int | None = 0,
    size: int | None = None,
    groups: Sequence[Sequence[int]] | None = None,
) -> GroupPlan:
    """Randomly permute ``d`` features and chunk them into consecutive groups.

    The group size is ceil(d / divisor) for the named strategies or ``size``
    for ``explicit-size``; the last group takes the remainder. Below 100
    features only ``half`` and ``explicit-size`` are allowed. ``natural``
    returns ``groups`` untouched.
    """
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    if strategy == "natural":
        if groups is None:
            raise ConfigError("natural strategy needs an explicit grouping")
        return GroupPlan(tuple(tuple(g) for g in groups), seed, "natural")
    if d < 1:
        raise ConfigError("need at least one feature")
    if strategy == "explicit-size":
        if size is None or size < 1:
            raise ConfigError("explicit-size needs size >= 1")
        k = int(size)
    else:
        if d < 100 and strategy != "half":
            raise ConfigError(f"strategy {strategy!r} needs d >= 100 (got {d}); use half")
        k = math.ceil(d / _DIVISORS[strategy])
    if k < 1:
        raise ConfigError(f"group size is 0 for d={d}, strategy={strategy!r}")
    perm = np.random.default_rng(seed).permutation(d)
    chunks = tuple(tuple(int(i) for i in perm[s:s + k]) for s in range(0, d, k))
    return GroupPlan(chunks, seed, strategy)


@dataclass
class FeatureStream:
    """Single-pass iterator over the groups of a plan.

    Yields ``(group_id, [(feature_index, feature_vector), ...])``.
    """

    dataset: Dataset
    plan: GroupPlan
    cursor: int = field(default=0)

    def __post_init__(self):
        for i in self.plan.indices:
            if i >= self.dataset.d:
                raise ConfigError(
                    f"plan references feature {i} but dataset has {self.dataset.d} features"
                )

    def __iter__(self) -> Iterator[tuple[int, list[tuple[int, np.ndarray]]]]:
        return self

    def __next__(self):
        if self.cursor >= len(self.plan):
            raise StopIteration
        j = self.cursor
        self.cursor += 1
        X = self.dataset.features
        return j, [(i, X[i]) for i in self.plan.groups[j]]

    @property
    def exhausted(self) -> bool:
        return self.cursor >= len(self.plan)

    def features(self) -> Iterator[tuple[int, np.ndarray]]:
        """Flatten the remaining groups into single features."""
        for _, group in self:
            yield from group


def stream_groups(ds: Dataset, plan: GroupPlan) -> FeatureStream:
    return FeatureStream(ds, plan)
