"""Planted-feature benchmark: labels depend on a known set of informative features."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, GroupPlan
from .errors import ConfigError


@dataclass(frozen=True, eq=False)
class Planted:
    dataset: Dataset
    plan: GroupPlan
    informative: tuple[int, ...]
    weights: np.ndarray

    @property
    def strongest(self) -> int:
        return self.informative[int(np.argmax(np.abs(self.weights)))]


def make_planted(
    n: int = 200,
    d: int = 500,
    groups: int = 10,
    informative: int = 10,
    noise: float = 0.1,
    margin: float = 1.0,
    lead_weight: float = 3.0,
    seed: int = 0,
) -> Planted:
    """Gaussian features with labels ``sign(w . x_inf + noise * N(0, 1))``.

    ``w`` has unit norm; the first informative feature carries ``lead_weight``
    times the weight of the others and signs are random. Samples whose
    noiseless projection lies within ``margin`` of the hyperplane are
    rejected. Features are split into ``groups`` contiguous natural groups and
    the informative ones land at random positions.
    """
    if informative > d or informative < 1:
        raise ConfigError("informative must be in [1, d]")
    if groups < 1 or groups > d:
        raise ConfigError("groups must be in [1, d]")
    if n < 2 or margin < 0 or noise < 0:
        raise ConfigError("need n >= 2, margin >= 0, noise >= 0")
    rng = np.random.default_rng(seed)
    inf = np.sort(rng.choice(d, informative, replace=False))
    w = np.ones(informative)
    w[0] = lead_weight
    w *= rng.choice([-1.0, 1.0], informative)
    w /= np.linalg.norm(w)
    rows = []
    have = 0
    while have < n:
        batch = rng.standard_normal((2 * n, d))
        keep = batch[np.abs(batch[:, inf] @ w) >= margin]
        rows.append(keep)
        have += len(keep)
    X = np.concatenate(rows)[:n]
    y = np.where(X[:, inf] @ w + noise * rng.standard_normal(n) > 0, 1, 2)
    bounds = np.linspace(0, d, groups + 1).round().astype(int)
    plan = GroupPlan(tuple(tuple(range(a, b)) for a, b in zip(bounds[:-1], bounds[1:])), seed, "natural")
    return Planted(Dataset(X.T.copy(), y), plan, tuple(int(i) for i in inf), w)
