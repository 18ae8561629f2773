"""Per-feature screening of an arriving group with the scatter-ratio criterion."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .spectral import DELTA, ClassIndex, scatter_columns, subset_score

MODES = ("absolute", "signed")
CONTEXTS = ("group-local", "global")


@dataclass(frozen=True)
class Decision:
    accepted: bool
    old_score: float
    new_score: float


@dataclass
class SelectionState:
    index: ClassIndex
    epsilon: float = 0.001
    mode: str = "absolute"
    context: str = "group-local"
    delta: float = DELTA
    selected: list[int] = field(default_factory=list)
    sum_b: float = 0.0
    sum_w: float = 0.0

    @property
    def score(self) -> float:
        return subset_score(self.sum_b, self.sum_w, self.delta)

    def fresh(self) -> "SelectionState":
        return SelectionState(self.index, self.epsilon, self.mode, self.context, self.delta)

    def reset(self, selected: Sequence[int], features: np.ndarray) -> None:
        """Replace the selection with ``selected`` (rows of ``features``) and recompute the sums."""
        self.selected = [int(i) for i in selected]
        if self.selected:
            b, w = scatter_columns(features[self.selected], self.index)
            self.sum_b, self.sum_w = float(b.sum()), float(w.sum())
        else:
            self.sum_b = self.sum_w = 0.0

    def accepts(self, old: float, new: float) -> bool:
        change = new - old
        if self.mode == "absolute":
            return abs(change) > self.epsilon
        return change > self.epsilon

    def evaluate(self, idx: int, b: float, w: float) -> Decision:
        """Criterion test for a feature with precomputed scatters ``(b, w)``."""
        if idx in self.selected:
            raise ValueError(f"feature {idx} is already selected")
        old = self.score
        new = subset_score(self.sum_b + b, self.sum_w + w, self.delta)
        ok = self.accepts(old, new)
        if ok:
            self.selected.append(int(idx))
            self.sum_b += b
            self.sum_w += w
        return Decision(ok, old, new)


def init_state(
    labels, epsilon: float = 0.001, mode: str = "absolute", context: str = "group-local",
    delta: float = DELTA,
) -> SelectionState:
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    if context not in CONTEXTS:
        raise ConfigError(f"unknown context {context!r}")
    index = labels if isinstance(labels, ClassIndex) else ClassIndex(labels)
    return SelectionState(index, epsilon, mode, context, delta)


def evaluate_feature(state: SelectionState, f, idx: int) -> tuple[Decision, SelectionState]:
    """Accept ``f`` iff adding it moves the subset score by more than epsilon.

    Absolute mode tests ``|F' - F| > eps``; signed mode tests ``F' - F > eps``.
    The state is updated in place on acceptance and left untouched otherwise.
    """
    b, w = scatter_columns(np.asarray(f, dtype=float)[None, :], state.index)
    return state.evaluate(idx, float(b[0]), float(w[0])), state


def intra_group_select(state: SelectionState, group) -> tuple[SelectionState, list[int]]:
    """Screen a group ``[(idx, f), ...]`` in arrival order.

    In group-local context the scores restart from the empty set and the
    returned state holds only the group's survivors; in global context
    ``state`` itself accumulates them.
    """
    if not group:
        raise ValueError("empty group")
    target = state.fresh() if state.context == "group-local" else state
    idx = [i for i, _ in group]
    b, w = scatter_columns(np.stack([f for _, f in group]), state.index)
    accepted = []
    for i, bi, wi in zip(idx, b.tolist(), w.tolist()):
        if target.evaluate(i, bi, wi).accepted:
            accepted.append(i)
    return target, accepted
