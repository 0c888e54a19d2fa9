"""Uniform and colour-biased random walks on the pixel torus.

Every visited pixel is switched to target state.  Walk moves are drawn in
one batch per walk: ``rng.integers(0, 4, size=steps)`` for the uniform walk
(direction index into up/down/left/right) and ``rng.random(steps)`` for the
biased walk (inverse-CDF sampling over the four neighbour weights).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .image_model import (
    NEIGHBOR_OFFSETS,
    Position,
    TransitionState,
    neighbor_table,
    neighbors,
    to_flat,
)

UNIFORM = "uniform"
BIASED = "biased"
KINDS = (UNIFORM, BIASED)


class GamblersRuinWarning(UserWarning):
    """A pure biased walk can need exponentially many steps to finish."""


@dataclass
class WalkCursor:
    pos: Position
    kind: str = UNIFORM
    steps_taken: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown walk kind {self.kind!r}")

    def move_to(self, pos: Position) -> None:
        self.pos = pos
        self.steps_taken += 1


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"unknown walk kind {kind!r}, expected one of {KINDS}")


def gamma(target: np.ndarray, src: Position, dst: Position) -> int:
    """Sum over RGB of ``|T[dst] - T[src]|``."""
    a = target[src[0] - 1, src[1] - 1].astype(np.int64)
    b = target[dst[0] - 1, dst[1] - 1].astype(np.int64)
    return int(np.abs(b - a).sum())


def biased_probabilities(target: np.ndarray, pos: Position) -> np.ndarray:
    """Move probabilities to the four neighbours, in neighbour order.

    A neighbourhood whose weights are all zero falls back to uniform.
    """
    dims = target.shape[:2]
    weights = np.array([gamma(target, pos, q) for q in neighbors(pos, dims)], dtype=float)
    total = weights.sum()
    if total == 0:
        return np.full(4, 0.25)
    return weights / total


def uniform_step(cursor: WalkCursor, dims: tuple[int, int], rng) -> Position:
    return neighbors(cursor.pos, dims)[int(rng.integers(0, 4))]


def biased_step(cursor: WalkCursor, target: np.ndarray, rng) -> Position:
    probs = biased_probabilities(target, cursor.pos)
    cum = np.cumsum(probs)
    u = rng.random()
    k = int(np.searchsorted(cum, u, side="right"))
    if k >= 4 or probs[k] == 0:
        k = int(np.flatnonzero(probs)[-1])
    return neighbors(cursor.pos, target.shape[:2])[k]


class BiasTable:
    """Precomputed neighbour lists and integer cumulative weights for ``T``."""

    def __init__(self, target: np.ndarray):
        dims = target.shape[:2]
        table = neighbor_table(dims)
        flat = target.reshape(-1, 3).astype(np.int64)
        weights = np.abs(flat[table] - flat[:, None, :]).sum(axis=2)
        dead = weights.sum(axis=1) == 0
        weights[dead] = 1
        cum = np.cumsum(weights, axis=1)
        self.weights = weights
        self.neighbors = table.tolist()
        self.cum = cum.tolist()
        self.total = cum[:, 3].astype(float).tolist()
        # index of the last neighbour with positive weight, for u*total rounding
        self.last = (3 - np.argmax(weights[:, ::-1] > 0, axis=1)).tolist()

    def probabilities(self, flat: int) -> np.ndarray:
        w = self.weights[flat]
        return w / w.sum()


def bias_table(state: TransitionState) -> BiasTable:
    table = state.__dict__.get("_bias_table")
    if table is None:
        table = BiasTable(state.target)
        state._bias_table = table
    return table


def uniform_path(start: int, steps: int, dims: tuple[int, int], rng) -> np.ndarray:
    """Flat positions after each of ``steps`` uniform moves from ``start``."""
    if steps <= 0:
        return np.empty(0, dtype=np.int64)
    m, n = dims
    moves = np.asarray(rng.integers(0, 4, size=steps))
    offsets = np.array(NEIGHBOR_OFFSETS, dtype=np.int64)[moves]
    i0, j0 = divmod(int(start), n)
    rows = (i0 + np.cumsum(offsets[:, 0])) % m
    cols = (j0 + np.cumsum(offsets[:, 1])) % n
    return rows * n + cols


def biased_path(start: int, steps: int, table: BiasTable, rng) -> np.ndarray:
    """Flat positions after each of ``steps`` biased moves from ``start``."""
    if steps <= 0:
        return np.empty(0, dtype=np.int64)
    us = np.asarray(rng.random(steps)).tolist()
    nbrs, cums, totals, lasts = table.neighbors, table.cum, table.total, table.last
    out = [0] * steps
    pos = int(start)
    for s, u in enumerate(us):
        x = u * totals[pos]
        c = cums[pos]
        if x < c[0]:
            k = 0
        elif x < c[1]:
            k = 1
        elif x < c[2]:
            k = 2
        elif x < c[3]:
            k = 3
        else:
            k = lasts[pos]
        pos = nbrs[pos][k]
        out[s] = pos
    return np.array(out, dtype=np.int64)


def walk_path(state: TransitionState, start: int, steps: int, kind: str, rng) -> np.ndarray:
    _check_kind(kind)
    if kind == UNIFORM:
        return uniform_path(start, steps, state.dims, rng)
    return biased_path(start, steps, bias_table(state), rng)


def walk_in_place(state: TransitionState, start: int, steps: int, kind: str, rng) -> tuple[int, int]:
    """Walk from flat index ``start`` converting visited pixels.

    Returns ``(end position, number of pixels converted)``.
    """
    path = walk_path(state, start, steps, kind, rng)
    visited = np.concatenate(([int(start)], path))
    converted = state.convert_to_target(visited)
    return int(visited[-1]), converted


def run_walk(state: TransitionState, start: Position, steps: int, kind: str, rng) -> TransitionState:
    """Copy of ``state`` after a ``steps``-move walk from ``start`` (1-based)."""
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    child = state.copy()
    walk_in_place(child, to_flat(start, state.dims), steps, kind, rng)
    return child


def warn_gamblers_ruin(budget) -> None:
    if budget is not None:
        warnings.warn(
            "a pure biased walk can take exponentially long to convert every pixel; "
            f"the run may stop at its budget of {budget} steps before completion",
            GamblersRuinWarning,
            stacklevel=4,
        )

