"""Pixel-flip mutation operators.

Each operator comes in two forms: ``propose_*`` returns the flat indices
that would flip (``Flips``) without touching the state, and the
``*_mutation`` wrapper returns a mutated copy.  The engine uses the
proposal form so rejected offspring never cost a full state copy.

Per-pixel independent flips with a common probability ``p`` over a pool of
``N`` pixels are drawn as ``K ~ Binomial(N, p)`` followed by a uniform
``K``-subset of the pool, which has exactly the same distribution.  Draw
order per invocation: s-side count, s-side subset, t-side count, t-side
subset.  A side with nothing to flip (empty pool or zero probability)
consumes no draws.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .image_model import TransitionState
from .validation import ConfigurationError

_EMPTY = np.empty(0, dtype=np.int64)


@dataclass(frozen=True)
class AsymmetricParams:
    c_s: float = 1.0
    c_t: float = 1.0

    def __post_init__(self):
        for name in ("c_s", "c_t"):
            value = getattr(self, name)
            if not value >= 1:
                raise ConfigurationError(f"{name} must be >= 1, got {value!r}")


class Flips(NamedTuple):
    to_t: np.ndarray
    to_s: np.ndarray

    @property
    def gain(self) -> int:
        """Fitness change if applied."""
        return len(self.to_t) - len(self.to_s)


def _draw_subset(pool: np.ndarray, p: float, rng) -> np.ndarray:
    size = len(pool)
    if size == 0 or p <= 0:
        return _EMPTY
    if p >= 1:
        return pool.copy()
    k = int(rng.binomial(size, p))
    if k == 0:
        return _EMPTY
    if k == size:
        return pool.copy()
    if k == 1:
        return pool[[int(rng.integers(size))]]
    return pool[rng.choice(size, size=k, replace=False)]


def flip_rates_standard(state: TransitionState) -> tuple[float, float]:
    p = 1.0 / state.size
    return p, p


def flip_rates_asymmetric(state: TransitionState, params: AsymmetricParams) -> tuple[float, float]:
    """``(p_s, p_t)`` from the current counts, clamped at 1.

    A side whose count is zero has no pixels, so its rate is reported as 0.
    """
    n_s, n_t = state.count_s, state.count_t
    p_s = min(1.0, params.c_s / (2 * n_s)) if n_s else 0.0
    p_t = min(1.0, params.c_t / (2 * n_t)) if n_t else 0.0
    return p_s, p_t


def propose_standard(state: TransitionState, rng) -> Flips:
    """Flip every non-frozen pixel independently with probability ``1/(m*n)``."""
    p_s, p_t = flip_rates_standard(state)
    to_t = _draw_subset(state.s_pixels(), p_s, rng)
    to_s = _draw_subset(state.t_pixels(), p_t, rng)
    return Flips(to_t, to_s)


def propose_asymmetric(state: TransitionState, params: AsymmetricParams, rng) -> Flips:
    """s-pixels flip with ``c_s/(2|X|_S)``, t-pixels with ``c_t/(2|X|_T)``.

    Both rates come from the counts before any flip of this invocation.
    """
    p_s, p_t = flip_rates_asymmetric(state, params)
    to_t = _draw_subset(state.s_pixels(), p_s, rng)
    to_s = _draw_subset(state.t_pixels(), p_t, rng)
    return Flips(to_t, to_s)


def apply(state: TransitionState, flips: Flips) -> TransitionState:
    """Mutated copy of ``state``."""
    child = state.copy()
    child.apply_flips(flips.to_t, flips.to_s)
    return child


def standard_mutation(state: TransitionState, rng) -> TransitionState:
    return apply(state, propose_standard(state, rng))


def asymmetric_mutation(state: TransitionState, params: AsymmetricParams, rng) -> TransitionState:
    return apply(state, propose_asymmetric(state, params, rng))
