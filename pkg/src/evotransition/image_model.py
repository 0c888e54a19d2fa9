"""Raster data model, torus geometry and the s/t state mask.

Images are ``(m, n, 3)`` uint8 arrays.  Positions handed across the public
API are 1-based ``(i, j)`` tuples; internally everything works on 0-based
flat indices ``(i - 1) * n + (j - 1)``.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .validation import ConfigurationError, check_image, check_same_shape

Position = tuple[int, int]

# Neighbour order used everywhere: up, down, left, right.
NEIGHBOR_OFFSETS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def neighbors(p: Position, dims: tuple[int, int]) -> list[Position]:
    """The four torus neighbours of ``p`` (1-based), duplicates kept."""
    m, n = dims
    i, j = p
    if not (1 <= i <= m and 1 <= j <= n):
        raise ValueError(f"position {p} outside a {m}x{n} grid")
    return [((i - 1 + di) % m + 1, (j - 1 + dj) % n + 1) for di, dj in NEIGHBOR_OFFSETS]


def neighbor_table(dims: tuple[int, int]) -> np.ndarray:
    """Flat-index neighbour table of shape ``(m*n, 4)``."""
    m, n = dims
    rows, cols = np.divmod(np.arange(m * n), n)
    table = np.empty((m * n, 4), dtype=np.int64)
    for k, (di, dj) in enumerate(NEIGHBOR_OFFSETS):
        table[:, k] = ((rows + di) % m) * n + (cols + dj) % n
    return table


def to_flat(p: Position, dims: tuple[int, int]) -> int:
    m, n = dims
    i, j = p
    if not (1 <= i <= m and 1 <= j <= n):
        raise ValueError(f"position {p} outside a {m}x{n} grid")
    return (i - 1) * n + (j - 1)


def to_position(flat: int, dims: tuple[int, int]) -> Position:
    i, j = divmod(int(flat), dims[1])
    return (i + 1, j + 1)


class TransitionState:
    """Which source each pixel of the composite ``X`` currently shows.

    ``mask`` holds ``True`` for state *t* (pixel equals the target) and
    ``False`` for state *s*.  Positions where start and target already agree
    are *frozen*: they sit in state *t* from the outset and no operator may
    touch them.

    Non-frozen positions are kept in two index pools (one per state) with a
    reverse slot map, so drawing a uniform subset of the s- or t-pixels and
    flipping it costs time proportional to the subset, not to the image.
    """

    def __init__(self, start, target):
        start = check_image(start, "start")
        target = check_image(target, "target")
        check_same_shape(start, target)
        self.start = start
        self.target = target
        m, n = start.shape[:2]
        self.dims = (m, n)
        self.size = m * n

        self.frozen = np.all(start == target, axis=2).ravel()
        self._mask = self.frozen.copy()
        movable = np.flatnonzero(~self.frozen)
        self._s_pool = np.zeros(self.size, dtype=np.int64)
        self._t_pool = np.zeros(self.size, dtype=np.int64)
        self._slot = np.full(self.size, -1, dtype=np.int64)
        self._s_pool[: movable.size] = movable
        self._slot[movable] = np.arange(movable.size)
        self._n_s = int(movable.size)
        self._n_t_free = 0
        self.n_frozen = self.size - self._n_s

    # counts ------------------------------------------------------------------

    @property
    def count_s(self) -> int:
        """``|X|_S``: pixels in state s."""
        return self._n_s

    @property
    def count_t(self) -> int:
        """``|X|_T``: pixels in state t, frozen ones included."""
        return self.size - self._n_s

    @property
    def movable_t(self) -> int:
        """Non-frozen pixels in state t."""
        return self._n_t_free

    @property
    def mask(self) -> np.ndarray:
        """Read-only ``(m, n)`` view of the state mask (``True`` = t)."""
        view = self._mask.reshape(self.dims)
        view.flags.writeable = False
        return view

    @property
    def flat_mask(self) -> np.ndarray:
        view = self._mask.view()
        view.flags.writeable = False
        return view

    @property
    def complete(self) -> bool:
        return self._n_s == 0

    def recount(self) -> tuple[int, int]:
        """Full O(m*n) recount of ``(count_s, count_t)`` from the mask."""
        t = int(np.count_nonzero(self._mask))
        return self.size - t, t

    def same_images(self, other: "TransitionState") -> bool:
        return (self.start is other.start and self.target is other.target) or (
            np.array_equal(self.start, other.start) and np.array_equal(self.target, other.target)
        )

    # pools -------------------------------------------------------------------

    def s_pixels(self) -> np.ndarray:
        return self._s_pool[: self._n_s]

    def t_pixels(self) -> np.ndarray:
        """Non-frozen state-t pixels."""
        return self._t_pool[: self._n_t_free]

    # mutation primitives -----------------------------------------------------

    def _move_to_t(self, idx: int) -> None:
        slot = self._slot[idx]
        last = self._s_pool[self._n_s - 1]
        self._s_pool[slot] = last
        self._slot[last] = slot
        self._n_s -= 1
        self._t_pool[self._n_t_free] = idx
        self._slot[idx] = self._n_t_free
        self._n_t_free += 1
        self._mask[idx] = True

    def _move_to_s(self, idx: int) -> None:
        slot = self._slot[idx]
        last = self._t_pool[self._n_t_free - 1]
        self._t_pool[slot] = last
        self._slot[last] = slot
        self._n_t_free -= 1
        self._s_pool[self._n_s] = idx
        self._slot[idx] = self._n_s
        self._n_s += 1
        self._mask[idx] = False

    def apply_flips(self, to_t: Iterable[int] = (), to_s: Iterable[int] = ()) -> None:
        """Toggle the given flat indices in place.

        ``to_t`` must currently be in state s and ``to_s`` in state t; both
        must be non-frozen.
        """
        for idx in to_t:
            idx = int(idx)
            if self._mask[idx]:
                raise ValueError(f"pixel {idx} is already in state t")
            self._move_to_t(idx)
        for idx in to_s:
            idx = int(idx)
            if not self._mask[idx] or self.frozen[idx]:
                raise ValueError(f"pixel {idx} is not a movable t-pixel")
            self._move_to_s(idx)

    def convert_to_target(self, indices) -> int:
        """Set every listed pixel to state t; returns how many changed."""
        indices = np.unique(np.asarray(indices, dtype=np.int64))
        fresh = indices[~self._mask[indices]]
        if fresh.size * 8 > self._n_s:
            self._mask[fresh] = True
            self._rebuild_pools()
        else:
            for idx in fresh.tolist():
                self._move_to_t(idx)
        return int(fresh.size)

    def _rebuild_pools(self) -> None:
        s = np.flatnonzero(~self._mask)
        t = np.flatnonzero(self._mask & ~self.frozen)
        self._s_pool[: s.size] = s
        self._t_pool[: t.size] = t
        self._slot[:] = -1
        self._slot[s] = np.arange(s.size)
        self._slot[t] = np.arange(t.size)
        self._n_s = int(s.size)
        self._n_t_free = int(t.size)

    def set_mask(self, mask) -> None:
        """Replace the mask wholesale; frozen pixels are forced to t."""
        mask = np.asarray(mask, dtype=bool).ravel()
        if mask.size != self.size:
            raise ConfigurationError(f"mask has {mask.size} entries, expected {self.size}")
        self._mask = mask | self.frozen
        self._rebuild_pools()

    def copy(self) -> "TransitionState":
        new = object.__new__(TransitionState)
        new.__dict__.update(self.__dict__)
        new._mask = self._mask.copy()
        new._s_pool = self._s_pool.copy()
        new._t_pool = self._t_pool.copy()
        new._slot = self._slot.copy()
        return new

    def __repr__(self) -> str:
        m, n = self.dims
        return f"TransitionState({m}x{n}, count_s={self.count_s}, count_t={self.count_t})"


def init_state(start, target) -> TransitionState:
    """Fresh state: everything in s except frozen pixels."""
    return TransitionState(start, target)


def compose(state: TransitionState) -> np.ndarray:
    """Render the current composite image."""
    return np.where(state.mask[..., None], state.target, state.start)
