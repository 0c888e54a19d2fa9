"""The elitist run loop, milestone capture and run metrics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .combined import PURE_WALKS, OperatorConfig, generation_step
from .image_model import Position, TransitionState, compose, to_flat
from .validation import ConfigurationError, check_image_pair
from .walk import BIASED, walk_path, warn_gamblers_ruin

DEFAULT_MILESTONES = (0.125, 0.375, 0.625, 0.875)
METRICS_HEADER = ("generation", "fitness", "k", "flips_st", "flips_ts", "accepted")

FrameSink = Callable[[int, np.ndarray], None]


@dataclass(frozen=True)
class FramePolicy:
    """Which generations besides milestones get a frame: none, every k-th, or all."""

    every: int = 0

    @classmethod
    def milestones_only(cls) -> "FramePolicy":
        return cls(0)

    @classmethod
    def every_k(cls, k: int) -> "FramePolicy":
        if k < 1:
            raise ConfigurationError(f"frame interval must be >= 1, got {k}")
        return cls(k)

    @classmethod
    def all(cls) -> "FramePolicy":
        return cls(1)

    def wants(self, generation: int) -> bool:
        return self.every > 0 and generation % self.every == 0


@dataclass(frozen=True)
class RunConfig:
    operator: OperatorConfig = field(default_factory=OperatorConfig)
    seed: int | None = None
    # None: 10 * m * n generations; math.inf: unbounded
    max_generations: float | None = None
    milestones: tuple[float, ...] = DEFAULT_MILESTONES
    snap_final: bool = False
    frame_policy: FramePolicy = field(default_factory=FramePolicy)
    record_metrics: bool = True
    # pure walks only; None draws a uniformly random start pixel
    walk_start: Position | None = None

    def __post_init__(self):
        ms = tuple(float(x) for x in self.milestones)
        if any(not 0 < x <= 1 for x in ms):
            raise ConfigurationError(f"milestones must lie in (0, 1], got {ms}")
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise ConfigurationError(f"milestones must be strictly increasing, got {ms}")
        object.__setattr__(self, "milestones", ms)
        if self.max_generations is not None and self.max_generations < 0:
            raise ConfigurationError(f"max_generations must be >= 0, got {self.max_generations}")

    def budget(self, size: int) -> float:
        if self.max_generations is None:
            return 10 * size
        return self.max_generations


class RunMetrics:
    """Per-generation records; generation 0 (the initial state) is not a row."""

    def __init__(self, size: int, initial_fitness: int):
        self.size = size
        self.initial_fitness = initial_fitness
        self.generation: list[int] = []
        self.fitness: list[int] = []
        self.flips_st: list[int] = []
        self.flips_ts: list[int] = []
        self.accepted: list[bool] = []

    def append(self, generation, fitness, flips_st, flips_ts, accepted) -> None:
        self.generation.append(generation)
        self.fitness.append(fitness)
        self.flips_st.append(flips_st)
        self.flips_ts.append(flips_ts)
        self.accepted.append(accepted)

    def extend(self, generations, fitness, flips_st, flips_ts, accepted) -> None:
        self.generation.extend(generations)
        self.fitness.extend(fitness)
        self.flips_st.extend(flips_st)
        self.flips_ts.extend(flips_ts)
        self.accepted.extend(accepted)

    def __len__(self) -> int:
        return len(self.generation)

    @property
    def k(self) -> list[int]:
        """Missing target pixels per record."""
        return [self.size - f for f in self.fitness]

    def drift(self) -> np.ndarray:
        """Fitness change per generation."""
        return np.diff(np.array([self.initial_fitness] + self.fitness, dtype=np.int64))

    def rows(self):
        for g, f, st, ts, a in zip(self.generation, self.fitness, self.flips_st, self.flips_ts, self.accepted):
            yield g, f, self.size - f, st, ts, int(a)

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        writer.writerows(self.rows())


@dataclass
class RunResult:
    final_state: TransitionState
    milestone_frames: dict[float, tuple[int, np.ndarray]]
    metrics: RunMetrics | None
    completed: bool
    generations: int
    seed: int | None
    snapped: int = 0

    @property
    def final_image(self) -> np.ndarray:
        return compose(self.final_state)


class _Milestones:
    def __init__(self, fractions, size: int):
        self.fractions = list(fractions)
        self.thresholds = [math.ceil(f * size - 1e-9) for f in self.fractions]
        self.next = 0
        self.frames: dict[float, tuple[int, np.ndarray]] = {}

    def check(self, state: TransitionState, generation: int) -> None:
        frame = None
        while self.next < len(self.thresholds) and state.count_t >= self.thresholds[self.next]:
            fraction = self.fractions[self.next]
            if frame is None:
                frame = capture_milestone(state, generation, fraction)
            self.frames[fraction] = frame
            self.next += 1


def capture_milestone(state: TransitionState, generation: int, fraction: float) -> tuple[int, np.ndarray]:
    return generation, compose(state)


def _resolve_seed(seed):
    if seed is None:
        return int(np.random.SeedSequence().entropy)
    return seed


def run(start, target, cfg: RunConfig | None = None, rng=None, frame_sink: FrameSink | None = None) -> RunResult:
    """Transition ``start`` into ``target`` under ``cfg``.

    The loop stops once every pixel is in target state or the generation
    budget is spent.  ``rng`` overrides the seeded generator (for scripted
    tests); ``frame_sink(generation, image)`` receives frames selected by the
    frame policy.
    """
    cfg = cfg or RunConfig()
    start, target = check_image_pair(start, target)
    seed = _resolve_seed(cfg.seed) if rng is None else cfg.seed
    if rng is None:
        rng = np.random.default_rng(seed)
    state = TransitionState(start, target)
    size = state.size
    budget = cfg.budget(size)
    op = cfg.operator

    if op.scheme in PURE_WALKS:
        return _run_pure_walk(state, cfg, budget, rng, frame_sink, seed)

    metrics = RunMetrics(size, state.count_t) if cfg.record_metrics else None
    milestones = _Milestones(cfg.milestones, size)
    milestones.check(state, 0)
    policy = cfg.frame_policy
    if frame_sink is not None and policy.every:
        frame_sink(0, compose(state))

    g = 0
    while not state.complete and g < budget:
        g += 1
        rec = generation_step(state, op, g, rng)
        if metrics is not None:
            metrics.append(g, state.count_t, rec.flips_st, rec.flips_ts, rec.accepted)
        milestones.check(state, g)
        if frame_sink is not None and policy.wants(g):
            frame_sink(g, compose(state))

    snapped = _snap(state, cfg)
    if snapped:
        milestones.check(state, g)
    return RunResult(state, milestones.frames, metrics, state.complete, g, seed, snapped)


def _snap(state: TransitionState, cfg: RunConfig) -> int:
    if cfg.snap_final and not state.complete and state.count_s < cfg.operator.asym.c_t / 2:
        return state.convert_to_target(state.s_pixels().copy())
    return 0


def _run_pure_walk(state, cfg, budget, rng, frame_sink, seed) -> RunResult:
    """One continuous walk; a generation is a single move.

    The start pixel is converted before generation 0 is inspected.
    """
    kind = cfg.operator.walk_kind
    if kind == BIASED and math.isfinite(budget):
        warn_gamblers_ruin(budget)
    size = state.size
    if cfg.walk_start is None:
        pos = int(rng.integers(0, size))
    else:
        pos = to_flat(cfg.walk_start, state.dims)
    metrics = RunMetrics(size, state.count_t) if cfg.record_metrics else None
    state.convert_to_target([pos])
    if metrics is not None:
        metrics.initial_fitness = state.count_t
    milestones = _Milestones(cfg.milestones, size)
    milestones.check(state, 0)
    policy = cfg.frame_policy
    if frame_sink is not None and policy.every:
        frame_sink(0, compose(state))

    chunk = max(1024, size)
    g = 0
    while not state.complete and g < budget:
        steps = int(min(chunk, budget - g))
        path = walk_path(state, pos, steps, kind, rng)
        # which moves land on a pixel that is still in state s, first visit only
        uniq, first = np.unique(path, return_index=True)
        fresh = np.zeros(steps, dtype=np.int64)
        fresh[first[~state.flat_mask[uniq]]] = 1
        fit = state.count_t + np.cumsum(fresh)
        done = np.flatnonzero(fit == size)
        if done.size:
            steps = int(done[0]) + 1
            path, fresh, fit = path[:steps], fresh[:steps], fit[:steps]

        events = set()
        for t in milestones.thresholds[milestones.next:]:
            hit = np.flatnonzero(fit >= t)
            if hit.size:
                events.add(int(hit[0]))
        if frame_sink is not None and policy.every:
            first_g = (g // policy.every + 1) * policy.every
            events.update(range(first_g - g - 1, steps, policy.every))
        done_upto = 0
        for e in sorted(events):
            state.convert_to_target(path[done_upto : e + 1])
            done_upto = e + 1
            milestones.check(state, g + e + 1)
            if frame_sink is not None and policy.wants(g + e + 1):
                frame_sink(g + e + 1, compose(state))
        if done_upto < steps:
            state.convert_to_target(path[done_upto:])

        if metrics is not None:
            metrics.extend(
                range(g + 1, g + steps + 1),
                fit.tolist(),
                fresh.tolist(),
                [0] * steps,
                [True] * steps,
            )
        pos = int(path[-1])
        g += steps

    snapped = _snap(state, cfg)
    if snapped:
        milestones.check(state, g)
    return RunResult(state, milestones.frames, metrics, state.complete, g, seed, snapped)
