"""Monte-Carlo checks of runtime scaling, one-step drift and torus cover time.

Every experiment runs on the same ``TransitionState`` machinery as the image
transitions, using synthetic pairs in which every pixel differs.  Each trial
owns a generator spawned from ``(seed, group, trial)`` so results do not
depend on how trials are scheduled across workers.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import mutation as mut
from .combined import ASYM, STANDARD, UNIFORM_WALK, OperatorConfig
from .engine import RunConfig, run
from .fitness import accepts
from .image_model import TransitionState
from .mutation import AsymmetricParams
from .validation import ConfigurationError, check_int

MIN_TRIALS = 30
Z95 = 1.959963984540054


def synthetic_pair(size: int) -> tuple[np.ndarray, np.ndarray]:
    """Black start, white target; square when ``size`` is a perfect square."""
    side = math.isqrt(size)
    shape = (side, side) if side * side == size else (1, size)
    start = np.zeros(shape + (3,), dtype=np.uint8)
    return start, np.full_like(start, 255)


def _trial_rng(seed: int, group: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(group, trial)))


def _mean_ci(samples) -> tuple[float, float, float]:
    x = np.asarray(samples, dtype=float)
    mean = float(x.mean())
    if x.size < 2:
        return mean, mean, mean
    half = Z95 * float(x.std(ddof=1)) / math.sqrt(x.size)
    return mean, mean - half, mean + half


def _operator(scheme: str, params: AsymmetricParams | None) -> OperatorConfig:
    if scheme == ASYM:
        return OperatorConfig(ASYM, asym=params or AsymmetricParams(1.0, 1.0))
    if scheme == STANDARD:
        return OperatorConfig(STANDARD)
    raise ConfigurationError(f"runtime and drift experiments support 'asym' and 'standard', got {scheme!r}")


def _map(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*tasks)))


# runtime scaling -------------------------------------------------------------


@dataclass
class ScalingReport:
    scheme: str
    sizes: list[int]
    trials: int
    mean_runtimes: list[float]
    ci_low: list[float]
    ci_high: list[float]
    slope: float
    slope_ci: tuple[float, float]
    intercept: float
    samples: list[list[int]] = field(repr=False, default_factory=list)

    @property
    def nlogn_ratios(self) -> list[float]:
        """Mean runtime divided by ``n ln n`` for each size."""
        return [t / (n * math.log(n)) for n, t in zip(self.sizes, self.mean_runtimes)]

    @property
    def linear_ratios(self) -> list[float]:
        return [t / n for n, t in zip(self.sizes, self.mean_runtimes)]

    def rows(self):
        for row in zip(self.sizes, self.mean_runtimes, self.ci_low, self.ci_high):
            yield row

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("n", "mean_generations", "ci_low", "ci_high"))
        for n, mean, lo, hi in self.rows():
            writer.writerow((n, f"{mean:.6g}", f"{lo:.6g}", f"{hi:.6g}"))


def _runtime_trial(scheme: str, params, size: int, seed: int, group: int, trial: int) -> int:
    start, target = synthetic_pair(size)
    cfg = RunConfig(
        operator=_operator(scheme, params),
        max_generations=math.inf,
        milestones=(),
        record_metrics=False,
    )
    result = run(start, target, cfg, rng=_trial_rng(seed, group, trial))
    return result.generations


def fit_loglog(sizes, means) -> tuple[float, float, tuple[float, float]]:
    """Least-squares slope, intercept and 95% slope interval of log(mean) on log(n)."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(means, dtype=float))
    fit = stats.linregress(x, y)
    dof = len(x) - 2
    if dof > 0:
        half = float(stats.t.ppf(0.975, dof) * fit.stderr)
    else:
        half = math.nan
    return float(fit.slope), float(fit.intercept), (fit.slope - half, fit.slope + half)


def measure_runtime_scaling(
    scheme: str,
    sizes,
    trials: int,
    seed: int = 0,
    params: AsymmetricParams | None = None,
    workers: int = 1,
) -> ScalingReport:
    """Generations to full conversion for each pixel count in ``sizes``."""
    sizes = [check_int(n, "size", 2) for n in sizes]
    if len(set(sizes)) < 2:
        raise ConfigurationError("need at least two distinct sizes to fit a slope")
    trials = check_int(trials, "trials")
    if trials < MIN_TRIALS:
        raise ConfigurationError(f"need at least {MIN_TRIALS} trials per size, got {trials}")
    _operator(scheme, params)

    tasks = [(scheme, params, n, seed, g, t) for g, n in enumerate(sizes) for t in range(trials)]
    flat = _map(_runtime_trial, tasks, workers)
    samples = [flat[g * trials : (g + 1) * trials] for g in range(len(sizes))]
    summary = [_mean_ci(s) for s in samples]
    means = [s[0] for s in summary]
    slope, intercept, slope_ci = fit_loglog(sizes, means)
    return ScalingReport(
        scheme=scheme,
        sizes=sizes,
        trials=trials,
        mean_runtimes=means,
        ci_low=[s[1] for s in summary],
        ci_high=[s[2] for s in summary],
        slope=slope,
        slope_ci=slope_ci,
        intercept=intercept,
        samples=samples,
    )


# drift ---------------------------------------------------------------------------


@dataclass
class DriftEstimate:
    scheme: str
    fraction: float
    size: int
    k: int
    trials: int
    mean: float
    ci_low: float
    ci_high: float


def prepared_state(size: int, fraction: float, rng) -> TransitionState:
    """All-differing state with ``round(fraction * size)`` random pixels in t."""
    if not 0 <= fraction <= 1:
        raise ConfigurationError(f"fraction must lie in [0, 1], got {fraction}")
    state = TransitionState(*synthetic_pair(size))
    n_t = int(round(fraction * state.size))
    mask = np.zeros(state.size, dtype=bool)
    mask[rng.choice(state.size, size=n_t, replace=False)] = True
    state.set_mask(mask)
    return state


def measure_drift(
    scheme: str,
    fraction: float,
    trials: int,
    seed: int = 0,
    size: int = 4096,
    params: AsymmetricParams | None = None,
) -> DriftEstimate:
    """Expected accepted fitness gain of one generation at a fixed state.

    A rejected offspring contributes 0, an accepted one its fitness gain.
    """
    trials = check_int(trials, "trials", 1)
    op = _operator(scheme, params)
    rng = np.random.default_rng(seed)
    state = prepared_state(size, fraction, rng)
    f = state.count_t
    gains = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        if op.scheme == ASYM:
            flips = mut.propose_asymmetric(state, op.asym, rng)
        else:
            flips = mut.propose_standard(state, rng)
        gain = flips.gain
        gains[i] = gain if accepts(f + gain, f) else 0
    mean, lo, hi = _mean_ci(gains)
    return DriftEstimate(scheme, fraction, state.size, state.count_s, trials, mean, lo, hi)


# cover time ------------------------------------------------------------------


def cover_bound(n: int, log=math.log) -> float:
    return 4 * n * n * log(n) ** 2 / math.pi


@dataclass
class CoverEstimate:
    n: int
    trials: int
    mean: float
    ci_low: float
    ci_high: float
    samples: list[int] = field(repr=False, default_factory=list)

    @property
    def bound_ln(self) -> float:
        return cover_bound(self.n, math.log)

    @property
    def bound_log2(self) -> float:
        return cover_bound(self.n, math.log2)


def _cover_trial(n: int, seed: int, trial: int) -> int:
    start, target = synthetic_pair(n * n)
    cfg = RunConfig(
        operator=OperatorConfig(UNIFORM_WALK),
        max_generations=math.inf,
        milestones=(),
        record_metrics=False,
    )
    return run(start, target, cfg, rng=_trial_rng(seed, n, trial)).generations


def measure_cover_time(n: int, trials: int, seed: int = 0, workers: int = 1) -> CoverEstimate:
    """Moves a uniform walk needs to visit every cell of the ``n x n`` torus."""
    n = check_int(n, "n", 2)
    trials = check_int(trials, "trials", 1)
    samples = _map(_cover_trial, [(n, seed, t) for t in range(trials)], workers)
    mean, lo, hi = _mean_ci(samples)
    return CoverEstimate(n, trials, mean, lo, hi, samples)
