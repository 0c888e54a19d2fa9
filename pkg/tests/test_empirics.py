import io
import math

import numpy as np
import pytest
from scipy import stats

from evotransition.empirics import (
    cover_bound,
    fit_loglog,
    measure_cover_time,
    measure_drift,
    measure_runtime_scaling,
    prepared_state,
    synthetic_pair,
)
from evotransition.mutation import AsymmetricParams
from evotransition.validation import ConfigurationError


def exact_drift(n_s, n_t, p_s, p_t):
    """E[max(A - B, 0)] for independent A ~ Bin(n_s, p_s), B ~ Bin(n_t, p_t)."""
    a = stats.binom.pmf(np.arange(n_s + 1), n_s, p_s)
    b = stats.binom.pmf(np.arange(n_t + 1), n_t, p_t)
    gain = np.subtract.outer(np.arange(n_s + 1), np.arange(n_t + 1))
    return float((np.outer(a, b) * np.clip(gain, 0, None)).sum())


def test_synthetic_pair_shapes():
    s, t = synthetic_pair(64)
    assert s.shape == (8, 8, 3) and np.all(s != t)
    assert synthetic_pair(10)[0].shape == (1, 10, 3)


def test_prepared_state_fraction():
    state = prepared_state(1000, 0.3, np.random.default_rng(0))
    assert state.count_t == 300


def test_scaling_small_sizes():
    report = measure_runtime_scaling("asym", [64, 256, 1024], 30, seed=3)
    assert report.trials == 30 and len(report.samples[0]) == 30
    assert all(lo <= m <= hi for m, lo, hi in zip(report.mean_runtimes, report.ci_low, report.ci_high))
    assert 0.7 < report.slope < 1.3
    assert report.slope_ci[0] <= report.slope <= report.slope_ci[1]
    buf = io.StringIO()
    report.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n,mean_generations,ci_low,ci_high"
    assert [int(l.split(",")[0]) for l in lines[1:]] == [64, 256, 1024]


def test_scaling_is_deterministic_and_schedule_free():
    a = measure_runtime_scaling("standard", [16, 64], 30, seed=8)
    b = measure_runtime_scaling("standard", [16, 64], 30, seed=8, workers=2)
    assert a.samples == b.samples
    assert a.slope == b.slope


def test_scaling_errors():
    with pytest.raises(ConfigurationError, match="slope"):
        measure_runtime_scaling("asym", [1024], 30)
    with pytest.raises(ConfigurationError, match="trials"):
        measure_runtime_scaling("asym", [64, 256], 10)
    with pytest.raises(ConfigurationError):
        measure_runtime_scaling("uniform-walk", [64, 256], 30)


def test_fit_loglog_recovers_power():
    sizes = [10, 100, 1000]
    slope, intercept, _ = fit_loglog(sizes, [3 * n**1.5 for n in sizes])
    assert slope == pytest.approx(1.5)
    assert intercept == pytest.approx(math.log(3))


@pytest.mark.parametrize("scheme", ["asym", "standard"])
def test_drift_is_zero_at_the_optimum(scheme):
    est = measure_drift(scheme, 1.0, 5000, seed=1, size=256)
    assert est.k == 0
    assert est.mean == 0.0


@pytest.mark.parametrize("fraction", [0.5, 0.9])
def test_standard_drift_matches_exact_value(fraction):
    size, trials = 4096, 100_000
    est = measure_drift("standard", fraction, trials, seed=2, size=size)
    k = est.k
    assert k == round(size * (1 - fraction))
    expected = exact_drift(k, size - k, 1 / size, 1 / size)
    se = (est.ci_high - est.ci_low) / (2 * 1.959963984540054)
    assert abs(est.mean - expected) < 5 * se


def test_standard_drift_small_k_is_linear():
    size = 4096
    d10 = exact_drift(410, size - 410, 1 / size, 1 / size)
    d50 = exact_drift(82, size - 82, 1 / size, 1 / size)
    assert d10 / d50 == pytest.approx(5, rel=0.3)
    # outside the small-k regime the ratio is far from k/k'
    d2 = exact_drift(2048, 2048, 1 / size, 1 / size)
    assert d2 / d10 > 6.5


def test_asym_drift_is_flat():
    params = AsymmetricParams(1, 1)
    half = measure_drift("asym", 0.5, 50_000, seed=3, params=params)
    late = measure_drift("asym", 0.9, 50_000, seed=3, params=params)
    assert half.mean > 0 and late.mean > 0
    assert 1 / 3 <= half.mean / late.mean <= 3
    expected = exact_drift(410, 3686, 1 / 820, 1 / 7372)
    assert late.mean == pytest.approx(expected, rel=0.05)


def test_cover_time_small_torus():
    est = measure_cover_time(2, 200, seed=0)
    assert min(est.samples) >= 3
    est = measure_cover_time(5, 50, seed=1)
    assert min(est.samples) >= 24
    assert est.ci_low <= est.mean <= est.ci_high
    assert measure_cover_time(5, 50, seed=1).samples == est.samples


def test_cover_time_errors():
    with pytest.raises(ConfigurationError):
        measure_cover_time(4, 0)
    with pytest.raises(ConfigurationError):
        measure_cover_time(1, 5)


def test_cover_bounds():
    assert cover_bound(8) == pytest.approx(4 * 64 * math.log(8) ** 2 / math.pi)
    assert cover_bound(8, math.log2) == pytest.approx(4 * 64 * 9 / math.pi)
    est = measure_cover_time(3, 5, seed=0)
    assert est.bound_ln == cover_bound(3) and est.bound_log2 == cover_bound(3, math.log2)
