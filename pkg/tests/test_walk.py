import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import assert_consistent, differing_pair, random_pair
from evotransition.image_model import init_state, neighbors, to_flat, to_position
from evotransition.walk import (
    BIASED,
    UNIFORM,
    BiasTable,
    WalkCursor,
    biased_path,
    biased_probabilities,
    biased_step,
    gamma,
    run_walk,
    uniform_path,
    uniform_step,
)


def _within_5_sigma(counts, probs):
    counts = np.asarray(counts, float)
    total = counts.sum()
    for c, p in zip(counts, probs):
        sigma = math.sqrt(total * p * (1 - p))
        assert abs(c - total * p) <= 5 * sigma + 1e-9


def test_uniform_step_frequencies():
    rng = np.random.default_rng(0)
    cursor = WalkCursor((3, 4))
    nbrs = neighbors((3, 4), (6, 7))
    draws = [uniform_step(cursor, (6, 7), rng) for _ in range(100_000)]
    _within_5_sigma([draws.count(q) for q in nbrs], [0.25] * 4)


def test_uniform_step_degenerate_grids():
    rng = np.random.default_rng(1)
    cursor = WalkCursor((1, 1))
    assert {uniform_step(cursor, (1, 1), rng) for _ in range(50)} == {(1, 1)}
    draws = [uniform_step(cursor, (1, 2), rng) for _ in range(20_000)]
    _within_5_sigma([draws.count((1, 1)), draws.count((1, 2))], [0.5, 0.5])


def test_cursor_rejects_unknown_kind():
    with pytest.raises(ValueError):
        WalkCursor((1, 1), kind="levy")
    c = WalkCursor((1, 1))
    c.move_to((1, 2))
    assert c.steps_taken == 1 and c.pos == (1, 2)


def test_gamma_examples():
    t = np.zeros((1, 3, 3), np.uint8)
    t[0, 0] = (10, 20, 30)
    t[0, 1] = (13, 18, 30)
    t[0, 2] = (255, 255, 255)
    assert gamma(t, (1, 1), (1, 1)) == 0
    assert gamma(t, (1, 1), (1, 2)) == 5
    z = np.zeros((1, 2, 3), np.uint8)
    z[0, 1] = 255
    assert gamma(z, (1, 1), (1, 2)) == 765


def _cross(center, up, down, left, right):
    t = np.zeros((3, 3, 3), np.uint8)
    t[1, 1] = center
    t[0, 1], t[2, 1], t[1, 0], t[1, 2] = up, down, left, right
    return t


def test_biased_probabilities_examples():
    c = (100, 100, 100)
    t = _cross(c, (102, 100, 100), (101, 100, 100), (100, 99, 100), c)
    assert biased_probabilities(t, (2, 2)).tolist() == [0.5, 0.25, 0.25, 0.0]
    t = _cross(c, (110, 100, 100), (90, 100, 100), (100, 110, 100), (100, 100, 90))
    assert biased_probabilities(t, (2, 2)).tolist() == [0.25] * 4
    t = _cross(c, c, c, c, c)
    assert biased_probabilities(t, (2, 2)).tolist() == [0.25] * 4


def test_zero_weight_neighbor_never_chosen():
    c = (100, 100, 100)
    t = _cross(c, (102, 100, 100), (101, 100, 100), (100, 99, 100), c)
    rng = np.random.default_rng(3)
    cursor = WalkCursor((2, 2), kind=BIASED)
    draws = [biased_step(cursor, t, rng) for _ in range(20_000)]
    assert (2, 3) not in draws
    _within_5_sigma([draws.count(q) for q in [(1, 2), (3, 2), (2, 1)]], [0.5, 0.25, 0.25])


def test_duplicate_neighbors_keep_multiplicity():
    t = np.zeros((2, 3, 3), np.uint8)
    t[1, 0] = (30, 0, 0)
    t[0, 1] = (10, 0, 0)
    # from (1,1): up and down are both (2,1)
    probs = biased_probabilities(t, (1, 1))
    assert probs.tolist() == pytest.approx([30 / 70, 30 / 70, 0.0, 10 / 70])


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 5), st.integers(1, 5), st.just(3))))
def test_bias_probabilities_are_distributions(target):
    table = BiasTable(target)
    m, n = target.shape[:2]
    for flat in range(m * n):
        p = biased_probabilities(target, to_position(flat, (m, n)))
        assert np.all((p >= 0) & (p <= 1))
        assert p.sum() == pytest.approx(1.0)
        assert table.probabilities(flat) == pytest.approx(p)


def test_biased_on_constant_target_matches_uniform():
    target = np.full((9, 9, 3), 77, np.uint8)
    table = BiasTable(target)
    rng = np.random.default_rng(5)
    path = biased_path(0, 40_000, table, rng)
    nbrs = np.array(table.neighbors)
    prev = np.concatenate(([0], path[:-1]))
    moves = [np.count_nonzero(nbrs[prev, k] == path) for k in range(4)]
    _within_5_sigma(moves, [0.25] * 4)


def test_uniform_walk_has_zero_mean_displacement():
    rng = np.random.default_rng(8)
    m = n = 101
    steps = 100_000
    path = uniform_path(0, steps, (m, n), rng)
    rows, cols = np.divmod(np.concatenate(([0], path)), n)
    di = (np.diff(rows) + 1) % m - 1
    dj = (np.diff(cols) + 1) % n - 1
    # each coordinate moves with variance 1/2 per step
    bound = 5 * math.sqrt(steps / 2)
    assert abs(di.sum()) < bound and abs(dj.sum()) < bound
    assert np.all(np.abs(di) + np.abs(dj) == 1)


def test_run_walk_zero_steps_converts_start_only():
    state = init_state(*differing_pair(5, 5))
    after = run_walk(state, (3, 2), 0, UNIFORM, np.random.default_rng(0))
    assert after.count_t == 1
    assert after.mask[2, 1]
    assert state.count_t == 0


def test_run_walk_replays_transcript():
    dims = (4, 4)
    state = init_state(*differing_pair(*dims))
    after = run_walk(state, (2, 2), 3, UNIFORM, np.random.default_rng(42))
    moves = np.random.default_rng(42).integers(0, 4, size=3)
    pos, visited = (2, 2), {(2, 2)}
    for k in moves:
        pos = neighbors(pos, dims)[k]
        visited.add(pos)
    expected = np.zeros(16, bool)
    expected[[to_flat(p, dims) for p in visited]] = True
    assert np.array_equal(after.flat_mask, expected)


def test_biased_walk_replays_transcript():
    dims = (5, 5)
    s, t = random_pair(*dims, seed=2)
    state = init_state(s, t)
    after = run_walk(state, (1, 1), 6, BIASED, np.random.default_rng(4))
    us = np.random.default_rng(4).random(6)
    pos, visited = (1, 1), {(1, 1)}
    for u in us:
        cum = np.cumsum(biased_probabilities(t, pos))
        pos = neighbors(pos, dims)[int(np.searchsorted(cum, u, side="right"))]
        visited.add(pos)
    expected = state.frozen.copy()
    expected[[to_flat(p, dims) for p in visited]] = True
    assert np.array_equal(after.flat_mask, expected)


@pytest.mark.parametrize("kind", [UNIFORM, BIASED])
def test_walk_never_decreases_fitness(kind):
    state = init_state(*random_pair(12, 12, seed=6))
    rng = np.random.default_rng(1)
    for _ in range(30):
        before = state.flat_mask.copy()
        start = to_position(int(rng.integers(144)), (12, 12))
        state = run_walk(state, start, int(rng.integers(0, 40)), kind, rng)
        assert np.all(state.flat_mask[before])
        assert_consistent(state)


def test_long_uniform_walk_covers_everything():
    state = init_state(*differing_pair(6, 6))
    after = run_walk(state, (1, 1), 20_000, UNIFORM, np.random.default_rng(0))
    assert after.complete


def test_walk_rejects_negative_steps():
    state = init_state(*differing_pair(3, 3))
    with pytest.raises(ValueError):
        run_walk(state, (1, 1), -1, UNIFORM, np.random.default_rng(0))
