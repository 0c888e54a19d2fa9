import numpy as np
import pytest

from evotransition.image_model import TransitionState


def random_pair(m, n, seed=0):
    rng = np.random.default_rng(seed)
    start = rng.integers(0, 256, (m, n, 3), dtype=np.uint8)
    target = rng.integers(0, 256, (m, n, 3), dtype=np.uint8)
    return start, target


def differing_pair(m, n):
    start = np.zeros((m, n, 3), dtype=np.uint8)
    return start, np.full_like(start, 255)


def assert_consistent(state: TransitionState):
    """Cached counts and index pools agree with a brute-force scan of the mask."""
    mask = np.asarray(state.flat_mask)
    s, t = state.recount()
    assert (state.count_s, state.count_t) == (s, t)
    assert state.count_s + state.count_t == state.size
    assert np.all(mask[state.frozen])
    assert sorted(state.s_pixels().tolist()) == np.flatnonzero(~mask).tolist()
    assert sorted(state.t_pixels().tolist()) == np.flatnonzero(mask & ~state.frozen).tolist()


@pytest.fixture
def pair64():
    return random_pair(64, 64, seed=11)


# acceptance report --------------------------------------------------------------

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): an exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = marker.args
        _ACCEPTANCE[number] = (title, rep.outcome, item.user_properties)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, outcome, props = _ACCEPTANCE[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        detail = "; ".join(f"{k}={v}" for k, v in props)
        terminalreporter.write_line(f"[{verdict}] {number}. {title}" + (f" ({detail})" if detail else ""))
