"""OneMax-style objective and the elitist acceptance rule."""
from __future__ import annotations

import os

from .image_model import TransitionState

# Set EVOTRANSITION_DEBUG=1 to cross-check cached counts on every evaluation.
DEBUG = os.environ.get("EVOTRANSITION_DEBUG", "") not in ("", "0")


def fitness(state: TransitionState) -> int:
    """Number of pixels in target state."""
    if DEBUG:
        _, t = state.recount()
        assert t == state.count_t, f"cached count_t {state.count_t} != recount {t}"
    return state.count_t


def accepts(proposal_fitness: int, current_fitness: int) -> bool:
    # ties go to the offspring
    return proposal_fitness >= current_fitness


def accept(current: TransitionState, proposal: TransitionState) -> TransitionState:
    if not current.same_images(proposal):
        raise RuntimeError("accept() called with states over different image pairs")
    return proposal if accepts(fitness(proposal), fitness(current)) else current
