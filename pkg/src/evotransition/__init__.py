"""Evolutionary image transition: (1+1) EA mutations and torus random walks
that move a start image pixel by pixel into a target image."""

from .combined import SCHEMES, OperatorConfig, alternating_step, walk_mutation
from .engine import FramePolicy, RunConfig, RunMetrics, RunResult, run
from .estimator import ImageTransition
from .fitness import accept, fitness
from .image_model import TransitionState, compose, init_state, neighbors
from .mutation import AsymmetricParams, asymmetric_mutation, standard_mutation
from .validation import ConfigurationError
from .walk import WalkCursor, biased_step, gamma, run_walk, uniform_step

__version__ = "0.1.0"

__all__ = [
    "SCHEMES",
    "AsymmetricParams",
    "ConfigurationError",
    "FramePolicy",
    "ImageTransition",
    "OperatorConfig",
    "RunConfig",
    "RunMetrics",
    "RunResult",
    "TransitionState",
    "WalkCursor",
    "accept",
    "alternating_step",
    "asymmetric_mutation",
    "biased_step",
    "compose",
    "fitness",
    "gamma",
    "init_state",
    "neighbors",
    "run",
    "run_walk",
    "standard_mutation",
    "uniform_step",
    "walk_mutation",
]
