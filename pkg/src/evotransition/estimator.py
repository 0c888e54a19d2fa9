"""scikit-learn style wrapper around the run loop.

>>> est = ImageTransition(scheme="ea-uniform-walk", random_state=0)
>>> frames = est.fit_transform(start, target)      # doctest: +SKIP
>>> est.n_generations_, est.completed_              # doctest: +SKIP
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .combined import OperatorConfig
from .engine import DEFAULT_MILESTONES, RunConfig, run
from .validation import check_image, check_image_pair


class ImageTransition(TransformerMixin, BaseEstimator):
    """Evolve a start image into a target image.

    ``fit(start, target)`` runs the configured scheme and stores the run;
    ``transform`` returns the milestone frames as an ``(k, m, n, 3)`` stack.
    ``c_s``, ``c_t``, ``t_max`` and ``tau`` left as ``None`` take the scheme's
    reference values.

    Attributes set by ``fit``: ``result_``, ``metrics_``, ``milestone_frames_``,
    ``final_image_``, ``n_generations_``, ``completed_``, ``seed_``.
    """

    def __init__(
        self,
        scheme="asym",
        c_s=None,
        c_t=None,
        t_max=None,
        tau=None,
        max_generations=None,
        milestones=DEFAULT_MILESTONES,
        snap_final=False,
        random_state=None,
    ):
        self.scheme = scheme
        self.c_s = c_s
        self.c_t = c_t
        self.t_max = t_max
        self.tau = tau
        self.max_generations = max_generations
        self.milestones = milestones
        self.snap_final = snap_final
        self.random_state = random_state

    def _run_config(self) -> RunConfig:
        operator = OperatorConfig.preset(self.scheme, c_s=self.c_s, c_t=self.c_t, t_max=self.t_max, tau=self.tau)
        seed = self.random_state
        if isinstance(seed, np.random.RandomState):
            seed = int(seed.randint(2**31))
        return RunConfig(
            operator=operator,
            seed=seed,
            max_generations=self.max_generations,
            milestones=tuple(self.milestones),
            snap_final=self.snap_final,
        )

    def fit(self, X, y):
        start, target = check_image_pair(X, y)
        cfg = self._run_config()
        rng = self.random_state if isinstance(self.random_state, np.random.Generator) else None
        result = run(start, target, cfg, rng=rng)
        self.result_ = result
        self.metrics_ = result.metrics
        self.milestone_frames_ = result.milestone_frames
        self.final_image_ = result.final_image
        self.n_generations_ = result.generations
        self.completed_ = result.completed
        self.seed_ = result.seed
        self.image_shape_ = start.shape
        return self

    def transform(self, X):
        check_is_fitted(self, "result_")
        if X is not None:
            X = check_image(X, "X")
            if X.shape != self.image_shape_:
                raise ValueError(f"X has shape {X.shape}, the fitted run used {self.image_shape_}")
        frames = [image for _, (_, image) in sorted(self.milestone_frames_.items())]
        if not frames:
            return np.empty((0,) + self.image_shape_, dtype=np.uint8)
        return np.stack(frames)

    def score(self, X=None, y=None) -> float:
        """Fraction of pixels in target state at the end of the run."""
        check_is_fitted(self, "result_")
        state = self.result_.final_state
        return state.count_t / state.size

    @property
    def milestone_generations_(self) -> dict[float, int]:
        check_is_fitted(self, "result_")
        return {f: g for f, (g, _) in sorted(self.milestone_frames_.items())}

    def __sklearn_is_fitted__(self) -> bool:
        return hasattr(self, "result_")

