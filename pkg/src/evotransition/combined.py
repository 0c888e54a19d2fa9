"""Random-walk mutation and the asymmetric + walk alternation schemes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from . import mutation as mut
from .fitness import accept, accepts
from .image_model import TransitionState
from .mutation import AsymmetricParams, Flips
from .validation import ConfigurationError
from .walk import BIASED, UNIFORM, walk_in_place

ASYM = "asym"
STANDARD = "standard"
UNIFORM_WALK = "uniform-walk"
BIASED_WALK = "biased-walk"
EA_UNIFORM_WALK = "ea-uniform-walk"
EA_BIASED_WALK = "ea-biased-walk"
ASYM_UNIFORM_WALK = "asym-uniform-walk"
ASYM_BIASED_WALK = "asym-biased-walk"

SCHEMES = (
    ASYM,
    STANDARD,
    UNIFORM_WALK,
    BIASED_WALK,
    EA_UNIFORM_WALK,
    EA_BIASED_WALK,
    ASYM_UNIFORM_WALK,
    ASYM_BIASED_WALK,
)
PURE_WALKS = (UNIFORM_WALK, BIASED_WALK)
EA_WALKS = (EA_UNIFORM_WALK, EA_BIASED_WALK)
ALTERNATING = (ASYM_UNIFORM_WALK, ASYM_BIASED_WALK)

WALK_KIND = {
    UNIFORM_WALK: UNIFORM,
    BIASED_WALK: BIASED,
    EA_UNIFORM_WALK: UNIFORM,
    EA_BIASED_WALK: BIASED,
    ASYM_UNIFORM_WALK: UNIFORM,
    ASYM_BIASED_WALK: BIASED,
}

# Per-scheme defaults for (c_s, c_t, t_max, tau).
PRESETS = {
    ASYM: dict(c_s=100.0, c_t=50.0, t_max=0, tau=1),
    STANDARD: dict(c_s=1.0, c_t=1.0, t_max=0, tau=1),
    UNIFORM_WALK: dict(c_s=1.0, c_t=1.0, t_max=0, tau=1),
    BIASED_WALK: dict(c_s=1.0, c_t=1.0, t_max=0, tau=1),
    EA_UNIFORM_WALK: dict(c_s=1.0, c_t=1.0, t_max=100, tau=1),
    EA_BIASED_WALK: dict(c_s=1.0, c_t=1.0, t_max=100, tau=1),
    ASYM_UNIFORM_WALK: dict(c_s=100.0, c_t=50.0, t_max=2000, tau=1),
    ASYM_BIASED_WALK: dict(c_s=100.0, c_t=50.0, t_max=2000, tau=1),
}


@dataclass(frozen=True)
class OperatorConfig:
    scheme: str = ASYM
    asym: AsymmetricParams = field(default_factory=AsymmetricParams)
    t_max: int = 0
    tau: int = 1

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; choose from {', '.join(SCHEMES)}")
        if self.t_max < 0:
            raise ConfigurationError(f"t_max must be >= 0, got {self.t_max}")
        if self.tau < 1:
            raise ConfigurationError(f"tau must be >= 1, got {self.tau}")

    @classmethod
    def preset(cls, scheme: str, **overrides) -> "OperatorConfig":
        """Config for ``scheme`` with the reference parameters filled in."""
        if scheme not in PRESETS:
            raise ConfigurationError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
        values = dict(PRESETS[scheme])
        values.update({k: v for k, v in overrides.items() if v is not None})
        asym = AsymmetricParams(values.pop("c_s"), values.pop("c_t"))
        return cls(scheme=scheme, asym=asym, **values)

    @property
    def walk_kind(self) -> str | None:
        return WALK_KIND.get(self.scheme)


class StepRecord(NamedTuple):
    """What one generation proposed.

    ``flips_st``/``flips_ts`` count proposed flips summed over every
    proposal of the generation (walk conversions count as s->t flips);
    ``accepted`` is true when every proposal was taken.
    """

    flips_st: int
    flips_ts: int
    accepted: bool


def _commit(state: TransitionState, flips: Flips) -> bool:
    f = state.count_t
    if accepts(f + flips.gain, f):
        state.apply_flips(flips.to_t, flips.to_s)
        return True
    return False


def walk_mutation_in_place(state: TransitionState, kind: str, t_max: int, rng) -> int:
    """Walk ``t_max`` moves from a uniformly random pixel; returns conversions.

    A walk only ever converts s->t, so the acceptance test always passes and
    the walk is applied directly.
    """
    start = int(rng.integers(0, state.size))
    _, converted = walk_in_place(state, start, t_max, kind, rng)
    return converted


def walk_mutation(state: TransitionState, kind: str, t_max: int, rng) -> TransitionState:
    proposal = state.copy()
    walk_mutation_in_place(proposal, kind, t_max, rng)
    return accept(state, proposal)


PixelOp = Callable[[TransitionState, object], Flips]


def generation_step(
    state: TransitionState,
    cfg: OperatorConfig,
    generation: int,
    rng,
    pixel_op: PixelOp | None = None,
) -> StepRecord:
    """Advance ``state`` in place by one generation of a non-pure-walk scheme.

    For the alternating schemes the order is: pixel proposal, accept, then
    (on generations divisible by ``tau``) walk mutation, accept.
    ``pixel_op`` replaces the asymmetric operator of alternating schemes.
    """
    scheme = cfg.scheme
    if scheme == ASYM:
        flips = mut.propose_asymmetric(state, cfg.asym, rng)
        return StepRecord(len(flips.to_t), len(flips.to_s), _commit(state, flips))
    if scheme == STANDARD:
        flips = mut.propose_standard(state, rng)
        return StepRecord(len(flips.to_t), len(flips.to_s), _commit(state, flips))
    if scheme in EA_WALKS:
        converted = walk_mutation_in_place(state, cfg.walk_kind, cfg.t_max, rng)
        return StepRecord(converted, 0, True)
    if scheme in ALTERNATING:
        if pixel_op is None:
            flips = mut.propose_asymmetric(state, cfg.asym, rng)
        else:
            flips = pixel_op(state, rng)
        ok = _commit(state, flips)
        st, ts = len(flips.to_t), len(flips.to_s)
        if generation % cfg.tau == 0:
            st += walk_mutation_in_place(state, cfg.walk_kind, cfg.t_max, rng)
        return StepRecord(st, ts, ok)
    raise ConfigurationError(f"scheme {scheme!r} is a pure walk; drive it with the engine")


def alternating_step(state: TransitionState, cfg: OperatorConfig, generation: int, rng) -> TransitionState:
    """One alternating generation on a copy of ``state``."""
    if cfg.scheme not in ALTERNATING:
        raise ConfigurationError(f"alternating_step needs one of {ALTERNATING}, got {cfg.scheme!r}")
    child = state.copy()
    generation_step(child, cfg, generation, rng)
    return child
