"""Switching control laws on the terminal surface.

Three laws are provided, each as a pure step function and as a small
stateful controller object that the simulation engine drives once per
control sample:

* terminal:       u = -U sign(sigma)
* sub-optimal:    u = -gamma U sign(sigma - beta sigma_M)
* energy-saving:  u = -U/2 sign(sigma - beta1 sigma_M) - U/2 sign(sigma - beta2 sigma_M)

``sigma_M`` is the last extremal value of sigma. It is tracked by
:func:`update_extremum`, a slope-reversal detector with a hysteresis band and
peak hold, so measurement noise does not reset the switching thresholds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError, FeasibilityError
from .surface import sign


class Phase(enum.Enum):
    INITIALIZING = "initializing"
    RUNNING = "running"


@dataclass(frozen=True)
class SubOptimalParams:
    """Classic sub-optimal law. ``gamma_star = 1`` for saturated control."""

    beta: float = 0.85
    gamma_star: float = 1.0
    u_max: float = 0.8
    # optional gain-uncertainty data; when given, gamma_star is checked against the bound
    disturbance_bound: Optional[float] = None
    gain_min: Optional[float] = None
    gain_max: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ConfigError(f"beta must lie in [0, 1), got {self.beta!r}")
        if not self.u_max > 0.0:
            raise ConfigError(f"u_max must be > 0, got {self.u_max!r}")
        if not self.gamma_star >= 1.0:
            raise ConfigError(f"gamma_star must be >= 1, got {self.gamma_star!r}")
        if None not in (self.disturbance_bound, self.gain_min, self.gain_max):
            floor = gamma_star_lower_bound(
                self.beta, self.disturbance_bound, self.u_max, self.gain_min, self.gain_max
            )
            if floor > 1.0 and not self.gamma_star > floor:
                raise ConfigError(f"gamma_star must exceed {floor:.6g} for the given bounds")


@dataclass(frozen=True)
class EnergySavingParams:
    """Two-threshold energy-saving law.

    ``disturbance_bound`` is expressed in the same units as ``u_max`` (for the
    voice-coil plant: D / K in volts).
    """

    beta1: float = 0.85
    beta2: float = 0.1
    u_max: float = 0.8
    disturbance_bound: float = 0.0

    def __post_init__(self):
        if not self.u_max > 0.0:
            raise ConfigError(f"u_max must be > 0, got {self.u_max!r}")
        if not self.disturbance_bound >= 0.0:
            raise ConfigError(f"disturbance_bound must be >= 0, got {self.disturbance_bound!r}")
        check = feasibility_check(self.beta1, self.beta2, self.disturbance_bound, self.u_max)
        if not check.feasible:
            raise FeasibilityError(check.violations)


@dataclass
class ControllerState:
    sigma_m: float = 0.0
    phase: Phase = Phase.INITIALIZING
    last_sigma: Optional[float] = None
    last_dsigma_sign: int = 0
    sigma0: float = 0.0
    candidate: float = 0.0
    extrema: int = 0

    @classmethod
    def start(cls, sigma0: float, *, at_rest: bool = False) -> "ControllerState":
        """Memory at t = 0 with sigma_M := sigma(0).

        ``at_rest`` marks a start with zero velocity: sigma(0) is then itself an
        extremum, so the initializing action is skipped.
        """
        phase = Phase.RUNNING if at_rest else Phase.INITIALIZING
        return cls(sigma_m=sigma0, phase=phase, last_sigma=sigma0, sigma0=sigma0, candidate=sigma0)


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    violations: tuple = field(default_factory=tuple)

    def __bool__(self):
        return self.feasible


def terminal_step(sigma: float, u_max: float) -> float:
    return -u_max * sign(sigma)


def suboptimal_step(sigma: float, state: ControllerState, params: SubOptimalParams) -> float:
    shifted = sigma - params.beta * state.sigma_m
    gamma = 1.0 if shifted * state.sigma_m >= 0.0 else params.gamma_star
    return -gamma * params.u_max * sign(shifted)


def energy_saving_step(sigma: float, state: ControllerState, params: EnergySavingParams) -> float:
    half = 0.5 * params.u_max
    sm = state.sigma_m
    return -half * sign(sigma - params.beta1 * sm) - half * sign(sigma - params.beta2 * sm)


def init_step(sigma: float, state: ControllerState, u_max: float) -> float:
    """Initializing action, applied until the first extremum is detected."""
    return -u_max * sign(sigma - state.sigma0)


def update_extremum(sigma: float, state: ControllerState, hysteresis: float = 0.0) -> ControllerState:
    """Track the last extremum of a noisy sigma sequence.

    A trend direction is held together with the running extreme value in that
    direction (peak hold). A reversal is accepted once sigma has retreated from
    the held value by more than ``hysteresis``; the held value then becomes
    sigma_M, provided it differs from the previous sigma_M by more than the
    same band. The first accepted extremum ends the initializing phase.

    The state is updated in place and returned.
    """
    if state.last_sigma is None:
        state.last_sigma = sigma
        state.candidate = sigma
        return state

    trend = state.last_dsigma_sign
    held = state.candidate
    if trend > 0:
        if sigma >= held:
            state.candidate = sigma
        elif held - sigma > hysteresis:
            _commit(state, held, hysteresis)
            state.last_dsigma_sign = -1
            state.candidate = sigma
    elif trend < 0:
        if sigma <= held:
            state.candidate = sigma
        elif sigma - held > hysteresis:
            _commit(state, held, hysteresis)
            state.last_dsigma_sign = 1
            state.candidate = sigma
    else:
        if sigma - held > hysteresis:
            state.last_dsigma_sign = 1
            state.candidate = sigma
        elif held - sigma > hysteresis:
            state.last_dsigma_sign = -1
            state.candidate = sigma
    state.last_sigma = sigma
    return state


def _commit(state: ControllerState, extremum: float, hysteresis: float) -> None:
    if abs(extremum - state.sigma_m) > hysteresis:
        state.sigma_m = extremum
        state.extrema += 1
        state.phase = Phase.RUNNING


def gamma_star_lower_bound(beta: float, D: float, U: float, K_m: float, K_M: float) -> float:
    """Smallest admissible modulation factor under gain uncertainty K in [K_m, K_M]."""
    if not 0.0 < K_m <= K_M:
        raise ConfigError(f"need 0 < K_m <= K_M, got K_m={K_m!r}, K_M={K_M!r}")
    if not U > D / K_m:
        raise ConfigError(f"insufficient control authority: U={U!r} <= D/K_m={D / K_m!r}")
    return max(1.0, (2.0 * D + (1.0 - beta) * K_M * U) / ((1.0 + beta) * K_m * U))


def feasibility_check(beta1: float, beta2: float, D: float, U: float) -> Feasibility:
    """Convergence conditions for the energy-saving thresholds (the admissible triangle)."""
    if not U > 0.0:
        raise ConfigError(f"U must be > 0, got {U!r}")
    violations = []
    if not beta1 + beta2 > 2.0 * D / U:
        violations.append("β₁ + β₂ > 2D/U")
    if not beta1 >= 0.0:
        violations.append("0 ≤ β₁")
    if not beta1 < 1.0:
        violations.append("β₁ < 1")
    if not beta2 > -1.0:
        violations.append("−1 < β₂")
    if not beta2 < beta1:
        violations.append("β₂ < β₁")
    return Feasibility(not violations, tuple(violations))


class TerminalController:
    """Relay on the terminal surface; keeps no switching memory."""

    kind = "terminal"

    def __init__(self, u_max: float):
        self.u_max = u_max
        self.state = ControllerState()

    def reset(self, sigma0: float, detect0: Optional[float] = None, at_rest: bool = False):
        self.state = ControllerState.start(sigma0, at_rest=True)

    def __call__(self, sigma: float, detect: Optional[float] = None) -> float:
        return terminal_step(sigma, self.u_max)


class _MemoryController:
    """Shared driver for the two laws that switch on sigma_M.

    ``detect`` is sigma evaluated on the detection channel (a slower state
    estimate); the extremum detector runs on it when provided, the switching
    law always compares the fast sigma against the thresholds.
    """

    def __init__(self, hysteresis: float = 0.0):
        if not hysteresis >= 0.0 or not math.isfinite(hysteresis):
            raise ConfigError(f"hysteresis must be finite and >= 0, got {hysteresis!r}")
        self.hysteresis = hysteresis
        self.state = ControllerState()

    def reset(self, sigma0: float, detect0: Optional[float] = None, at_rest: bool = False):
        anchor = sigma0 if detect0 is None else detect0
        self.state = ControllerState.start(anchor, at_rest=at_rest)
        self.state.sigma0 = sigma0

    def __call__(self, sigma: float, detect: Optional[float] = None) -> float:
        update_extremum(sigma if detect is None else detect, self.state, self.hysteresis)
        if self.state.phase is Phase.INITIALIZING:
            return init_step(sigma, self.state, self.u_max)
        return self._law(sigma)


class SubOptimalController(_MemoryController):
    kind = "suboptimal"

    def __init__(self, params: SubOptimalParams, hysteresis: float = 0.0):
        super().__init__(hysteresis)
        self.params = params
        self.u_max = params.u_max

    def _law(self, sigma):
        return suboptimal_step(sigma, self.state, self.params)


class EnergySavingController(_MemoryController):
    kind = "energy_saving"

    def __init__(self, params: EnergySavingParams, hysteresis: float = 0.0):
        super().__init__(hysteresis)
        self.params = params
        self.u_max = params.u_max

    def _law(self, sigma):
        return energy_saving_step(sigma, self.state, self.params)
