"""Voice-coil plant: moving mass with gravity and matched disturbance, driven
through a first-order actuator lag.

    m x'' = v - G + d
    mu v' = K u - v

Gravity is oriented against +x so that the positive compensation voltage
u_gr cancels it (K u_gr = 5.28 N against G = 5.27 N). The lag is integrated
with its exact exponential solution under zero-order-hold input, the
mechanical part with classical RK4 using the exact lag output at each stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, SimulationError
from .surface import sign as _sign

DISTURBANCE_COMPONENTS = ("constant", "cogging", "random", "worst_case")


@dataclass(frozen=True)
class PlantParams:
    mass: float = 0.538
    input_gain: float = 3.28
    gravity: float = 5.27
    actuator_tau: float = 0.0012
    disturbance_bound: float = 1.0
    sensor_noise_std: float = 4.58e-5
    gravity_comp: float = 1.61

    def __post_init__(self):
        for name in ("mass", "input_gain", "actuator_tau"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"plant.{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("disturbance_bound", "sensor_noise_std"):
            if not getattr(self, name) >= 0.0:
                raise ConfigError(f"plant.{name} must be >= 0, got {getattr(self, name)!r}")
        for name in ("gravity", "gravity_comp"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"plant.{name} must be finite")

    @property
    def net_gravity(self) -> float:
        """Residual static force once the compensation voltage is applied."""
        return self.input_gain * self.gravity_comp - self.gravity


@dataclass(frozen=True)
class DisturbanceModel:
    """Matched disturbance d(t), clamped to the plant bound D.

    ``kind`` is ``"none"`` or a ``+``-joined list of components:

    * ``constant``   -- fixed bias (N)
    * ``cogging``    -- amplitude * sin(2 pi x / period), position dependent
    * ``random``     -- seeded Gaussian noise through a first-order low-pass of
      the given bandwidth, stationary std = bound / 3, clamped to +-bound
    * ``worst_case`` -- -D sign(u_sm): full bound against the switching control
    """

    kind: str = "cogging+random"
    bias: float = 0.0
    cogging_amplitude: float = 0.6
    cogging_period: float = 0.005
    random_bound: float = 0.4
    random_bandwidth: float = 50.0
    seed: int = 0

    def __post_init__(self):
        parts = self.components
        unknown = [p for p in parts if p not in DISTURBANCE_COMPONENTS]
        if unknown:
            raise ConfigError(f"unknown disturbance component(s): {', '.join(unknown)}")
        if "cogging" in parts and not self.cogging_period > 0.0:
            raise ConfigError("disturbance.cogging_period must be > 0")
        if "random" in parts and not (self.random_bound >= 0.0 and self.random_bandwidth > 0.0):
            raise ConfigError("disturbance.random_bound must be >= 0 and random_bandwidth > 0")

    @property
    def components(self) -> tuple:
        if self.kind.strip().lower() in ("", "none"):
            return ()
        return tuple(p.strip().lower() for p in self.kind.split("+"))

    def make_rng(self) -> np.random.Generator:
        # separate stream from the sensor noise
        return np.random.default_rng([self.seed, 0xD157])


@dataclass(frozen=True)
class PlantState:
    position: float = 0.0
    velocity: float = 0.0
    actuator: float = 0.0
    disturbance_phase: float = 0.0

    def is_finite(self) -> bool:
        return all(map(math.isfinite, (self.position, self.velocity, self.actuator)))


def disturbance_eval(model: DisturbanceModel, state: PlantState, t: float, bound: float,
                     u_sm: float = 0.0) -> float:
    """Disturbance force at the given state, clamped to ``[-bound, bound]``.

    ``t`` is accepted for time-varying extensions; the current components
    depend on position, the random filter state held in ``state`` and the
    switching control only.
    """
    d = 0.0
    for part in model.components:
        if part == "constant":
            d += model.bias
        elif part == "cogging":
            d += model.cogging_amplitude * math.sin(2.0 * math.pi * state.position / model.cogging_period)
        elif part == "random":
            d += state.disturbance_phase
        elif part == "worst_case":
            d -= bound * _sign(u_sm)
    return min(bound, max(-bound, d))


def advance_disturbance(model: DisturbanceModel, state: PlantState, rng: np.random.Generator,
                        dt: float) -> PlantState:
    """Advance the random component's filter state over one control period."""
    if "random" not in model.components:
        return state
    a = math.exp(-2.0 * math.pi * model.random_bandwidth * dt)
    scale = model.random_bound / 3.0
    value = a * state.disturbance_phase + math.sqrt(1.0 - a * a) * scale * rng.standard_normal()
    value = min(model.random_bound, max(-model.random_bound, value))
    return replace(state, disturbance_phase=value)


def initial_disturbance_state(model: DisturbanceModel, rng: np.random.Generator) -> float:
    if "random" not in model.components:
        return 0.0
    value = model.random_bound / 3.0 * rng.standard_normal()
    return min(model.random_bound, max(-model.random_bound, value))


def plant_step(state: PlantState, u: float, params: PlantParams, model: DisturbanceModel,
               dt: float, substeps: int = 1, t: float = 0.0, u_sm: float = 0.0) -> PlantState:
    """Advance the plant over one hold interval ``dt`` with constant input ``u``.

    The random disturbance value and the worst-case sign are held over the
    interval; the cogging force is re-evaluated at every RK4 stage.
    """
    if not dt > 0.0:
        raise ConfigError(f"dt must be > 0, got {dt!r}")
    if not math.isfinite(u):
        raise SimulationError(f"non-finite control input {u!r}")
    m = params.mass
    mu = params.actuator_tau
    target = params.input_gain * u
    g = -params.gravity
    bound = params.disturbance_bound
    h = dt / substeps
    decay_half = math.exp(-0.5 * h / mu)
    decay = decay_half * decay_half

    # position-independent part of d is fixed over the hold
    cogging = "cogging" in model.components
    d_fixed = 0.0
    for part in model.components:
        if part == "constant":
            d_fixed += model.bias
        elif part == "random":
            d_fixed += state.disturbance_phase
        elif part == "worst_case":
            d_fixed -= bound * _sign(u_sm)
    if cogging:
        k_cog = 2.0 * math.pi / model.cogging_period
        amp = model.cogging_amplitude

        def force(x):
            return min(bound, max(-bound, d_fixed + amp * math.sin(k_cog * x)))
    else:
        d_const = min(bound, max(-bound, d_fixed))

        def force(x):
            return d_const

    x, xd, v = state.position, state.velocity, state.actuator
    for _ in range(substeps):
        e0 = v - target
        v_mid = target + e0 * decay_half
        v_end = target + e0 * decay
        a1 = (v + g + force(x)) / m
        x2 = x + 0.5 * h * xd
        xd2 = xd + 0.5 * h * a1
        a2 = (v_mid + g + force(x2)) / m
        x3 = x + 0.5 * h * xd2
        xd3 = xd + 0.5 * h * a2
        a3 = (v_mid + g + force(x3)) / m
        x4 = x + h * xd3
        xd4 = xd + h * a3
        a4 = (v_end + g + force(x4)) / m
        x += h / 6.0 * (xd + 2.0 * xd2 + 2.0 * xd3 + xd4)
        xd += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        v = v_end

    new = PlantState(x, xd, v, state.disturbance_phase)
    if not new.is_finite():
        raise SimulationError(f"numerical blow-up at t={t:.6g}: state={new}")
    return new


def measure(state: PlantState, params: PlantParams, rng: np.random.Generator | None) -> float:
    """Position reading with additive zero-mean Gaussian noise."""
    if params.sensor_noise_std == 0.0 or rng is None:
        return state.position
    return state.position + params.sensor_noise_std * rng.standard_normal()

