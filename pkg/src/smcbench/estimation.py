"""Velocity reconstruction: backward difference followed by a second-order LPF.

The filter is w'' + 2 wc w' + wc^2 w = wc^2 * input (two real poles at -wc,
unit DC gain). It is integrated with classical RK4 over ``substeps``
sub-intervals of each sample, holding the input constant over the sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigError

# per-substep bound on h * wc for the RK4 realization
MAX_STEP_CUTOFF_PRODUCT = 0.5


@dataclass
class LpfState:
    w: float = 0.0
    w_dot: float = 0.0
    cutoff: float = 1000.0
    last_x: float | None = None

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.cutoff


def differentiate(x_now: float, x_prev: float, dt: float) -> float:
    if not dt > 0.0:
        raise ConfigError(f"dt must be > 0, got {dt!r}")
    return (x_now - x_prev) / dt


def settling_time(cutoff: float) -> float:
    """Rule-of-thumb 1 % settling time 4.6 / wc of the velocity filter."""
    if not cutoff > 0.0:
        raise ConfigError(f"cutoff must be > 0, got {cutoff!r}")
    return 4.6 / (2.0 * math.pi * cutoff)


def exact_settling_time(cutoff: float, tol: float = 0.01) -> float:
    """1 % settling time of the exact step response 1 - (1 + wc t) exp(-wc t)."""
    # solve (1 + y) exp(-y) = tol by Newton from the first-order guess
    y = -math.log(tol) + 1.0
    for _ in range(50):
        f = (1.0 + y) * math.exp(-y) - tol
        df = -y * math.exp(-y)
        step = f / df
        y -= step
        if abs(step) < 1e-15 * y:
            break
    return y / (2.0 * math.pi * cutoff)


def check_stability(cutoff: float, dt: float, substeps: int) -> None:
    if not cutoff > 0.0:
        raise ConfigError(f"cutoff must be > 0, got {cutoff!r}")
    if substeps < 1:
        raise ConfigError(f"substeps must be >= 1, got {substeps!r}")
    product = 2.0 * math.pi * cutoff * dt / substeps
    if not product < MAX_STEP_CUTOFF_PRODUCT:
        raise ConfigError(
            f"filter step too coarse: dt*wc/substeps = {product:.3g} "
            f"(must stay below {MAX_STEP_CUTOFF_PRODUCT}); raise filter substeps"
        )


def rk4_lpf(w: float, w_dot: float, value: float, omega: float, h: float, n: int):
    """Advance the filter ``n`` RK4 steps of size ``h`` with constant input."""
    wc2 = omega * omega
    two_wc = 2.0 * omega
    for _ in range(n):
        a1 = wc2 * (value - w) - two_wc * w_dot
        w2 = w + 0.5 * h * w_dot
        d2 = w_dot + 0.5 * h * a1
        a2 = wc2 * (value - w2) - two_wc * d2
        w3 = w + 0.5 * h * d2
        d3 = w_dot + 0.5 * h * a2
        a3 = wc2 * (value - w3) - two_wc * d3
        w4 = w + h * d3
        d4 = w_dot + h * a3
        a4 = wc2 * (value - w4) - two_wc * d4
        w += h / 6.0 * (w_dot + 2.0 * d2 + 2.0 * d3 + d4)
        w_dot += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return w, w_dot


def lpf_step(state: LpfState, raw_value: float, dt: float, substeps: int = 4) -> LpfState:
    """One sample of the filter; returns a new state."""
    check_stability(state.cutoff, dt, substeps)
    w, w_dot = rk4_lpf(state.w, state.w_dot, raw_value, state.omega, dt / substeps, substeps)
    return replace(state, w=w, w_dot=w_dot)


class VelocityEstimator:
    """Backward difference of measured position, then the LPF."""

    def __init__(self, cutoff: float = 1000.0, dt: float = 1e-4, substeps: int = 4):
        check_stability(cutoff, dt, substeps)
        self.dt = dt
        self.substeps = substeps
        self.omega = 2.0 * math.pi * cutoff
        self.cutoff = cutoff
        self.w = 0.0
        self.w_dot = 0.0
        self.last_x: float | None = None

    def __call__(self, x_measured: float) -> float:
        prev = x_measured if self.last_x is None else self.last_x
        raw = (x_measured - prev) / self.dt
        self.last_x = x_measured
        self.w, self.w_dot = rk4_lpf(
            self.w, self.w_dot, raw, self.omega, self.dt / self.substeps, self.substeps
        )
        return self.w

    @property
    def state(self) -> LpfState:
        return LpfState(self.w, self.w_dot, self.cutoff, self.last_x)


class PositionSmoother:
    """Same filter applied to the measured position, started at the first sample."""

    def __init__(self, cutoff: float = 100.0, dt: float = 1e-4, substeps: int = 4):
        check_stability(cutoff, dt, substeps)
        self.dt = dt
        self.substeps = substeps
        self.omega = 2.0 * math.pi * cutoff
        self.value: float | None = None
        self.rate = 0.0

    def __call__(self, x_measured: float) -> float:
        if self.value is None:
            self.value = x_measured
        self.value, self.rate = rk4_lpf(
            self.value, self.rate, x_measured, self.omega, self.dt / self.substeps, self.substeps
        )
        return self.value


def step_response(cutoff: float, dt: float, duration: float, substeps: int = 4, amplitude: float = 1.0):
    """Filter output for a constant input switched on at t = 0, sampled every ``dt``."""
    check_stability(cutoff, dt, substeps)
    omega = 2.0 * math.pi * cutoff
    n = int(round(duration / dt))
    w, w_dot = 0.0, 0.0
    out = [0.0]
    for _ in range(n):
        w, w_dot = rk4_lpf(w, w_dot, amplitude, omega, dt / substeps, substeps)
        out.append(w)
    return out


def measured_settling_time(response, dt: float, final: float, tol: float = 0.01) -> float:
    """Earliest sample time after which ``|final - w| / |final| < tol`` holds for good."""
    last_bad = -1
    for k, w in enumerate(response):
        if abs(final - w) >= tol * abs(final):
            last_bad = k
    if last_bad == len(response) - 1:
        return math.inf
    return (last_bad + 1) * dt
