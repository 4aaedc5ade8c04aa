"""Closed-loop simulation: sampled control at a fixed rate, plant substeps, logging.

Per control sample the loop measures position, reconstructs velocity,
shifts coordinates by the reference, evaluates sigma, steps the selected
controller, adds the gravity compensation, holds the result over the
period and advances the plant. The controller only ever sees measured and
filtered quantities.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .controllers import (
    EnergySavingController,
    EnergySavingParams,
    SubOptimalController,
    SubOptimalParams,
    TerminalController,
)
from .errors import ConfigError, SimulationError
from .estimation import PositionSmoother, VelocityEstimator
from .plant import (
    DisturbanceModel,
    PlantParams,
    PlantState,
    advance_disturbance,
    disturbance_eval,
    initial_disturbance_state,
    plant_step,
)
from .surface import SurfaceSpec

CONTROLLER_KINDS = ("terminal", "suboptimal", "energy_saving")

# moving-average window separating chattering from slow drift
CHATTER_WINDOW = 0.02

TRACE_COLUMNS = (
    "t", "x_measured", "x_true", "v_true", "w", "sigma", "sigma_m", "u", "v", "d", "E",
)


@dataclass(frozen=True)
class ControllerConfig:
    """Selected law and its parameters. ``hysteresis=None`` means 2x sensor std."""

    kind: str = "energy_saving"
    alpha: float = 1.2
    u_max: float = 0.8
    beta: float = 0.85
    gamma_star: float = 1.0
    beta1: float = 0.85
    beta2: float = 0.1
    hysteresis: Optional[float] = None

    def __post_init__(self):
        if self.kind not in CONTROLLER_KINDS:
            raise ConfigError(
                f"controller.kind must be one of {', '.join(CONTROLLER_KINDS)}; got {self.kind!r}"
            )


@dataclass(frozen=True)
class SimConfig:
    dt_control: float = 1e-4
    substeps: int = 4
    duration: float = 1.5
    reference: float = 0.015
    initial_position: float = 0.0
    initial_velocity: float = 0.0
    seed: int = 0
    band: float = 2e-4
    dwell: float = 0.2
    velocity_cutoff: float = 1000.0
    filter_substeps: int = 4
    # cutoff of the slower estimate feeding the extremum detector; 0 disables it
    detect_cutoff: float = 100.0
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    plant: PlantParams = field(default_factory=PlantParams)
    disturbance: DisturbanceModel = field(default_factory=DisturbanceModel)

    def __post_init__(self):
        if not self.dt_control > 0.0:
            raise ConfigError(f"simulation.dt_control must be > 0, got {self.dt_control!r}")
        if not (isinstance(self.substeps, int) and self.substeps >= 1):
            raise ConfigError(f"simulation.substeps must be an integer >= 1, got {self.substeps!r}")
        if not self.band > 0.0:
            raise ConfigError(f"simulation.band must be > 0, got {self.band!r}")
        if not self.dwell >= 0.0:
            raise ConfigError(f"simulation.dwell must be >= 0, got {self.dwell!r}")
        if not self.duration >= self.dwell or not self.duration > 0.0:
            raise ConfigError(
                f"simulation.duration ({self.duration!r}) must be positive and >= dwell ({self.dwell!r})"
            )
        if not self.detect_cutoff >= 0.0:
            raise ConfigError(f"simulation.detect_cutoff must be >= 0, got {self.detect_cutoff!r}")

    @property
    def steps(self) -> int:
        return int(round(self.duration / self.dt_control))

    def surface(self) -> SurfaceSpec:
        c, p = self.controller, self.plant
        return SurfaceSpec(c.alpha, c.u_max, p.mass, p.input_gain, self.reference)

    def hysteresis(self) -> float:
        h = self.controller.hysteresis
        return 2.0 * self.plant.sensor_noise_std if h is None else h

    def build_controller(self):
        """Instantiate the configured law; raises FeasibilityError for bad thresholds."""
        c, p = self.controller, self.plant
        if c.kind == "terminal":
            return TerminalController(c.u_max)
        if c.kind == "suboptimal":
            params = SubOptimalParams(beta=c.beta, gamma_star=c.gamma_star, u_max=c.u_max)
            return SubOptimalController(params, self.hysteresis())
        params = EnergySavingParams(
            beta1=c.beta1, beta2=c.beta2, u_max=c.u_max,
            disturbance_bound=p.disturbance_bound / p.input_gain,
        )
        return EnergySavingController(params, self.hysteresis())

    def with_controller(self, **changes) -> "SimConfig":
        return replace(self, controller=replace(self.controller, **changes))


@dataclass
class SimTrace:
    """Per-sample log. ``u`` is the switching component u_sm; ``E`` includes the
    hold interval that starts at ``t``."""

    data: np.ndarray
    dt: float
    reference: float
    band: float
    dwell: float
    noise_std: float
    controller: str

    def __getattr__(self, name):
        if name in TRACE_COLUMNS:
            return self.data[:, TRACE_COLUMNS.index(name)]
        raise AttributeError(name)

    def __len__(self):
        return self.data.shape[0]

    @property
    def duration(self) -> float:
        return len(self) * self.dt


@dataclass(frozen=True)
class RunSummary:
    converged: bool
    convergence_time: float
    energy: float
    steady_state_error: float
    control_on_fraction: float
    chattering: bool
    residual_amplitude: float
    duration: float
    controller: str

    def as_dict(self) -> dict:
        return {
            "controller": self.controller,
            "converged": self.converged,
            "convergence_time": self.convergence_time,
            "energy": self.energy,
            "steady_state_error": self.steady_state_error,
            "control_on_fraction": self.control_on_fraction,
            "chattering": self.chattering,
            "residual_amplitude": self.residual_amplitude,
            "duration": self.duration,
        }


def convergence_index(error: np.ndarray, band: float, dwell_samples: int) -> Optional[int]:
    """First sample index starting a run of ``dwell_samples`` samples inside the band."""
    inside = np.abs(error) < band
    n = len(inside)
    if dwell_samples <= 0:
        idx = np.flatnonzero(inside)
        return int(idx[0]) if idx.size else None
    if n < dwell_samples:
        return None
    # count of inside samples in every window of the dwell length
    csum = np.concatenate(([0], np.cumsum(inside, dtype=np.int64)))
    window = csum[dwell_samples:] - csum[:-dwell_samples]
    hits = np.flatnonzero(window == dwell_samples)
    return int(hits[0]) if hits.size else None


def residual_amplitude(x: np.ndarray, dt: float, window: float = CHATTER_WINDOW) -> float:
    """Half peak-to-peak of ``x`` after removing its centred moving average.

    The moving average strips the slow wander caused by low-frequency
    disturbances, leaving the switching-induced oscillation.
    """
    n = max(1, int(round(window / dt)))
    if x.size <= n:
        hp = x - x.mean()
    else:
        kernel = np.full(n, 1.0 / n)
        hp = (x - np.convolve(x, kernel, mode="same"))[n // 2: x.size - n // 2]
    return 0.5 * float(hp.max() - hp.min()) if hp.size else 0.0


def summarize(trace: SimTrace) -> RunSummary:
    dwell_n = int(round(trace.dwell / trace.dt))
    err = trace.x_true - trace.reference
    k = convergence_index(err, trace.band, dwell_n)
    tail = slice(max(0, len(trace) - max(dwell_n, 1)), None)
    residual = residual_amplitude(trace.x_true[tail], trace.dt)
    u = trace.u
    return RunSummary(
        converged=k is not None,
        convergence_time=math.nan if k is None else k * trace.dt,
        energy=float(trace.E[-1]),
        steady_state_error=float(np.max(np.abs(err[tail]))),
        control_on_fraction=float(np.count_nonzero(u) / len(u)),
        chattering=residual > trace.noise_std,
        residual_amplitude=residual,
        duration=trace.duration,
        controller=trace.controller,
    )


def run(config: SimConfig) -> tuple[SimTrace, RunSummary]:
    """Simulate one closed-loop experiment."""
    cfg = config
    plant, model = cfg.plant, cfg.disturbance
    spec = cfg.surface()
    controller = cfg.build_controller()
    dt = cfg.dt_control
    n = cfg.steps
    x_r = cfg.reference
    delta = spec.delta
    u_gr = plant.gravity_comp
    D = plant.disturbance_bound

    estimator = VelocityEstimator(cfg.velocity_cutoff, dt, cfg.filter_substeps)
    if cfg.detect_cutoff > 0.0:
        det_velocity = VelocityEstimator(cfg.detect_cutoff, dt, cfg.filter_substeps)
        det_position = PositionSmoother(cfg.detect_cutoff, dt, cfg.filter_substeps)
    else:
        det_velocity = det_position = None

    noise_rng = np.random.default_rng([cfg.seed, 0x5E45])
    dist_rng = model.make_rng()
    noise_std = plant.sensor_noise_std
    state = PlantState(
        position=cfg.initial_position,
        velocity=cfg.initial_velocity,
        actuator=plant.input_gain * u_gr,
        disturbance_phase=initial_disturbance_state(model, dist_rng),
    )

    rows = np.empty((n, len(TRACE_COLUMNS)))
    energy = 0.0
    for k in range(n):
        t = k * dt
        x_meas = state.position
        if noise_std > 0.0:
            x_meas += noise_std * noise_rng.standard_normal()
        w = estimator(x_meas)
        s = (x_meas - x_r) + delta * w * abs(w)
        if det_velocity is not None:
            wd = det_velocity(x_meas)
            s_det = (det_position(x_meas) - x_r) + delta * wd * abs(wd)
        else:
            s_det = None
        if k == 0:
            controller.reset(s, s_det, at_rest=cfg.initial_velocity == 0.0)
        u_sm = controller(s, s_det)
        energy += abs(u_sm) * dt
        d = disturbance_eval(model, state, t, D, u_sm)
        rows[k] = (t, x_meas, state.position, state.velocity, w, s,
                   controller.state.sigma_m, u_sm, state.actuator, d, energy)
        state = plant_step(state, u_sm + u_gr, plant, model, dt, cfg.substeps, t, u_sm)
        state = advance_disturbance(model, state, dist_rng, dt)

    trace = SimTrace(rows, dt, x_r, cfg.band, cfg.dwell, noise_std, cfg.controller.kind)
    return trace, summarize(trace)


def _run_summary(config: SimConfig):
    try:
        return run(config)[1]
    except (ConfigError, SimulationError) as exc:
        return exc


def sweep(configs, workers: int = 1) -> list:
    """Run independent configurations; failures are returned in place of summaries."""
    configs = list(configs)
    if workers <= 1 or len(configs) <= 1:
        return [_run_summary(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_summary, configs))


def format_number(value) -> str:
    """Locale-independent text form with 9 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        text = format(float(value), ".9g")
        # keep whole-valued floats (and -0.0) distinguishable from integers
        if text.lstrip("-").isdigit():
            text += ".0"
        return text
    return str(value)


def parse_value(text: str):
    text = text.strip()
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def write_trace(trace: SimTrace, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        np.savetxt(fh, trace.data, fmt="%.9g", delimiter=",")


def read_trace_table(path) -> dict:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return {name: data[:, i] for i, name in enumerate(header)}


def write_summary(values: dict, path) -> None:
    with open(path, "w", newline="\n") as fh:
        for key, value in values.items():
            fh.write(f"{key} = {format_number(value)}\n")


def read_summary(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = parse_value(value)
    return out
