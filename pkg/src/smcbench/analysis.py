"""Chattering prediction, threshold tuning and two-run benchmark reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .controllers import feasibility_check
from .engine import SimConfig, SimTrace, run, summarize, sweep
from .errors import ConfigError
from .plant import DisturbanceModel


@dataclass(frozen=True)
class ChatteringPrediction:
    omega: float
    amplitude_sigma: float
    amplitude_x: float

    @property
    def frequency_hz(self) -> float:
        return self.omega / (2.0 * math.pi)


def predict_chattering(mu: float, beta1: float, beta2: float) -> ChatteringPrediction:
    """Harmonic-balance chattering of the energy-saving law behind a first-order lag.

    omega = (beta1 + beta2) / (mu * (sqrt(1 - beta1^2) + sqrt(1 - beta2^2)))
    A_sigma = sqrt(mu^2 omega^2 + 1) / (omega^2 (mu^2 omega^2 + 1))

    Near the origin the quadratic surface term vanishes, so A_x = A_sigma.
    """
    if not mu > 0.0:
        raise ConfigError(f"mu must be > 0, got {mu!r}")
    if not (abs(beta1) < 1.0 and abs(beta2) < 1.0):
        raise ConfigError("thresholds must satisfy |beta1| < 1 and |beta2| < 1")
    if not beta1 + beta2 > 0.0:
        raise ConfigError("beta1 + beta2 must be > 0 for a positive chattering frequency")
    omega = (beta1 + beta2) / (mu * (math.sqrt(1.0 - beta1 ** 2) + math.sqrt(1.0 - beta2 ** 2)))
    q = mu * mu * omega * omega + 1.0
    amplitude = math.sqrt(q) / (omega * omega * q)
    return ChatteringPrediction(omega, amplitude, amplitude)


def residual_oscillation(signal: np.ndarray, dt: float) -> tuple[float, float]:
    """(angular frequency, amplitude) of a steady oscillation.

    Frequency from the mean interval between zero crossings of the de-meaned
    signal (two crossings per period); amplitude as half the peak-to-peak.
    """
    sig = np.asarray(signal, dtype=float)
    if sig.size < 2:
        return math.nan, 0.0
    centered = sig - sig.mean()
    amplitude = 0.5 * float(sig.max() - sig.min())
    s = np.sign(centered)
    nz = np.flatnonzero(s)
    if nz.size < 2:
        return math.nan, amplitude
    crossings = nz[1:][s[nz[1:]] != s[nz[:-1]]]
    if crossings.size < 2:
        return math.nan, amplitude
    half_period = float(np.mean(np.diff(crossings))) * dt
    return math.pi / half_period, amplitude


# ---------------------------------------------------------------- tuning


@dataclass(frozen=True)
class GridCell:
    beta1: float
    beta2: float
    feasible: bool
    converged: bool = False
    convergence_time: float = math.nan
    energy: float = math.nan
    baseline_time: float = math.nan
    baseline_energy: float = math.nan
    improving: bool = False


@dataclass(frozen=True)
class TuningResult:
    beta1: float
    beta2: float
    convergence_time: float
    energy: float
    baseline_time: float
    baseline_energy: float
    feasible_grid: tuple = field(default_factory=tuple)

    @property
    def hard_constraint_margin(self) -> float:
        """J_emp - J_hat_emp; negative when the hard constraint holds."""
        return self.convergence_time - self.baseline_time


class NoImprovingPair(RuntimeError):
    """No feasible grid cell converges faster than its sub-optimal baseline."""


def tuning_config(template: SimConfig, duration: Optional[float] = None) -> SimConfig:
    """Deterministic worst-case variant of ``template`` used for tuning runs.

    Sensor noise is removed and the disturbance is -D sign(u_sm) at the full
    plant bound.
    """
    plant = replace(template.plant, sensor_noise_std=0.0)
    cfg = replace(
        template,
        plant=plant,
        disturbance=DisturbanceModel(kind="worst_case", seed=template.disturbance.seed),
    )
    if duration is not None:
        cfg = replace(cfg, duration=duration)
    return cfg


def threshold_grid(ratio: float, resolution: int, beta1: Optional[float] = None):
    """Cell-centred (beta1, beta2) candidates.

    With ``beta1`` fixed the ``resolution`` points span the admissible open
    interval of beta2; otherwise the square [0, 1) x (-1, 1) is rasterised
    ``resolution`` x ``resolution`` and each cell is tagged feasible or not.
    """
    if resolution < 3:
        raise ConfigError(f"grid resolution must be >= 3, got {resolution!r}")
    cells = []
    if beta1 is not None:
        lo = max(-1.0, 2.0 * ratio - beta1)
        hi = beta1
        if not lo < hi:
            return cells
        for i in range(resolution):
            b2 = lo + (hi - lo) * (i + 0.5) / resolution
            cells.append((beta1, b2, feasibility_check(beta1, b2, ratio, 1.0).feasible))
        return cells
    for i in range(resolution):
        b1 = (i + 0.5) / resolution
        for j in range(resolution):
            b2 = -1.0 + 2.0 * (j + 0.5) / resolution
            cells.append((b1, b2, feasibility_check(b1, b2, ratio, 1.0).feasible))
    return cells


def tune_thresholds(
    template: SimConfig,
    beta1: Optional[float] = None,
    grid: int = 21,
    slack: float = 1.0,
    j_hat_max: Optional[float] = None,
    duration: Optional[float] = 1.0,
    workers: int = 1,
) -> TuningResult:
    """Empirical version of the threshold optimisation.

    Every feasible grid cell is simulated under the worst-case disturbance;
    its convergence time J_emp is compared with the classic sub-optimal law
    at beta = beta1 (J_hat_emp). Among cells with J_emp < slack * J_hat_emp
    the one with the smallest energy E wins. ``j_hat_max`` drops beta1 rows
    whose baseline is slower than that ceiling.
    """
    plant = template.plant
    u_max = template.controller.u_max
    ratio = plant.disturbance_bound / (plant.input_gain * u_max)
    if not ratio < 1.0:
        raise ConfigError(f"need D < U (D/U = {ratio:.6g})")
    base = tuning_config(template, duration)

    cells = threshold_grid(ratio, grid, beta1)
    rows = sorted({c[0] for c in cells})
    baseline_cfgs = [base.with_controller(kind="suboptimal", beta=b1, gamma_star=1.0) for b1 in rows]
    feasible = [c for c in cells if c[2]]
    es_cfgs = [base.with_controller(kind="energy_saving", beta1=b1, beta2=b2) for b1, b2, _ in feasible]
    results = sweep(baseline_cfgs + es_cfgs, workers=workers)
    baselines = dict(zip(rows, results[: len(rows)]))

    evaluated = []
    for b1, b2, ok in cells:
        if not ok:
            evaluated.append(GridCell(b1, b2, False))
    for (b1, b2, _), res in zip(feasible, results[len(rows):]):
        ref = baselines[b1]
        ref_ok = not isinstance(ref, Exception) and ref.converged
        if ref_ok and j_hat_max is not None and not ref.convergence_time < j_hat_max:
            ref_ok = False
        if isinstance(res, Exception):
            evaluated.append(GridCell(b1, b2, True))
            continue
        improving = bool(ref_ok and res.converged and res.convergence_time < slack * ref.convergence_time)
        evaluated.append(GridCell(
            b1, b2, True, res.converged, res.convergence_time, res.energy,
            ref.convergence_time if ref_ok else math.nan,
            ref.energy if ref_ok else math.nan,
            improving,
        ))
    evaluated.sort(key=lambda c: (c.beta1, c.beta2))

    candidates = [c for c in evaluated if c.improving]
    if not candidates:
        raise NoImprovingPair("no feasible improving pair at this grid resolution")
    best = min(candidates, key=lambda c: (c.energy, c.convergence_time))
    return TuningResult(
        best.beta1, best.beta2, best.convergence_time, best.energy,
        best.baseline_time, best.baseline_energy, tuple(evaluated),
    )


# ------------------------------------------------------------ comparison


@dataclass
class BenchmarkReport:
    series: dict
    scalars: dict


def compare_runs(
    trace_a: SimTrace,
    trace_b: SimTrace,
    prediction: Optional[ChatteringPrediction] = None,
) -> BenchmarkReport:
    """Align two runs and compute energy and convergence deltas (a minus b).

    The residual oscillation of each run is measured on sigma over the final
    dwell window. Chattering counts as detectable only when the true
    position oscillation exceeds the sensor noise floor.
    """
    if trace_a.dt != trace_b.dt or len(trace_a) != len(trace_b):
        raise ConfigError("traces must share the sampling period and duration")
    sa, sb = summarize(trace_a), summarize(trace_b)
    dwell_n = max(1, int(round(trace_a.dwell / trace_a.dt)))
    tail = slice(len(trace_a) - dwell_n, None)

    series = {
        "t": trace_a.t,
        "x_a": trace_a.x_true,
        "x_b": trace_b.x_true,
        "E_a": trace_a.E,
        "E_b": trace_b.E,
        "dE": trace_a.E - trace_b.E,
    }
    scalars = {
        "controller_a": sa.controller,
        "controller_b": sb.controller,
        "energy_a": sa.energy,
        "energy_b": sb.energy,
        "delta_energy": sa.energy - sb.energy,
        "converged_a": sa.converged,
        "converged_b": sb.converged,
        "convergence_time_a": sa.convergence_time,
        "convergence_time_b": sb.convergence_time,
        "delta_convergence_time": sa.convergence_time - sb.convergence_time,
        "steady_state_error_a": sa.steady_state_error,
        "steady_state_error_b": sb.steady_state_error,
        "control_on_fraction_a": sa.control_on_fraction,
        "control_on_fraction_b": sb.control_on_fraction,
    }
    for label, tr, summ in (("a", trace_a, sa), ("b", trace_b, sb)):
        omega, amp_sigma = residual_oscillation(tr.sigma[tail], tr.dt)
        scalars[f"residual_omega_{label}"] = omega
        scalars[f"residual_amplitude_sigma_{label}"] = amp_sigma
        scalars[f"residual_amplitude_x_{label}"] = summ.residual_amplitude
        scalars[f"chattering_{label}"] = "detectable" if summ.chattering else "not detectable"
    scalars["noise_floor"] = trace_a.noise_std
    if prediction is not None:
        scalars["predicted_omega"] = prediction.omega
        scalars["predicted_amplitude_x"] = prediction.amplitude_x
        scalars["predicted_chattering"] = (
            "detectable" if prediction.amplitude_x > trace_a.noise_std else "not detectable"
        )
    return BenchmarkReport(series, scalars)


def feasibility_raster(ratio: float, resolution: int = 201):
    """Boolean mask over beta1 in [0, 1) (rows) and beta2 in (-1, 1) (columns).

    Cell centres are used; the mask is what the triangle of admissible
    thresholds looks like at this resolution.
    """
    b1 = (np.arange(resolution) + 0.5) / resolution
    b2 = -1.0 + 2.0 * (np.arange(resolution) + 0.5) / resolution
    mask = np.array([[feasibility_check(a, b, ratio, 1.0).feasible for b in b2] for a in b1])
    return b1, b2, mask


def benchmark(config: SimConfig, kinds=("terminal", "energy_saving")):
    """Run two controllers sharing surface, amplitude, seed and initial state."""
    if len(kinds) != 2:
        raise ConfigError("benchmark needs exactly two controllers")
    traces = [run(config.with_controller(kind=k))[0] for k in kinds]
    prediction = None
    c = config.controller
    if "energy_saving" in kinds and c.beta1 + c.beta2 > 0.0:
        prediction = predict_chattering(config.plant.actuator_tau, c.beta1, c.beta2)
    return traces, compare_runs(traces[0], traces[1], prediction)
