"""Simulation benchmark of energy-saving sub-optimal and terminal second-order
sliding-mode control on a voice-coil actuator model."""

from .analysis import ChatteringPrediction, TuningResult, compare_runs, predict_chattering, tune_thresholds
from .controllers import (
    ControllerState,
    EnergySavingParams,
    Phase,
    SubOptimalParams,
    energy_saving_step,
    feasibility_check,
    gamma_star_lower_bound,
    init_step,
    suboptimal_step,
    terminal_step,
    update_extremum,
)
from .engine import ControllerConfig, RunSummary, SimConfig, SimTrace, run, sweep
from .errors import ConfigError, FeasibilityError, SimulationError
from .plant import DisturbanceModel, PlantParams, PlantState
from .surface import SurfaceSpec, sigma

__version__ = "0.1.0"
