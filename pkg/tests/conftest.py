from dataclasses import replace

import pytest
from hypothesis import settings

from smcbench.engine import SimConfig, run
from smcbench.plant import DisturbanceModel

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def nominal_config():
    return SimConfig()


@pytest.fixture(scope="session")
def quiet_config():
    """Nominal plant without sensor noise or disturbance."""
    cfg = SimConfig(disturbance=DisturbanceModel(kind="none"))
    return replace(cfg, plant=replace(cfg.plant, sensor_noise_std=0.0))


@pytest.fixture(scope="session")
def nominal_runs(nominal_config):
    """Terminal and energy-saving runs at nominal parameters, seed 0, 1.5 s."""
    return {
        kind: run(nominal_config.with_controller(kind=kind))
        for kind in ("terminal", "energy_saving")
    }
