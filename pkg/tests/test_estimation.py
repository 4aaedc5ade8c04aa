import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from smcbench.errors import ConfigError
from smcbench.estimation import (
    LpfState,
    PositionSmoother,
    VelocityEstimator,
    differentiate,
    exact_settling_time,
    lpf_step,
    measured_settling_time,
    settling_time,
    step_response,
)

DT = 1e-4


def test_differentiate_examples():
    assert differentiate(0.2, 0.2, DT) == 0.0
    assert differentiate(0.001, 0.0, DT) == pytest.approx(10.0)
    with pytest.raises(ConfigError):
        differentiate(1.0, 0.0, 0.0)


def test_ramp_gives_constant_difference():
    v = 0.37
    raw = [differentiate(v * (k + 1) * DT, v * k * DT, DT) for k in range(20)]
    assert raw == pytest.approx([v] * 20, rel=1e-9)


@pytest.mark.parametrize("fc, expected", [(1000.0, 7.32e-4), (100.0, 7.32e-3)])
def test_settling_time_formula(fc, expected):
    assert settling_time(fc) == pytest.approx(expected, rel=1e-3)


@given(st.floats(1.0, 1e4))
def test_settling_time_inverse_proportional(fc):
    assert settling_time(2 * fc) == pytest.approx(settling_time(fc) / 2, rel=1e-12)


def test_settling_time_rejects_bad_cutoff():
    with pytest.raises(ConfigError):
        settling_time(0.0)


def test_exact_settling_solves_repeated_pole_response():
    y = exact_settling_time(1.0) * 2 * math.pi
    assert (1 + y) * math.exp(-y) == pytest.approx(0.01, rel=1e-12)
    assert y == pytest.approx(6.638352, abs=1e-6)


@pytest.mark.parametrize("fc", [50.0, 100.0, 500.0, 1000.0])
def test_step_response_matches_closed_form(fc):
    wc = 2 * math.pi * fc
    resp = np.array(step_response(fc, DT, 12 / wc + 10 * DT))
    t = np.arange(resp.size) * DT
    exact = 1 - (1 + wc * t) * np.exp(-wc * t)
    assert np.max(np.abs(resp - exact)) < 1e-4
    # no overshoot beyond numerical error
    assert resp.max() <= 1.0 + 1e-3


@pytest.mark.parametrize("fc", [50.0, 100.0, 500.0, 1000.0])
def test_simulated_settling_is_exact_value_to_a_sample(fc):
    resp = step_response(fc, DT, 20 / (2 * math.pi * fc))
    ts = measured_settling_time(resp, DT, 1.0)
    assert abs(ts - exact_settling_time(fc)) <= DT


def test_dc_gain_is_one():
    fc, c = 1000.0, 3.7
    resp = step_response(fc, DT, 10 * settling_time(fc) + 20 * exact_settling_time(fc), amplitude=c)
    assert resp[-1] == pytest.approx(c, rel=1e-9)


@given(st.lists(st.floats(-5.0, 5.0), min_size=5, max_size=40), st.floats(-3.0, 3.0))
def test_superposition(a, scale):
    b = [scale * v + 0.5 for v in a]

    def filt(seq):
        s = LpfState(cutoff=500.0)
        out = []
        for v in seq:
            s = lpf_step(s, v, DT)
            out.append(s.w)
        return np.array(out)

    both = filt([x + y for x, y in zip(a, b)])
    assert both == pytest.approx(filt(a) + filt(b), abs=1e-9)


@pytest.mark.parametrize("fc, substeps", [(1000.0, 1), (5000.0, 4)])
def test_stability_guard(fc, substeps):
    with pytest.raises(ConfigError, match="too coarse"):
        lpf_step(LpfState(cutoff=fc), 1.0, DT, substeps)


def test_lpf_step_returns_new_state():
    s0 = LpfState(cutoff=1000.0)
    s1 = lpf_step(s0, 1.0, DT)
    assert s0.w == 0.0 and s1.w > 0.0


def test_velocity_estimator_tracks_ramp():
    est = VelocityEstimator(1000.0, DT)
    v = 0.05
    w = [est(v * k * DT) for k in range(200)]
    assert w[-1] == pytest.approx(v, rel=1e-6)
    assert est.state.last_x == pytest.approx(v * 199 * DT)


def test_velocity_estimator_first_sample_reads_zero():
    est = VelocityEstimator(1000.0, DT)
    assert est(0.3) == 0.0


def test_position_smoother_starts_at_first_sample():
    sm = PositionSmoother(100.0, DT)
    assert sm(0.015) == pytest.approx(0.015, abs=1e-15)
    for _ in range(1000):
        out = sm(0.02)
    assert out == pytest.approx(0.02, rel=1e-6)


def test_measured_settling_time_never_settles():
    assert measured_settling_time([0.0, 0.5, 0.9], DT, 1.0) == math.inf
