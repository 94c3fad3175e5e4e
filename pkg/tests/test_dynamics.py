"""Plant model: force composition, RK4 integration, actuator lag."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from liftquad.aero import AeroParams, GRAVITY, GRAVITY_VEC, aero_accel
from liftquad.control import ControlInput
from liftquad.dynamics import (PlantConfig, VehicleState, actuator_lag,
                               rk4_step, state_derivative)
from liftquad.geom import rodrigues

EZ = np.array([0.0, 0.0, 1.0])


def make_state(p=(0.0, 0.0, 0.0), v=(0.0, 0.0, 0.0), R=None, t=0.0):
    return VehicleState(np.asarray(p, float), np.asarray(v, float),
                        np.eye(3) if R is None else R, t)


def test_free_fall_accelerates_at_gravity():
    cfg = PlantConfig(aero=AeroParams().zeroed())
    _, v_dot, _ = state_derivative(cfg, make_state(), ControlInput(0.0, np.zeros(3)))
    assert_allclose(v_dot, GRAVITY_VEC)


def test_hover_thrust_balances_weight():
    cfg = PlantConfig()
    inp = ControlInput(-cfg.aero.mass * GRAVITY, np.zeros(3))
    p_dot, v_dot, r_dot = state_derivative(cfg, make_state(), inp)
    assert_allclose(p_dot, np.zeros(3))
    assert_allclose(v_dot, np.zeros(3), atol=1e-15)
    assert_allclose(r_dot, np.zeros((3, 3)))


def test_force_sum_matches_drag_matrix_route():
    # oracle: thrust accel + symmetric drag-matrix acceleration + gravity
    cfg = PlantConfig(v_wind=np.array([1.0, -2.0, 0.5]))
    rng = np.random.default_rng(41)
    for _ in range(50):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        state = make_state(v=rng.uniform(-10, 10, size=3),
                           R=rodrigues(axis, rng.uniform(-3, 3)))
        inp = ControlInput(-rng.uniform(0, 30), rng.uniform(-2, 2, size=3))
        _, v_dot, _ = state_derivative(cfg, state, inp)
        expected = state.R @ np.array([0.0, 0.0, inp.thrust]) / cfg.aero.mass \
            + aero_accel(cfg.aero, state.R, state.v - cfg.v_wind) + GRAVITY_VEC
        assert_allclose(v_dot, expected, atol=1e-12)


def test_wind_enters_through_relative_velocity():
    cfg_still = PlantConfig()
    cfg_windy = PlantConfig(v_wind=np.array([3.0, 0.0, 0.0]))
    inp = ControlInput(0.0, np.zeros(3))
    moving = make_state(v=(3.0, 0.0, 0.0))
    _, v_dot_rel, _ = state_derivative(cfg_windy, moving, inp)
    # moving with the wind: no relative airflow, pure free fall
    assert_allclose(v_dot_rel, GRAVITY_VEC, atol=1e-15)
    _, v_dot_still, _ = state_derivative(cfg_still, moving, inp)
    assert np.linalg.norm(v_dot_still - GRAVITY_VEC) > 0.1


def test_rk4_hover_is_a_fixed_point():
    cfg = PlantConfig()
    inp = ControlInput(-cfg.aero.mass * GRAVITY, np.zeros(3))
    state = make_state()
    for _ in range(1000):
        state = rk4_step(cfg, state, inp)
    assert_allclose(state.p, np.zeros(3), atol=1e-12)
    assert_allclose(state.v, np.zeros(3), atol=1e-12)
    assert_allclose(state.R, np.eye(3), atol=1e-12)
    assert state.t == pytest.approx(1.0)


def test_rk4_free_fall_velocity_is_exact():
    # linear dynamics: RK4 reproduces v = g t to rounding
    cfg = PlantConfig(aero=AeroParams().zeroed())
    inp = ControlInput(0.0, np.zeros(3))
    state = make_state()
    for _ in range(1000):
        state = rk4_step(cfg, state, inp)
    assert state.v[2] == pytest.approx(GRAVITY, abs=1e-9)
    assert state.p[2] == pytest.approx(0.5 * GRAVITY, abs=1e-9)


def test_rk4_full_turn_returns_to_identity():
    cfg = PlantConfig(aero=AeroParams().zeroed())
    inp = ControlInput(0.0, EZ.copy())
    state = make_state()
    steps = int(round(2.0 * math.pi / cfg.step))
    dt_last = 2.0 * math.pi - steps * cfg.step
    for _ in range(steps):
        state = rk4_step(cfg, state, inp)
    if abs(dt_last) > 0.0:
        from dataclasses import replace
        state = rk4_step(replace(cfg, step=dt_last), state, inp)
    assert np.linalg.norm(state.R - np.eye(3)) < 1e-6


def test_rotation_stays_orthonormal_over_long_run():
    cfg = PlantConfig()
    inp = ControlInput(-10.0, np.array([0.7, -0.4, 1.3]))
    state = make_state(v=(5.0, 0.0, 0.0))
    worst = 0.0
    for k in range(100000):
        state = rk4_step(cfg, state, inp)
        if k % 500 == 0:
            worst = max(worst, np.linalg.norm(
                state.R.T @ state.R - np.eye(3)))
    worst = max(worst, np.linalg.norm(state.R.T @ state.R - np.eye(3)))
    assert worst < 1e-9


def test_drag_only_dissipates_mechanical_energy():
    cfg = PlantConfig()
    m = cfg.aero.mass
    inp = ControlInput(0.0, np.zeros(3))
    state = make_state(v=(12.0, 0.0, -4.0))

    def energy(s):
        return 0.5 * m * float(s.v @ s.v) - m * GRAVITY * s.p[2]

    prev = energy(state)
    for _ in range(5000):
        state = rk4_step(cfg, state, inp)
        cur = energy(state)
        assert cur <= prev + 1e-9
        prev = cur


def test_actuator_lag_passthrough_when_disabled():
    cfg = PlantConfig()
    cmd = ControlInput(-12.0, np.array([1.0, 2.0, 3.0]))
    prev = ControlInput(-5.0, np.zeros(3))
    out = actuator_lag(cfg, cmd, prev, 1e-3)
    assert out.thrust == cmd.thrust
    assert_allclose(out.omega, cmd.omega)


def test_actuator_lag_single_step_arithmetic():
    cfg = PlantConfig(tau_omega=0.05, tau_thrust=0.1)
    cmd = ControlInput(-10.0, np.array([1.0, 0.0, -1.0]))
    prev = ControlInput(0.0, np.zeros(3))
    out = actuator_lag(cfg, cmd, prev, 0.004)
    # oracle: y + (dt/tau)(u - y) by hand
    assert out.thrust == pytest.approx(-0.4)
    assert_allclose(out.omega, [0.08, 0.0, -0.08])


def test_actuator_lag_tracks_exponential():
    # explicit Euler vs the exact first-order response over ten steps
    tau, dt = 0.05, 0.004
    cfg = PlantConfig(tau_omega=tau)
    cmd = ControlInput(0.0, np.array([1.0, 0.0, 0.0]))
    applied = ControlInput(0.0, np.zeros(3))
    for k in range(10):
        applied = actuator_lag(cfg, cmd, applied, dt)
        exact = 1.0 - math.exp(-(k + 1) * dt / tau)
        assert abs(applied.omega[0] - exact) <= 0.02  # of the unit step


def test_plant_config_validation():
    with pytest.raises(ValueError):
        PlantConfig(step=0.0)
    with pytest.raises(ValueError):
        PlantConfig(tau_omega=-0.1)


def test_integration_is_deterministic():
    cfg = PlantConfig(v_wind=np.array([1.0, 0.0, 0.0]))
    inp = ControlInput(-14.0, np.array([0.2, -0.1, 0.05]))

    def run():
        state = make_state(v=(6.0, 0.0, 0.0))
        for _ in range(500):
            state = rk4_step(cfg, state, inp)
        return state

    a, b = run(), run()
    assert np.array_equal(a.p, b.p)
    assert np.array_equal(a.v, b.v)
    assert np.array_equal(a.R, b.R)
