"""Six-degree-of-freedom point-mass plant with attitude kinematics.

Translational dynamics sum rotor thrust along body z, the wing
aerodynamic force and gravity; the attitude integrates the commanded
body rate directly (the inner rate loop is assumed fast, so no
rotational inertia is modeled).  Integration is classical RK4 with the
rotation re-orthonormalized after every step; an optional first-order
actuator lag sits between the commanded and applied inputs.

The plant's aerodynamic parameters are independent of the controller's
copy, which is how model mismatch experiments are expressed.
"""

from dataclasses import dataclass, field

import numpy as np

from .aero import AeroParams, GRAVITY_VEC, aero_force_wing, body_to_wing_rotation
from .control import ControlInput
from .geom import orthonormalize, skew


@dataclass
class VehicleState:
    """Plant state: position and velocity in the earth frame (NED),
    body-to-earth rotation, and time."""

    p: np.ndarray
    v: np.ndarray
    R: np.ndarray
    t: float = 0.0

    def copy(self):
        return VehicleState(self.p.copy(), self.v.copy(), self.R.copy(), self.t)


@dataclass(frozen=True)
class PlantConfig:
    """Ground-truth model: aerodynamic parameters, constant wind
    (earth frame, m/s), actuator time constants for the body-rate and
    thrust channels (s, 0 disables the lag) and the integration step."""

    aero: AeroParams = field(default_factory=AeroParams)
    v_wind: np.ndarray = field(default_factory=lambda: np.zeros(3))
    tau_omega: float = 0.0
    tau_thrust: float = 0.0
    step: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "v_wind", np.asarray(self.v_wind, dtype=float))
        if self.step <= 0.0:
            raise ValueError("integration step must be > 0")
        if self.tau_omega < 0.0 or self.tau_thrust < 0.0:
            raise ValueError("actuator time constants must be >= 0")


def state_derivative(cfg, state, inp):
    """Time derivatives ``(p_dot, v_dot, R_dot)`` under ``inp``.

    Thrust acts along body z (negative thrust pulls up in NED), the
    wing force is rotated from the wing frame to earth, gravity closes
    the sum; the rotation evolves by the commanded body rate.
    """
    aero = cfg.aero
    thrust_force = state.R @ np.array([0.0, 0.0, inp.thrust])
    f_wing = aero_force_wing(aero, state.R, state.v - cfg.v_wind)
    wing_to_earth = state.R @ body_to_wing_rotation(aero.kappa).T
    v_dot = (thrust_force + wing_to_earth @ f_wing) / aero.mass + GRAVITY_VEC
    return state.v, v_dot, state.R @ skew(inp.omega)


def rk4_step(cfg, state, inp):
    """One classical RK4 step of length ``cfg.step``; the input is held
    constant across the stages and the rotation is re-orthonormalized
    afterwards."""
    h = cfg.step

    def deriv(p, v, R):
        return state_derivative(cfg, VehicleState(p, v, R, state.t), inp)

    k1 = deriv(state.p, state.v, state.R)
    k2 = deriv(state.p + 0.5 * h * k1[0], state.v + 0.5 * h * k1[1],
               state.R + 0.5 * h * k1[2])
    k3 = deriv(state.p + 0.5 * h * k2[0], state.v + 0.5 * h * k2[1],
               state.R + 0.5 * h * k2[2])
    k4 = deriv(state.p + h * k3[0], state.v + h * k3[1], state.R + h * k3[2])
    p = state.p + (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    v = state.v + (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    R = state.R + (h / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    return VehicleState(p, v, orthonormalize(R), state.t + h)


def actuator_lag(cfg, commanded, applied_prev, dt):
    """First-order lag between commanded and applied inputs.

    Explicit per-channel update ``applied += (dt/tau)(commanded -
    applied)``; a zero time constant passes the command through.  The
    thrust and body-rate channels use their own time constants.
    """
    if cfg.tau_thrust > 0.0:
        thrust = applied_prev.thrust + (dt / cfg.tau_thrust) * (
            commanded.thrust - applied_prev.thrust)
    else:
        thrust = commanded.thrust
    if cfg.tau_omega > 0.0:
        omega = applied_prev.omega + (dt / cfg.tau_omega) * (
            commanded.omega - applied_prev.omega)
    else:
        omega = commanded.omega
    return ControlInput(thrust, omega)
