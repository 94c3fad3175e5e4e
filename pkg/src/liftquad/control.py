"""Cascaded tracking controller with flatness feedforward.

Position error feeds a velocity command, velocity error (plus an
optional clamped integral) feeds an acceleration demand, the demand is
turned into a desired attitude and collective thrust, and a
proportional attitude loop produces the body-rate command with the
flatness body rate added as feedforward.

The attitude step removes gravity and an attenuated model-based
aerodynamic acceleration (evaluated at the reference attitude and
airspeed) from the demand; what remains must come from the rotors, so
the desired body z-axis opposes it and the thrust is its projection on
that axis.  The lateral axis is completed from the reference airspeed
direction, which encodes the no-sideslip heading.

All functions are pure given an explicit :class:`ControllerContext`;
use one context per vehicle.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .aero import GRAVITY, GRAVITY_VEC, aero_accel
from .geom import mat_to_quat, quat_conj, quat_mul, quat_to_axis_angle

# Acceleration-demand norm below which the thrust direction is
# undefined and the free-fall policy (hold attitude, zero thrust) is
# used instead.
FREE_FALL_ACCEL = 1e-6
# Rejection threshold for lateral-axis candidates nearly parallel to
# the desired thrust axis.
_CROSS_TOL = 1e-6
_EX = np.array([1.0, 0.0, 0.0])
_EY = np.array([0.0, 1.0, 0.0])


def _axis_vector(value):
    value = np.asarray(value, dtype=float)
    if value.ndim == 0:
        return np.full(3, float(value))
    return value


@dataclass(frozen=True)
class ControlGains:
    """Per-axis diagonal gains of the cascade.

    ``kpp``: position to velocity (1/s); ``kvp``: velocity to
    acceleration (1/s); ``kvi``: velocity integral (1/s^2); ``kff``:
    aerodynamic-feedforward attenuation, entries in [0, 1]; ``ktp``:
    attitude to body rate (1/s).  Scalars broadcast to all three axes.
    ``integrator_limit`` clamps the integral term per axis (m/s^2).
    """

    kpp: np.ndarray = field(default_factory=lambda: np.full(3, 1.0))
    kvp: np.ndarray = field(default_factory=lambda: np.full(3, 3.0))
    kvi: np.ndarray = field(default_factory=lambda: np.full(3, 0.6))
    kff: np.ndarray = field(default_factory=lambda: np.full(3, 0.8))
    ktp: np.ndarray = field(default_factory=lambda: np.full(3, 8.0))
    integrator_limit: float = 3.0

    def __post_init__(self):
        for name in ("kpp", "kvp", "kvi", "kff", "ktp"):
            vec = _axis_vector(getattr(self, name))
            if vec.shape != (3,):
                raise ValueError(f"{name} must be a scalar or 3-vector")
            if np.any(vec < 0.0):
                raise ValueError(f"{name} entries must be >= 0, got {vec}")
            object.__setattr__(self, name, vec)
        if np.any(self.kff > 1.0):
            raise ValueError(f"kff entries must be <= 1, got {self.kff}")
        if self.integrator_limit < 0.0:
            raise ValueError("integrator_limit must be >= 0")


@dataclass(frozen=True)
class ControlMode:
    """Feature switches for the experiment conditions.

    ``use_integrator`` picks PID vs PD on velocity; ``use_aero_feedforward``
    enables the model-based aerodynamic compensation;
    ``use_rate_feedforward`` adds the flatness body rate to the command.
    ``printed_accel_projection`` switches to the alternate published
    normalization for comparison runs: the thrust projection uses the
    raw acceleration demand (gravity and feedforward not removed) and is
    scaled by its norm; off by default because it no longer returns
    exactly the weight in hover.
    """

    use_integrator: bool = True
    use_aero_feedforward: bool = True
    use_rate_feedforward: bool = True
    printed_accel_projection: bool = False


@dataclass(frozen=True)
class ControlLimits:
    """Actuator saturation bounds: collective thrust floor (N, <= 0; the
    default is four times the default airframe weight) and a per-axis
    body-rate bound (rad/s)."""

    thrust_min: float = -4.0 * 1.5 * GRAVITY
    omega_max: float = 6.0

    def __post_init__(self):
        if self.thrust_min > 0.0:
            raise ValueError("thrust_min must be <= 0")
        if self.omega_max <= 0.0:
            raise ValueError("omega_max must be > 0")


@dataclass(frozen=True)
class ControlInput:
    """Saturated actuator command: collective thrust (N, <= 0) and body
    angular velocity (rad/s)."""

    thrust: float
    omega: np.ndarray


@dataclass
class ControllerContext:
    """Mutable per-vehicle controller state.

    ``integrator`` is the clamped integral acceleration term (m/s^2);
    ``held_attitude`` the last desired rotation, reused in the free-fall
    policy and exposed for logging; ``thrust_saturated`` freezes the
    integrator for one step after the thrust command hit its floor.
    """

    integrator: np.ndarray = field(default_factory=lambda: np.zeros(3))
    held_attitude: np.ndarray | None = None
    thrust_saturated: bool = False


def position_loop(gains, p_ref, p, v_ref):
    """Velocity command from position error plus reference velocity."""
    return gains.kpp * (p_ref - p) + v_ref


def velocity_loop(gains, mode, v_d, v, a_ref, integrator, dt):
    """Acceleration demand from velocity error.

    Returns ``(a_d, integrator')``.  The integrator stores the gain-scaled
    integral term directly, accumulates ``kvi * error * dt`` per call and
    is clamped per axis; it is passed through unchanged in PD mode.
    """
    error = v_d - v
    if mode.use_integrator:
        limit = gains.integrator_limit
        integrator = np.clip(integrator + gains.kvi * error * dt, -limit, limit)
    return gains.kvp * error + integrator + a_ref, integrator


def accel_to_attitude_thrust(params, gains, mode, a_d, flat, v_ref, held=None,
                             wind=None):
    """Desired attitude and collective thrust from an acceleration demand.

    The aerodynamic feedforward is evaluated at the reference attitude
    (``flat.rotation``) and reference airspeed (``v_ref`` minus wind),
    attenuated by ``kff`` and removed from the demand together with
    gravity; what remains must come from the rotors.  Returns
    ``(rotation, thrust, free_fall)``; in the free-fall case the
    rotation is ``held`` (or the reference attitude when no hold exists)
    and the thrust is zero.
    """
    if mode.use_aero_feedforward:
        v_air_ref = v_ref if wind is None else v_ref - wind
        a_ff = aero_accel(params, flat.rotation, v_air_ref)
    else:
        a_ff = np.zeros(3)
    a_rotor = a_d - GRAVITY_VEC - gains.kff * a_ff
    norm = np.linalg.norm(a_rotor)
    if norm < FREE_FALL_ACCEL:
        rotation = held if held is not None else flat.rotation
        return rotation, 0.0, True
    z_body = -a_rotor / norm
    y_body = _lateral_axis(z_body, flat)
    x_body = np.cross(y_body, z_body)
    rotation = np.column_stack((x_body, y_body, z_body))
    if mode.printed_accel_projection:
        a_d_norm = np.linalg.norm(a_d)
        if a_d_norm < FREE_FALL_ACCEL:
            rotation = held if held is not None else flat.rotation
            return rotation, 0.0, True
        thrust = -params.mass * float(a_rotor @ a_d) / a_d_norm
    else:
        thrust = params.mass * float(z_body @ a_rotor)
    return rotation, min(thrust, 0.0), False


def _lateral_axis(z_body, flat):
    """Unit lateral axis orthogonal to the thrust axis, preferring the
    reference airspeed direction so the no-sideslip heading is kept."""
    for cand in (flat.wind_axis, flat.rotation[:, 0], _EX, _EY):
        cross = np.cross(z_body, cand)
        norm = np.linalg.norm(cross)
        if norm > _CROSS_TOL:
            return cross / norm
    raise AssertionError("no usable lateral axis candidate")


def attitude_loop(gains, mode, rotation_d, q_current, omega_ref):
    """Body-rate command from the attitude error.

    The error quaternion rotates the current attitude onto the desired
    one; its axis-angle vector is scaled by ``ktp`` and the flatness
    body rate is added unless rate feedforward is off.  Antipodal
    quaternion representations give the identical command.
    """
    q_err = quat_mul(quat_conj(q_current), mat_to_quat(rotation_d))
    xi = quat_to_axis_angle(q_err).vector
    omega = gains.ktp * xi
    if mode.use_rate_feedforward:
        omega = omega + omega_ref
    return omega


def saturate(limits, thrust, omega):
    """Clip the thrust to ``[thrust_min, 0]`` and each body-rate axis to
    ``[-omega_max, omega_max]``; idempotent."""
    return ControlInput(
        float(np.clip(thrust, limits.thrust_min, 0.0)),
        np.clip(omega, -limits.omega_max, limits.omega_max))


def controller_step(params, gains, mode, limits, sample, flat, state, ctx, dt,
                    wind=None):
    """One 250 Hz controller tick; chains the four loops and saturates.

    ``sample`` is the flat reference point, ``flat`` the matching
    flatness feedforward, ``state`` anything with ``p``, ``v``, ``R``
    attributes (measured), ``ctx`` the per-vehicle context (mutated).
    Deterministic given its arguments.
    """
    v_d = position_loop(gains, sample.p, state.p, sample.v)
    freeze = replace(mode, use_integrator=False) if ctx.thrust_saturated else mode
    a_d, ctx.integrator = velocity_loop(
        gains, freeze, v_d, state.v, sample.a, ctx.integrator, dt)
    rotation_d, thrust_d, _ = accel_to_attitude_thrust(
        params, gains, mode, a_d, flat, sample.v, held=ctx.held_attitude,
        wind=wind)
    ctx.held_attitude = rotation_d
    omega_d = attitude_loop(gains, mode, rotation_d, mat_to_quat(state.R),
                            flat.omega)
    command = saturate(limits, thrust_d, omega_d)
    ctx.thrust_saturated = bool(thrust_d < limits.thrust_min)
    return command
