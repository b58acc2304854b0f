"""Relative-motion dynamics of a deputy spacecraft about a chief in Hill's frame.

Implements the linearized Clohessy-Wiltshire equations with thrust forcing,
sun-line kinematics, fixed-step RK4 propagation under zero-order-hold control,
the closed-form free-motion state transition matrix (used as an oracle for the
integrator), and the scaling between the space frame and a laboratory flight
volume.

Axes follow the usual Hill/RIC convention: x radial (away from Earth),
y in-track, z cross-track.  SI units throughout (m, m/s, s, rad).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DynamicsParams",
    "RelativeState",
    "LabPose",
    "DEFAULT_SUBSTEP",
    "cw_matrices",
    "cw_derivative",
    "step",
    "step_vector",
    "rk4_zoh_map",
    "cw_stm",
    "analytic_propagate",
    "sun_vector",
    "space_to_lab",
    "lab_to_space",
]

TWO_PI = 2.0 * math.pi

#: Default inner RK4 step in space-frame seconds.  Far below the error floor
#: for this linear system; chosen to divide typical control periods evenly.
DEFAULT_SUBSTEP = 0.2


@dataclass(frozen=True)
class DynamicsParams:
    """Physical constants of the chief/deputy pair.

    Attributes
    ----------
    mean_motion : float
        Mean motion of the chief's circular orbit [rad/s].
    mass : float
        Deputy mass [kg].
    u_max : float
        Per-axis thrust limit [N].
    """

    mean_motion: float = 0.001027
    mass: float = 12.0
    u_max: float = 1.0

    def __post_init__(self):
        if not (self.mean_motion > 0.0 and self.mass > 0.0 and self.u_max > 0.0):
            raise ValueError("mean_motion, mass and u_max must all be positive")


@dataclass
class RelativeState:
    """Deputy state in Hill's frame plus sun geometry and clock.

    ``sun_angle`` is stored unwrapped (monotone in time); use
    :meth:`sun_angle_wrapped` at API boundaries that expect [0, 2pi).
    """

    position: np.ndarray  # [m], shape (3,)
    velocity: np.ndarray  # [m/s], shape (3,)
    sun_angle: float = 0.0  # [rad], unwrapped
    t: float = 0.0  # [s], space frame

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).reshape(3).copy()
        self.velocity = np.asarray(self.velocity, dtype=float).reshape(3).copy()
        self.sun_angle = float(self.sun_angle)
        self.t = float(self.t)
        if not (
            np.all(np.isfinite(self.position))
            and np.all(np.isfinite(self.velocity))
            and math.isfinite(self.sun_angle)
            and math.isfinite(self.t)
        ):
            raise ValueError("RelativeState components must be finite")

    def vector(self) -> np.ndarray:
        """Return the 6-vector [x, y, z, xd, yd, zd]."""
        return np.concatenate([self.position, self.velocity])

    @classmethod
    def from_vector(cls, vec, sun_angle: float = 0.0, t: float = 0.0) -> "RelativeState":
        vec = np.asarray(vec, dtype=float).reshape(6)
        return cls(vec[:3], vec[3:], sun_angle, t)

    def sun_angle_wrapped(self) -> float:
        """Sun angle wrapped to [0, 2pi)."""
        return self.sun_angle % TWO_PI


@dataclass(frozen=True)
class LabPose:
    """Deputy pose expressed in laboratory units (scaled Hill frame)."""

    position: np.ndarray  # [m] lab
    velocity: np.ndarray  # [m/s] lab
    t: float  # [s] lab


def cw_matrices(params: DynamicsParams) -> tuple[np.ndarray, np.ndarray]:
    """Return the Clohessy-Wiltshire system pair (A, B) for xdot = A x + B u.

    State order is [x, y, z, xd, yd, zd]; u is the thrust force [N] per axis.
    """
    n = params.mean_motion
    A = np.zeros((6, 6))
    A[:3, 3:] = np.eye(3)
    A[3, 0] = 3.0 * n * n
    A[3, 4] = 2.0 * n
    A[4, 3] = -2.0 * n
    A[5, 2] = -n * n
    B = np.zeros((6, 3))
    B[3:, :] = np.eye(3) / params.mass
    return A, B


def _require_finite(arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} must be finite")
    return arr


def cw_derivative(state: RelativeState, u, params: DynamicsParams) -> np.ndarray:
    """Time derivative [xd, yd, zd, xdd, ydd, zdd, theta_dot] at ``state``.

    ``u`` is the thrust force vector [N]; the sun angle rate is -n.
    Raises ``ValueError`` on non-finite input.
    """
    u = _require_finite(u, "control").reshape(3)
    x = _require_finite(state.vector(), "state")
    A, _ = cw_matrices(params)
    dx = A @ x
    dx[3:] += u / params.mass
    return np.concatenate([dx, [-params.mean_motion]])


def _accel_vector(u, params: DynamicsParams) -> np.ndarray:
    u = _require_finite(u, "control").reshape(3)
    return u / params.mass


def step_vector(x, u, dt: float, params: DynamicsParams,
                max_substep: float = DEFAULT_SUBSTEP) -> np.ndarray:
    """RK4 propagation of the 6-state under zero-order-hold thrust.

    ``x`` may be a single state of shape (6,) or a batch of shape (6, N);
    the same integration map is applied column-wise.  ``dt`` is subdivided
    into equal substeps no longer than ``max_substep``.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    x = _require_finite(x, "state").astype(float, copy=True)
    a = _accel_vector(u, params)
    A, _ = cw_matrices(params)
    n_sub = max(1, math.ceil(dt / max_substep - 1e-12))
    h = dt / n_sub
    b = np.zeros(6)
    b[3:] = a
    if x.ndim == 2:
        b = b[:, None]
    for _ in range(n_sub):
        k1 = A @ x + b
        k2 = A @ (x + 0.5 * h * k1) + b
        k3 = A @ (x + 0.5 * h * k2) + b
        k4 = A @ (x + h * k3) + b
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


def step(state: RelativeState, u, dt: float, params: DynamicsParams,
         max_substep: float = DEFAULT_SUBSTEP) -> RelativeState:
    """Advance ``state`` by ``dt`` seconds under constant thrust ``u``.

    Position/velocity integrate with fixed-step RK4; the sun angle and clock
    advance exactly (theta -= n*dt, t += dt).
    """
    x = step_vector(state.vector(), u, dt, params, max_substep)
    return RelativeState(
        x[:3], x[3:],
        state.sun_angle - params.mean_motion * dt,
        state.t + dt,
    )


def rk4_zoh_map(params: DynamicsParams, h: float) -> tuple[np.ndarray, np.ndarray]:
    """One RK4 substep of the linear system as an affine map.

    Returns (M, N) such that x(t+h) = M @ x(t) + N @ a for constant
    acceleration input a [m/s^2].  For linear dynamics the classic RK4
    stage sum collapses to the degree-4 Taylor polynomial of the matrix
    exponential, so applying this map repeatedly reproduces
    :func:`step_vector` to rounding error.
    """
    A, _ = cw_matrices(params)
    I = np.eye(6)
    A2 = A @ A
    A3 = A2 @ A
    A4 = A3 @ A
    M = I + h * A + (h**2 / 2.0) * A2 + (h**3 / 6.0) * A3 + (h**4 / 24.0) * A4
    E = np.zeros((6, 3))
    E[3:, :] = np.eye(3)
    N = (h * I + (h**2 / 2.0) * A + (h**3 / 6.0) * A2 + (h**4 / 24.0) * A3) @ E
    return M, N


def cw_stm(n: float, t: float) -> np.ndarray:
    """Closed-form Clohessy-Wiltshire state transition matrix Phi(t).

    Maps a free-motion (u = 0) state [x, y, z, xd, yd, zd] at time 0 to the
    state at time ``t``.  Exact to machine precision; serves as the oracle
    for the RK4 integrator.
    """
    nt = n * t
    c = math.cos(nt)
    s = math.sin(nt)
    return np.array([
        [4.0 - 3.0 * c, 0.0, 0.0, s / n, 2.0 * (1.0 - c) / n, 0.0],
        [6.0 * (s - nt), 1.0, 0.0, 2.0 * (c - 1.0) / n, (4.0 * s - 3.0 * nt) / n, 0.0],
        [0.0, 0.0, c, 0.0, 0.0, s / n],
        [3.0 * n * s, 0.0, 0.0, c, 2.0 * s, 0.0],
        [6.0 * n * (c - 1.0), 0.0, 0.0, -2.0 * s, 4.0 * c - 3.0, 0.0],
        [0.0, 0.0, -n * s, 0.0, 0.0, c],
    ])


def analytic_propagate(state: RelativeState, t: float,
                       params: DynamicsParams) -> RelativeState:
    """Exact free-motion state ``t`` seconds ahead of ``state`` (u = 0)."""
    x = _require_finite(state.vector(), "state")
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    x_t = cw_stm(params.mean_motion, t) @ x
    return RelativeState(
        x_t[:3], x_t[3:],
        state.sun_angle - params.mean_motion * t,
        state.t + t,
    )


def sun_vector(angle: float) -> np.ndarray:
    """Unit vector from the chief toward the Sun for sun angle ``angle``.

    The Sun rotates in the x-y plane of Hill's frame, so the z component
    is identically zero.
    """
    if not math.isfinite(angle):
        raise ValueError("sun angle must be finite")
    return np.array([math.cos(angle), math.sin(angle), 0.0])


def _check_scales(position_scale: float, time_scale: float):
    if not (position_scale > 0.0 and time_scale > 0.0):
        raise ValueError("position_scale and time_scale must be positive")


def space_to_lab(state: RelativeState, position_scale: float,
                 time_scale: float) -> LabPose:
    """Scale a space-frame state into the laboratory flight volume.

    Positions and times are divided by their scales; velocities pick up the
    factor time_scale / position_scale.
    """
    _check_scales(position_scale, time_scale)
    return LabPose(
        position=state.position / position_scale,
        velocity=state.velocity * (time_scale / position_scale),
        t=state.t / time_scale,
    )


def lab_to_space(pose: LabPose, position_scale: float, time_scale: float,
                 sun_angle: float = 0.0) -> RelativeState:
    """Inverse of :func:`space_to_lab`.  The sun angle is frame-independent
    and must be supplied by the caller."""
    _check_scales(position_scale, time_scale)
    return RelativeState(
        np.asarray(pose.position, dtype=float) * position_scale,
        np.asarray(pose.velocity, dtype=float) * (position_scale / time_scale),
        sun_angle,
        pose.t * time_scale,
    )
