"""Safety constraints for the inspection task as control barrier functions.

Six barrier functions define the joint safe set:

  h1 = sqrt(2 a_max (|p| - (r_d + r_c))) + rdot     keep-out / braking cone
  h2 = sqrt(2 a_max (r_max - |p|)) - rdot           keep-in  / braking cone
  h3 = nu0 + nu1 |p| - |v|                          distance-scaled speed limit
  h4..h6 = v_max^2 - (xd, yd, zd)^2                 per-axis velocity limits

with rdot = p.v/|p| the range rate (negative when approaching the chief).
Each constraint linearizes into a control-affine row c.u + b >= 0 with
c = L_g h and b = L_f h + alpha(h), alpha(h) = gain*h.

Outside their nominal domains the square roots extend as odd functions,
sign(s)*sqrt(2 a_max |s|), so a violated constraint reports a meaningful
depth and the filter degrades gracefully.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import DynamicsParams, RelativeState, cw_matrices

__all__ = [
    "SafetyParams",
    "CbfRow",
    "DEFAULT_ALPHA_GAINS",
    "NUM_CONSTRAINTS",
    "h_values",
    "h_values_batch",
    "grad_h",
    "grad_h_batch",
    "cbf_rows",
    "cbf_rows_batch",
    "is_safe",
]

NUM_CONSTRAINTS = 6

# Linear class-K gains per constraint, tuned for zero-order-hold filtering
# at the default 0.5 Hz control rate.  The velocity barriers (h3..h6) use
# gain * period <= 0.8 so their discrete riding map contracts without
# overshoot; the braking-cone gains trade a slightly deeper sampled-data
# excursion for fast, tight settling on the keep-out boundary.
DEFAULT_ALPHA_GAINS = np.array([1.0, 1.0, 0.4, 0.4, 0.4, 0.4])

_SMOOTH_FLOOR = 1e-6  # floor on norms/radicands at singular points


@dataclass(frozen=True)
class SafetyParams:
    """Constants of the six safety constraints (defaults per the mission)."""

    a_max: float = 0.078  # [m/s^2] max deceleration available for braking
    r_d: float = 5.0  # [m] deputy radius
    r_c: float = 5.0  # [m] chief radius
    r_max: float = 1000.0  # [m] keep-in radius
    nu0: float = 0.2  # [m/s] speed allowance at the origin
    nu1: float = 2.0 * 0.001027  # [1/s] speed allowance growth with range
    v_max: float = 1.0  # [m/s] per-axis speed limit

    def __post_init__(self):
        vals = (self.a_max, self.r_d, self.r_c, self.r_max,
                self.nu0, self.nu1, self.v_max)
        if not all(v > 0.0 for v in vals):
            raise ValueError("all safety parameters must be positive")
        if not self.r_d + self.r_c < self.r_max:
            raise ValueError("keep-out radius must be smaller than keep-in radius")

    @property
    def collision_radius(self) -> float:
        return self.r_d + self.r_c


@dataclass
class CbfRow:
    """One linearized constraint c . u + b >= 0 on the thrust vector."""

    c: np.ndarray  # (3,)
    b: float
    smoothed: bool = False  # True when a singularity floor was applied


def _as_state_matrix(x) -> tuple[np.ndarray, bool]:
    """Normalize input to shape (N, 6); returns (array, was_single)."""
    if isinstance(x, RelativeState):
        return x.vector()[None, :], True
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        return arr.reshape(1, 6), True
    return arr.reshape(-1, 6), False


def _signed_sqrt(s: np.ndarray, a_max: float) -> np.ndarray:
    """Odd extension of sqrt(2 a_max s)."""
    return np.sign(s) * np.sqrt(2.0 * a_max * np.abs(s))


def h_values_batch(states, params: SafetyParams) -> np.ndarray:
    """Barrier values for states of shape (N, 6); returns (N, 6)."""
    X, _ = _as_state_matrix(states)
    p = X[:, :3]
    v = X[:, 3:]
    rho = np.linalg.norm(p, axis=1)
    speed = np.linalg.norm(v, axis=1)
    pv = np.einsum("ij,ij->i", p, v)
    rdot = np.where(rho > 0.0, pv / np.where(rho > 0.0, rho, 1.0), 0.0)
    h = np.empty((X.shape[0], NUM_CONSTRAINTS))
    h[:, 0] = _signed_sqrt(rho - params.collision_radius, params.a_max) + rdot
    h[:, 1] = _signed_sqrt(params.r_max - rho, params.a_max) - rdot
    h[:, 2] = params.nu0 + params.nu1 * rho - speed
    h[:, 3:] = params.v_max**2 - v**2
    return h


def h_values(state, params: SafetyParams) -> np.ndarray:
    """Barrier values h1..h6 as a 6-vector for a single state."""
    return h_values_batch(state, params)[0]


def grad_h_batch(states, params: SafetyParams) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients dh_i/dx for states (N, 6).

    Returns (grads, smoothed) with grads of shape (N, 6, 6) indexed
    [state, constraint, component] and smoothed of shape (N, 6) flagging
    constraints where a singularity floor was applied.
    """
    X, _ = _as_state_matrix(states)
    N = X.shape[0]
    p = X[:, :3]
    v = X[:, 3:]
    rho_raw = np.linalg.norm(p, axis=1)
    speed_raw = np.linalg.norm(v, axis=1)
    rho = np.maximum(rho_raw, _SMOOTH_FLOOR)
    speed = np.maximum(speed_raw, _SMOOTH_FLOOR)
    p_hat = p / rho[:, None]
    v_hat = v / speed[:, None]
    rdot = np.einsum("ij,ij->i", p, v) / rho
    # d(rdot)/dp = (v - rdot p_hat)/rho, d(rdot)/dv = p_hat
    drdot_dp = (v - rdot[:, None] * p_hat) / rho[:, None]

    s1_raw = np.abs(rho_raw - params.collision_radius)
    s2_raw = np.abs(params.r_max - rho_raw)
    root1 = np.maximum(np.sqrt(2.0 * params.a_max * s1_raw), _SMOOTH_FLOOR)
    root2 = np.maximum(np.sqrt(2.0 * params.a_max * s2_raw), _SMOOTH_FLOOR)
    q1 = params.a_max / root1  # d/d rho of the signed sqrt (same both sides)
    q2 = params.a_max / root2

    G = np.zeros((N, NUM_CONSTRAINTS, 6))
    G[:, 0, :3] = q1[:, None] * p_hat + drdot_dp
    G[:, 0, 3:] = p_hat
    G[:, 1, :3] = -q2[:, None] * p_hat - drdot_dp
    G[:, 1, 3:] = -p_hat
    G[:, 2, :3] = params.nu1 * p_hat
    G[:, 2, 3:] = -v_hat
    for axis in range(3):
        G[:, 3 + axis, 3 + axis] = -2.0 * v[:, axis]

    smoothed = np.zeros((N, NUM_CONSTRAINTS), dtype=bool)
    rho_floor = rho_raw < _SMOOTH_FLOOR
    smoothed[:, 0] = rho_floor | (np.sqrt(2.0 * params.a_max * s1_raw) < _SMOOTH_FLOOR)
    smoothed[:, 1] = rho_floor | (np.sqrt(2.0 * params.a_max * s2_raw) < _SMOOTH_FLOOR)
    smoothed[:, 2] = rho_floor | (speed_raw < _SMOOTH_FLOOR)
    return G, smoothed


def grad_h(state, params: SafetyParams, i: int) -> np.ndarray:
    """Analytic gradient of h_i (i in 0..5) as a 6-vector."""
    if not 0 <= i < NUM_CONSTRAINTS:
        raise IndexError("constraint index out of range")
    G, _ = grad_h_batch(state, params)
    return G[0, i]


def cbf_rows_batch(states, params: SafetyParams, dyn: DynamicsParams,
                   alphas=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Linearized constraint rows for states (N, 6).

    Returns (C, b, smoothed): C of shape (N, 6, 3) with c_i = L_g h_i,
    b of shape (N, 6) with b_i = L_f h_i + gain_i * h_i.
    """
    X, _ = _as_state_matrix(states)
    gains = DEFAULT_ALPHA_GAINS if alphas is None else np.asarray(alphas, dtype=float)
    if gains.shape != (NUM_CONSTRAINTS,):
        raise ValueError("alphas must provide one gain per constraint")
    if np.any(gains <= 0.0):
        raise ValueError("class-K gains must be positive")
    A, _ = cw_matrices(dyn)
    h = h_values_batch(X, params)
    G, smoothed = grad_h_batch(X, params)
    f = X @ A.T  # drift f(x) = A x, row-wise
    Lf = np.einsum("nij,nj->ni", G, f)
    C = G[:, :, 3:] / dyn.mass  # L_g h rows
    b = Lf + gains[None, :] * h
    return C, b, smoothed


def cbf_rows(state, params: SafetyParams, dyn: DynamicsParams,
             alphas=None) -> list[CbfRow]:
    """Constraint rows c . u + b >= 0 for a single state."""
    C, b, smoothed = cbf_rows_batch(state, params, dyn, alphas)
    return [CbfRow(C[0, i].copy(), float(b[0, i]), bool(smoothed[0, i]))
            for i in range(NUM_CONSTRAINTS)]


def is_safe(state, params: SafetyParams) -> bool:
    """True iff every barrier is non-negative at ``state``."""
    return bool(np.min(h_values(state, params)) >= 0.0)
