"""Episodic environment for the inspection task.

Mirrors the training environment's semantics: 10 s steps under zero-order
hold, one inspection update per step, reward 0.1 * (newly inspected points)
- 0.1 * (step delta-v), and termination when the sphere is fully inspected
or after 1223 steps.  Observations come in two flavours:

    no_sensors : [x, y, z, xd, yd, zd]            (positions / 100, velocities * 2)
    all_sensors: + [N_p / 100, sun angle,
                    x_UPS, y_UPS, z_UPS]          (uninspected-cluster unit vector)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import inspection
from .dynamics import DynamicsParams, RelativeState, step

__all__ = [
    "OBS_NO_SENSORS",
    "OBS_ALL_SENSORS",
    "POSITION_NORM",
    "VELOCITY_NORM",
    "POINTS_NORM",
    "MAX_EPISODE_STEPS",
    "RL_STEP_SECONDS",
    "PAPER_INITIAL_STATE",
    "PAPER_INITIAL_SUN_ANGLE",
    "delta_v",
    "normalize_state",
    "denormalize_state",
    "build_observation",
    "EnvConfig",
    "InspectionEnv",
]

OBS_NO_SENSORS = "no_sensors"
OBS_ALL_SENSORS = "all_sensors"

POSITION_NORM = 100.0  # positions divided by this
VELOCITY_NORM = 2.0  # velocities multiplied by this
POINTS_NORM = 100.0  # inspected-point count divided by this

MAX_EPISODE_STEPS = 1223
RL_STEP_SECONDS = 10.0

# Reference initial condition used by all experiments:
# [x, y, z, xd, yd, zd] in m and m/s, plus the initial sun angle in rad.
PAPER_INITIAL_STATE = np.array([21.8, -11.3, 41.8, 0.0, 0.0, 0.0])
PAPER_INITIAL_SUN_ANGLE = 3.42


def delta_v(action, dt: float, mass: float) -> float:
    """Fuel-use proxy (|Fx| + |Fy| + |Fz|) / m * dt in m/s."""
    if dt <= 0.0 or mass <= 0.0:
        raise ValueError("dt and mass must be positive")
    F = np.asarray(action, dtype=float).reshape(3)
    return float(np.abs(F).sum() / mass * dt)


def normalize_state(vec6) -> np.ndarray:
    x = np.asarray(vec6, dtype=float).reshape(6)
    out = np.empty(6)
    out[:3] = x[:3] / POSITION_NORM
    out[3:] = x[3:] * VELOCITY_NORM
    return out


def denormalize_state(obs6) -> np.ndarray:
    o = np.asarray(obs6, dtype=float).reshape(6)
    out = np.empty(6)
    out[:3] = o[:3] * POSITION_NORM
    out[3:] = o[3:] / VELOCITY_NORM
    return out


def build_observation(state: RelativeState, sphere, mode: str,
                      k: int = inspection.DEFAULT_CLUSTER_COUNT,
                      seed: int = inspection.KMEANS_SEED) -> np.ndarray:
    """Observation vector for ``mode``; the cluster direction is recomputed
    on every call with the module-fixed seed."""
    base = normalize_state(state.vector())
    if mode == OBS_NO_SENSORS:
        return base
    if mode != OBS_ALL_SENSORS:
        raise ValueError(f"unknown observation mode {mode!r}")
    cluster = inspection.nearest_uninspected_cluster(sphere, state.position, k, seed)
    extra = np.empty(5)
    extra[0] = inspection.inspected_count(sphere) / POINTS_NORM
    extra[1] = state.sun_angle_wrapped()
    extra[2:] = cluster.direction
    return np.concatenate([base, extra])


@dataclass
class EnvConfig:
    mode: str = OBS_NO_SENSORS
    illumination: bool = False
    initial_state: np.ndarray = field(
        default_factory=lambda: PAPER_INITIAL_STATE.copy())
    initial_sun_angle: float = PAPER_INITIAL_SUN_ANGLE
    dt: float = RL_STEP_SECONDS
    max_steps: int = MAX_EPISODE_STEPS
    sphere_radius: float = inspection.SPHERE_RADIUS
    cluster_k: int = inspection.DEFAULT_CLUSTER_COUNT
    dynamics: DynamicsParams = field(default_factory=DynamicsParams)


class InspectionEnv:
    """Gym-style episode: reset() -> obs, step(action) -> (obs, r, done, info)."""

    def __init__(self, config: EnvConfig | None = None):
        self.config = config if config is not None else EnvConfig()
        self.state: RelativeState | None = None
        self.sphere = None
        self.total_delta_v = 0.0
        self.total_reward = 0.0
        self.step_index = 0
        self.done = False
        self._seed = inspection.KMEANS_SEED

    def reset(self, seed: int | None = None) -> np.ndarray:
        """Start a fresh episode; deterministic for a given seed."""
        cfg = self.config
        self._seed = inspection.KMEANS_SEED if seed is None else int(seed)
        self.state = RelativeState(
            cfg.initial_state[:3], cfg.initial_state[3:],
            cfg.initial_sun_angle, 0.0)
        self.sphere = inspection.generate_points(cfg.sphere_radius)
        self.total_delta_v = 0.0
        self.total_reward = 0.0
        self.step_index = 0
        self.done = False
        return self.observe()

    def observe(self) -> np.ndarray:
        return build_observation(self.state, self.sphere, self.config.mode,
                                 self.config.cluster_k, self._seed)

    def step(self, action):
        """Apply a thrust command for one 10 s step.

        Returns (observation, reward, done, info).  Raises if the episode
        already terminated.
        """
        if self.state is None:
            raise RuntimeError("call reset() before step()")
        if self.done:
            raise RuntimeError("episode is done; call reset()")
        cfg = self.config
        u = np.clip(np.asarray(action, dtype=float).reshape(3),
                    -cfg.dynamics.u_max, cfg.dynamics.u_max)
        self.state = step(self.state, u, cfg.dt, cfg.dynamics)
        newly = inspection.update_inspected(
            self.sphere, self.state.position, self.state.sun_angle,
            cfg.illumination)
        dv = delta_v(u, cfg.dt, cfg.dynamics.mass)
        self.total_delta_v += dv
        reward = 0.1 * newly - 0.1 * dv
        self.total_reward += reward
        self.step_index += 1
        inspected = inspection.inspected_count(self.sphere)
        if inspected == len(self.sphere.inspected) or self.step_index >= cfg.max_steps:
            self.done = True
        info = {
            "newly_inspected": newly,
            "inspected": inspected,
            "step_delta_v": dv,
            "total_delta_v": self.total_delta_v,
            "t": self.state.t,
        }
        return self.observe(), reward, self.done, info

    def summary(self) -> dict:
        """Episode summary in the external JSON schema."""
        inspected = inspection.inspected_count(self.sphere) if self.sphere is not None else 0
        total = len(self.sphere.inspected) if self.sphere is not None else 0
        return {
            "inspected": inspected,
            "delta_v": self.total_delta_v,
            "reward": self.total_reward,
            "steps": self.step_index,
            "success": bool(total and inspected == total),
        }
