"""Primary controllers: LQR to the origin, MLP policy inference, and a
scripted circumnavigation controller used as a stand-in for trained policies.

The MLP weights travel in a JSON document:

    {"input_dim": 6,
     "layers": [{"rows": 256, "cols": 6,
                 "weights": [...row-major floats...],
                 "bias": [...], "activation": "tanh"}, ...]}

The canonical policy architecture has two tanh hidden layers of width 256
and a linear output layer of 6 nodes (mean and variance per thrust axis);
inference uses only the three mean outputs.  The loader validates the
dimension chain, the 6/11 input width and the activation names, but accepts
other hidden widths so small test policies stay cheap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import solve_continuous_are

from .dynamics import DynamicsParams, RelativeState, cw_matrices

__all__ = [
    "LqrController",
    "lqr_design",
    "lqr_control",
    "MlpLayer",
    "MlpPolicy",
    "mlp_load",
    "mlp_loads",
    "mlp_save",
    "mlp_act",
    "random_policy",
    "ScriptedOrbitController",
    "scripted_orbit",
]

VALID_INPUT_DIMS = (6, 11)
OUTPUT_DIM = 6
_ACTIVATIONS = {"tanh": np.tanh, "linear": lambda x: x}

DEFAULT_LQR_Q = 1e-3 * np.eye(6)
DEFAULT_LQR_R = np.eye(3)


@dataclass(frozen=True)
class LqrController:
    K: np.ndarray  # (3, 6) feedback gain
    Q: np.ndarray
    R: np.ndarray


def lqr_design(dyn: DynamicsParams, Q=None, R=None) -> LqrController:
    """Continuous-time LQR gain for the relative-motion pair (A, B).

    Solves the algebraic Riccati equation and enforces that the closed loop
    A - B K is Hurwitz.
    """
    Q = DEFAULT_LQR_Q if Q is None else np.asarray(Q, dtype=float)
    R = DEFAULT_LQR_R if R is None else np.asarray(R, dtype=float)
    A, B = cw_matrices(dyn)
    P = solve_continuous_are(A, B, Q, R)
    K = np.linalg.solve(R, B.T @ P)
    eigs = np.linalg.eigvals(A - B @ K)
    if not np.all(eigs.real < 0.0):
        raise ValueError("LQR design failed: closed loop is not Hurwitz")
    return LqrController(K, Q, R)


def _state_vector(state) -> np.ndarray:
    if isinstance(state, RelativeState):
        return state.vector()
    return np.asarray(state, dtype=float).reshape(6)


def lqr_control(ctrl: LqrController, state, dyn: DynamicsParams) -> np.ndarray:
    """u = clamp(-K x) to the per-axis thrust box."""
    u = -ctrl.K @ _state_vector(state)
    return np.clip(u, -dyn.u_max, dyn.u_max)


@dataclass
class MlpLayer:
    weights: np.ndarray  # (rows, cols), applied as y = W x + b
    bias: np.ndarray  # (rows,)
    activation: str


@dataclass
class MlpPolicy:
    layers: list
    input_dim: int
    output_dim: int = OUTPUT_DIM


def _validate_policy(layers, input_dim: int) -> MlpPolicy:
    if input_dim not in VALID_INPUT_DIMS:
        raise ValueError(f"input_dim must be one of {VALID_INPUT_DIMS}, got {input_dim}")
    if not layers:
        raise ValueError("policy must have at least one layer")
    prev = input_dim
    for k, layer in enumerate(layers):
        if layer.activation not in _ACTIVATIONS:
            raise ValueError(f"layer {k}: unknown activation {layer.activation!r}")
        rows, cols = layer.weights.shape
        if cols != prev:
            raise ValueError(
                f"layer {k}: expected {prev} input columns, got {cols}")
        if layer.bias.shape != (rows,):
            raise ValueError(f"layer {k}: bias length {layer.bias.shape} != rows {rows}")
        if not (np.all(np.isfinite(layer.weights)) and np.all(np.isfinite(layer.bias))):
            raise ValueError(f"layer {k}: non-finite parameters")
        prev = rows
    if prev != OUTPUT_DIM:
        raise ValueError(f"final layer must have {OUTPUT_DIM} outputs, got {prev}")
    if layers[-1].activation != "linear":
        raise ValueError("final layer activation must be linear")
    return MlpPolicy(list(layers), input_dim)


def _policy_from_dict(doc: dict) -> MlpPolicy:
    try:
        input_dim = int(doc["input_dim"])
        raw_layers = doc["layers"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed weights document: {exc}") from exc
    layers = []
    for k, entry in enumerate(raw_layers):
        try:
            rows = int(entry["rows"])
            cols = int(entry["cols"])
            w = np.asarray(entry["weights"], dtype=float)
            bias = np.asarray(entry["bias"], dtype=float)
            activation = str(entry["activation"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"layer {k}: malformed entry: {exc}") from exc
        if w.size != rows * cols:
            raise ValueError(
                f"layer {k}: weights length {w.size} != rows*cols {rows * cols}")
        layers.append(MlpLayer(w.reshape(rows, cols), bias.reshape(-1), activation))
    return _validate_policy(layers, input_dim)


def mlp_loads(text: str) -> MlpPolicy:
    """Parse and validate a weights document from a JSON string."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed weights document: {exc}") from exc
    return _policy_from_dict(doc)


def mlp_load(path) -> MlpPolicy:
    """Load and validate a weights document from ``path``."""
    return mlp_loads(Path(path).read_text())


def mlp_save(policy: MlpPolicy, path) -> None:
    doc = {
        "input_dim": policy.input_dim,
        "layers": [
            {
                "rows": int(layer.weights.shape[0]),
                "cols": int(layer.weights.shape[1]),
                "weights": layer.weights.ravel().tolist(),
                "bias": layer.bias.tolist(),
                "activation": layer.activation,
            }
            for layer in policy.layers
        ],
    }
    Path(path).write_text(json.dumps(doc))


def mlp_act(policy: MlpPolicy, observation, u_max: float = 1.0) -> np.ndarray:
    """Deterministic forward pass; the first three outputs are the mean
    thrust commands, clamped to the box."""
    x = np.asarray(observation, dtype=float).reshape(-1)
    if x.shape != (policy.input_dim,):
        raise ValueError(
            f"observation length {x.shape[0]} != input_dim {policy.input_dim}")
    for layer in policy.layers:
        x = _ACTIVATIONS[layer.activation](layer.weights @ x + layer.bias)
    return np.clip(x[:3], -u_max, u_max)


def random_policy(input_dim: int, hidden=(256, 256), seed: int = 0,
                  scale: float = 0.05) -> MlpPolicy:
    """Randomly initialized policy with the canonical tanh/linear stack."""
    rng = np.random.default_rng(seed)
    dims = [input_dim, *hidden, OUTPUT_DIM]
    layers = []
    for k in range(len(dims) - 1):
        w = scale * rng.standard_normal((dims[k + 1], dims[k]))
        bias = np.zeros(dims[k + 1])
        activation = "tanh" if k < len(dims) - 2 else "linear"
        layers.append(MlpLayer(w, bias, activation))
    return _validate_policy(layers, input_dim)


class ScriptedOrbitController:
    """Feedback controller tracking a constant-rate circle about the chief.

    The reference is the nearest point on the circle of ``radius`` in the
    plane orthogonal to ``plane_normal``, moving tangentially at
    ``rate`` * ``radius``.  The control law cancels the natural relative
    acceleration and applies critically damped PD tracking, so a deputy on
    the reference needs only the small centripetal feedforward.
    """

    def __init__(self, radius: float, plane_normal=(0.0, 1.0, 0.0),
                 rate: float | None = None, gain: float = 0.002,
                 params: DynamicsParams | None = None):
        self.params = params if params is not None else DynamicsParams()
        if radius <= 0.0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        normal = np.asarray(plane_normal, dtype=float).reshape(3)
        norm = np.linalg.norm(normal)
        if norm == 0.0:
            raise ValueError("plane_normal must be nonzero")
        self.normal = normal / norm
        self.rate = 2.0 * self.params.mean_motion if rate is None else float(rate)
        self.gain = float(gain)
        self.kv = 2.0 * math.sqrt(self.gain)
        # deterministic in-plane basis: reference axis least aligned with n
        ref = np.zeros(3)
        ref[int(np.argmin(np.abs(self.normal)))] = 1.0
        e1 = ref - np.dot(ref, self.normal) * self.normal
        self.e1 = e1 / np.linalg.norm(e1)
        self.e2 = np.cross(self.normal, self.e1)
        self._A, _ = cw_matrices(self.params)

    def __call__(self, state) -> np.ndarray:
        x = _state_vector(state)
        p, v = x[:3], x[3:]
        p_in = p - np.dot(p, self.normal) * self.normal
        rho = np.linalg.norm(p_in)
        rho_hat = p_in / rho if rho > 1e-9 else self.e1
        tan_hat = np.cross(self.normal, rho_hat)
        p_ref = self.radius * rho_hat
        v_ref = self.rate * self.radius * tan_hat
        a_ref = -self.rate**2 * self.radius * rho_hat
        a_nat = (self._A @ x)[3:]
        a_cmd = a_ref + self.kv * (v_ref - v) + self.gain * (p_ref - p) - a_nat
        return np.clip(self.params.mass * a_cmd,
                       -self.params.u_max, self.params.u_max)


def scripted_orbit(state, radius: float, plane_normal=(0.0, 1.0, 0.0),
                   gain: float = 0.002, params: DynamicsParams | None = None,
                   rate: float | None = None) -> np.ndarray:
    """Single-call form of :class:`ScriptedOrbitController`."""
    ctrl = ScriptedOrbitController(radius, plane_normal, rate, gain, params)
    return ctrl(state)
