"""Experiment runner: the six reference experiments, open/closed loop,
sensor-noise emulation, trajectory logging and file emission.

Open loop feeds the simulated truth to the controller and filter; closed
loop feeds a noise-corrupted copy and applies a random disturbance
acceleration to the plant, standing in for the flight-volume hardware loop.
Trajectories are logged once per control step and can be written as CSV
(bit-stable), schema-versioned JSON, or a simple SVG plot.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from . import inspection
from .control import (ScriptedOrbitController, lqr_control, lqr_design,
                      mlp_act, mlp_load)
from .dynamics import DynamicsParams, RelativeState, rk4_zoh_map
from .env import OBS_ALL_SENSORS, OBS_NO_SENSORS, PAPER_INITIAL_STATE, \
    PAPER_INITIAL_SUN_ANGLE, build_observation, delta_v
from .rta import filter_control
from .safety import NUM_CONSTRAINTS, SafetyParams, h_values

__all__ = [
    "CONTROLLER_CHOICES",
    "NoiseModel",
    "ExperimentConfig",
    "TrajectoryLog",
    "default_experiment",
    "load_config",
    "inject_noise",
    "run",
    "emit",
    "run_batch",
]

CONTROLLER_CHOICES = (
    "nnc_no_sensors",
    "nnc_all_sensors",
    "best_nnc_no_sensors",
    "best_nnc_all_sensors",
    "lqr",
    "scripted",
)

_NNC_MODES = {
    "nnc_no_sensors": OBS_NO_SENSORS,
    "best_nnc_no_sensors": OBS_NO_SENSORS,
    "nnc_all_sensors": OBS_ALL_SENSORS,
    "best_nnc_all_sensors": OBS_ALL_SENSORS,
}

CSV_COLUMNS = (
    "t", "x", "y", "z", "xd", "yd", "zd", "sun_angle",
    "u_des_x", "u_des_y", "u_des_z", "u_act_x", "u_act_y", "u_act_z",
    "h1", "h2", "h3", "h4", "h5", "h6",
    "intervened", "deviation", "num_points", "delta_v",
)

JSON_SCHEMA_VERSION = 1


@dataclass
class NoiseModel:
    """Gaussian sensing noise and plant disturbance for closed-loop runs.

    Magnitudes are modeling choices, calibrated only to produce visibly
    noisy but trackable runs; a zero-sigma model reproduces the open loop
    record for record.  ``seed`` of None derives the stream from the
    experiment seed.
    """

    position_sigma: float = 0.5  # [m]
    velocity_sigma: float = 0.02  # [m/s]
    disturbance_sigma: float = 5e-5  # [m/s^2]
    seed: int | None = None

    def __post_init__(self):
        if min(self.position_sigma, self.velocity_sigma,
               self.disturbance_sigma) < 0.0:
            raise ValueError("noise sigmas must be non-negative")


@dataclass
class ExperimentConfig:
    controller: str = "scripted"
    rta_enabled: bool = False
    illumination: bool = False
    position_scale: float = 65.0
    time_scale: float = 10.0
    control_rate: float = 0.5  # [Hz] space frame
    sim_rate: float = 5.0  # [Hz] space frame inner integration
    max_duration: float = 6000.0  # [s] space frame
    max_steps: int | None = None
    closed_loop: bool = False
    seed: int = 0
    noise: NoiseModel = field(default_factory=NoiseModel)
    weights_path: str | None = None
    initial_state: tuple = tuple(PAPER_INITIAL_STATE) + (PAPER_INITIAL_SUN_ANGLE,)
    scripted_radius: float = 30.0
    scripted_plane_normal: tuple = (0.0, 1.0, 0.0)
    scripted_gain: float = 0.002
    alpha_gains: tuple | None = None
    aviary_box: tuple = (8.0, 8.0, 4.0)  # [m] lab-frame extents, centered

    def __post_init__(self):
        if self.controller not in CONTROLLER_CHOICES:
            raise ValueError(f"unknown controller {self.controller!r}; "
                             f"choose from {CONTROLLER_CHOICES}")
        if not (self.position_scale > 0.0 and self.time_scale > 0.0):
            raise ValueError("scales must be positive")
        if not (self.control_rate > 0.0 and self.sim_rate > 0.0):
            raise ValueError("rates must be positive")
        if self.control_rate > self.sim_rate:
            raise ValueError("control_rate must not exceed sim_rate")
        if self.max_duration <= 0.0:
            raise ValueError("max_duration must be positive")
        state = tuple(float(v) for v in self.initial_state)
        if len(state) != 7:
            raise ValueError("initial_state must have 7 entries (pos, vel, sun angle)")
        self.initial_state = state
        if isinstance(self.noise, dict):
            try:
                self.noise = NoiseModel(**self.noise)
            except TypeError as exc:
                raise ValueError(f"invalid noise model: {exc}") from exc


@dataclass
class TrajectoryLog:
    """Per-control-step records plus run metadata."""

    t: np.ndarray  # (S,) strictly increasing
    states: np.ndarray  # (S, 7): x, y, z, xd, yd, zd, sun angle
    u_des: np.ndarray  # (S, 3)
    u_act: np.ndarray  # (S, 3)
    h: np.ndarray  # (S, 6)
    intervened: np.ndarray  # (S,) bool
    deviation: np.ndarray  # (S,)
    num_points: np.ndarray  # (S,) int
    delta_v: np.ndarray  # (S,) cumulative
    metadata: dict

    def __len__(self) -> int:
        return len(self.t)

    def row_matrix(self) -> np.ndarray:
        """All records as a (S, 24) float matrix in CSV column order."""
        return np.column_stack([
            self.t, self.states, self.u_des, self.u_act, self.h,
            self.intervened.astype(float), self.deviation,
            self.num_points.astype(float), self.delta_v,
        ])


_EXPERIMENT_TABLE = {
    1: ("nnc_no_sensors", False, False, 65.0, 10.0),
    2: ("lqr", True, False, 65.0, 10.0),
    3: ("nnc_no_sensors", True, False, 65.0, 10.0),
    4: ("nnc_all_sensors", False, True, 300.0, 20.0),
    5: ("best_nnc_no_sensors", True, True, 65.0, 15.0),
    6: ("best_nnc_all_sensors", True, True, 100.0, 20.0),
}


def default_experiment(n: int) -> ExperimentConfig:
    """Reference configuration for experiment ``n`` (1..6)."""
    if n not in _EXPERIMENT_TABLE:
        raise ValueError(f"experiment number must be 1..6, got {n}")
    controller, rta, illum, pos_scale, time_scale = _EXPERIMENT_TABLE[n]
    return ExperimentConfig(
        controller=controller,
        rta_enabled=rta,
        illumination=illum,
        position_scale=pos_scale,
        time_scale=time_scale,
    )


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def load_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig from a JSON key/value file.

    The file may set ``experiment`` (1..6) to start from a reference row;
    every other key must name an ExperimentConfig field and overrides it.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"config file {path} must contain a JSON object")
    doc = dict(doc)
    base = doc.pop("experiment", None)
    unknown = set(doc) - _CONFIG_FIELDS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if base is not None:
        cfg = default_experiment(int(base))
        merged = {**dataclasses.asdict(cfg), **doc}
    else:
        merged = doc
    if "noise" in merged and isinstance(merged["noise"], dict):
        try:
            merged["noise"] = NoiseModel(**merged["noise"])
        except TypeError as exc:
            raise ValueError(f"invalid noise model in {path}: {exc}") from exc
    try:
        return ExperimentConfig(**merged)
    except TypeError as exc:
        raise ValueError(f"invalid config in {path}: {exc}") from exc


def inject_noise(state: RelativeState, model: NoiseModel,
                 rng: np.random.Generator) -> RelativeState:
    """Additive Gaussian noise on position and velocity (three draws each,
    position first).  Deterministic under a fixed generator state."""
    pos = state.position + rng.normal(0.0, model.position_sigma, 3)
    vel = state.velocity + rng.normal(0.0, model.velocity_sigma, 3)
    return RelativeState(pos, vel, state.sun_angle, state.t)


def _resolve_controller(cfg: ExperimentConfig, dyn: DynamicsParams):
    """Build the control callback (state, sphere) -> u_des and its label."""
    name = cfg.controller
    if name == "lqr":
        ctrl = lqr_design(dyn)
        return (lambda state, sphere: lqr_control(ctrl, state, dyn)), "lqr"
    if name == "scripted":
        ctrl = ScriptedOrbitController(
            cfg.scripted_radius, cfg.scripted_plane_normal,
            gain=cfg.scripted_gain, params=dyn)
        return (lambda state, sphere: ctrl(state)), "scripted"
    mode = _NNC_MODES[name]
    if cfg.weights_path:
        policy = mlp_load(cfg.weights_path)
        if (mode == OBS_NO_SENSORS) != (policy.input_dim == 6):
            raise ValueError(
                f"weights input_dim {policy.input_dim} does not match "
                f"controller {name!r}")

        def nnc(state, sphere):
            obs = build_observation(state, sphere, mode)
            return mlp_act(policy, obs, dyn.u_max)

        return nnc, f"mlp:{cfg.weights_path}"
    # no trained weights available: scripted circumnavigation stand-in
    ctrl = ScriptedOrbitController(
        cfg.scripted_radius, cfg.scripted_plane_normal,
        gain=cfg.scripted_gain, params=dyn)
    return (lambda state, sphere: ctrl(state)), f"scripted (stand-in for {name})"


def run(cfg: ExperimentConfig, closed_loop: bool | None = None,
        dyn: DynamicsParams | None = None,
        safety: SafetyParams | None = None) -> tuple[TrajectoryLog, dict]:
    """Simulate one experiment; returns (trajectory log, episode summary).

    Rows are recorded at each control instant: the state at t_k, the raw and
    filtered commands issued there, barrier values of the true state, the
    inspected count after the update at t_k, and the cumulative delta-v
    including the thrust held over [t_k, t_k + 1/control_rate).
    """
    dyn = dyn if dyn is not None else DynamicsParams()
    safety = safety if safety is not None else SafetyParams()
    closed = cfg.closed_loop if closed_loop is None else closed_loop
    alphas = None if cfg.alpha_gains is None else np.asarray(cfg.alpha_gains, float)

    controller, resolved = _resolve_controller(cfg, dyn)

    dt_c = 1.0 / cfg.control_rate
    n_sub = max(1, math.ceil(dt_c * cfg.sim_rate - 1e-9))
    h_sub = dt_c / n_sub
    M, N = rk4_zoh_map(dyn, h_sub)

    max_rows = int(math.ceil(cfg.max_duration * cfg.control_rate - 1e-9))
    if cfg.max_steps is not None:
        max_rows = min(max_rows, cfg.max_steps)

    seed = cfg.noise.seed if cfg.noise.seed is not None else cfg.seed
    rng = np.random.default_rng(seed)

    sphere = inspection.generate_points()
    init = np.asarray(cfg.initial_state, dtype=float)
    x = init[:6].copy()
    theta0 = init[6]
    n_mm = dyn.mean_motion

    rows_t = np.empty(max_rows)
    rows_state = np.empty((max_rows, 7))
    rows_udes = np.empty((max_rows, 3))
    rows_uact = np.empty((max_rows, 3))
    rows_h = np.empty((max_rows, NUM_CONSTRAINTS))
    rows_int = np.zeros(max_rows, dtype=bool)
    rows_dev = np.zeros(max_rows)
    rows_np = np.zeros(max_rows, dtype=int)
    rows_dv = np.zeros(max_rows)

    cum_dv = 0.0
    min_distance = float(np.linalg.norm(x[:3]))
    half_box = 0.5 * np.asarray(cfg.aviary_box, dtype=float)
    in_aviary = bool(np.all(np.abs(x[:3]) / cfg.position_scale <= half_box))
    interventions = 0
    steps = 0
    complete = False

    for k in range(max_rows):
        t_k = k * dt_c
        theta_k = theta0 - n_mm * t_k
        true_state = RelativeState(x[:3], x[3:], theta_k, t_k)

        if closed:
            sensed = inject_noise(true_state, cfg.noise, rng)
        else:
            sensed = true_state

        u_des = np.clip(np.asarray(controller(sensed, sphere), dtype=float).reshape(3),
                        -dyn.u_max, dyn.u_max)
        if cfg.rta_enabled:
            res = filter_control(sensed, u_des, safety, dyn, alphas)
            u_act = res.u_act
            rows_int[k] = res.intervened
            rows_dev[k] = res.deviation
            interventions += int(res.intervened)
        else:
            u_act = u_des

        inspection.update_inspected(sphere, true_state.position,
                                    true_state.sun_angle, cfg.illumination)

        rows_t[k] = t_k
        rows_state[k, :6] = x
        rows_state[k, 6] = theta_k
        rows_udes[k] = u_des
        rows_uact[k] = u_act
        rows_h[k] = h_values(x, safety)
        rows_np[k] = inspection.inspected_count(sphere)
        cum_dv += delta_v(u_act, dt_c, dyn.mass)
        rows_dv[k] = cum_dv
        steps = k + 1

        if rows_np[k] == len(sphere.inspected):
            complete = True
            break

        accel = u_act / dyn.mass
        if closed:
            accel = accel + rng.normal(0.0, cfg.noise.disturbance_sigma, 3)
        for _ in range(n_sub):
            x = M @ x + N @ accel
            dist = float(np.linalg.norm(x[:3]))
            if dist < min_distance:
                min_distance = dist
            if in_aviary and np.any(np.abs(x[:3]) / cfg.position_scale > half_box):
                in_aviary = False

    log = TrajectoryLog(
        t=rows_t[:steps].copy(),
        states=rows_state[:steps].copy(),
        u_des=rows_udes[:steps].copy(),
        u_act=rows_uact[:steps].copy(),
        h=rows_h[:steps].copy(),
        intervened=rows_int[:steps].copy(),
        deviation=rows_dev[:steps].copy(),
        num_points=rows_np[:steps].copy(),
        delta_v=rows_dv[:steps].copy(),
        metadata={
            "controller": cfg.controller,
            "controller_resolved": resolved,
            "rta_enabled": cfg.rta_enabled,
            "illumination": cfg.illumination,
            "closed_loop": closed,
            "seed": cfg.seed,
            "position_scale": cfg.position_scale,
            "time_scale": cfg.time_scale,
            "control_rate": cfg.control_rate,
            "sim_rate": cfg.sim_rate,
            "columns": list(CSV_COLUMNS),
        },
    )

    inspected = int(rows_np[steps - 1]) if steps else 0
    summary = {
        "inspected": inspected,
        "delta_v": cum_dv,
        "reward": 0.1 * inspected - 0.1 * cum_dv,
        "steps": steps,
        "success": complete,
        "min_distance": min_distance,
        "min_h": float(rows_h[:steps].min()) if steps else float("nan"),
        "interventions": interventions,
        "in_aviary": in_aviary,
        "final_distance": float(np.linalg.norm(x[:3])),
        "controller_resolved": resolved,
        "points": {
            "xyz": sphere.points.tolist(),
            "inspected": sphere.inspected.tolist(),
        },
    }
    return log, summary


# -- emission -------------------------------------------------------------

def _format_value(v: float) -> str:
    # 9-digit precision, fixed scientific layout: bit-stable and parses back
    # to within 5e-10 relative
    return f"{v:.9e}"


def _emit_csv(log: TrajectoryLog, path: Path) -> None:
    lines = [",".join(CSV_COLUMNS)]
    mat = log.row_matrix()
    int_cols = {CSV_COLUMNS.index("intervened"), CSV_COLUMNS.index("num_points")}
    for row in mat:
        cells = [
            str(int(val)) if j in int_cols else _format_value(val)
            for j, val in enumerate(row)
        ]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def _emit_json(log: TrajectoryLog, path: Path) -> None:
    doc = {
        "schema_version": JSON_SCHEMA_VERSION,
        "metadata": log.metadata,
        "columns": list(CSV_COLUMNS),
        "rows": [[float(v) for v in row] for row in log.row_matrix()],
    }
    path.write_text(json.dumps(doc))


def _polyline(xs, ys, x0, y0, w, h, color) -> str:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    xmin, xmax = xs.min(), xs.max()
    ymin, ymax = ys.min(), ys.max()
    xr = xmax - xmin or 1.0
    yr = ymax - ymin or 1.0
    px = x0 + (xs - xmin) / xr * w
    py = y0 + h - (ys - ymin) / yr * h
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    return (f'<polyline fill="none" stroke="{color}" stroke-width="1" '
            f'points="{pts}"/>')


def _emit_svg(log: TrajectoryLog, path: Path) -> None:
    """Three panels: x-y path, x-z path, and barrier values vs time."""
    W, H, pad = 1200, 400, 40
    pw = (W - 4 * pad) / 3
    ph = H - 2 * pad
    s = log.states
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
    ]
    panels = [(s[:, 0], s[:, 1], "x [m]", "y [m]"),
              (s[:, 0], s[:, 2], "x [m]", "z [m]")]
    for i, (xs, ys, xl, yl) in enumerate(panels):
        x0 = pad + i * (pw + pad)
        parts.append(f'<rect x="{x0}" y="{pad}" width="{pw:.1f}" height="{ph}" '
                     f'fill="none" stroke="black"/>')
        parts.append(_polyline(xs, ys, x0, pad, pw, ph, "#1f77b4"))
        parts.append(f'<text x="{x0 + pw / 2:.1f}" y="{H - 10}" '
                     f'text-anchor="middle" font-size="14">{xl} vs {yl}</text>')
    x0 = pad + 2 * (pw + pad)
    parts.append(f'<rect x="{x0}" y="{pad}" width="{pw:.1f}" height="{ph}" '
                 f'fill="none" stroke="black"/>')
    colors = ["#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]
    for j in range(NUM_CONSTRAINTS):
        parts.append(_polyline(log.t, log.h[:, j], x0, pad, pw, ph, colors[j]))
    parts.append(f'<text x="{x0 + pw / 2:.1f}" y="{H - 10}" '
                 f'text-anchor="middle" font-size="14">h1..h6 vs t</text>')
    parts.append("</svg>")
    path.write_text("\n".join(parts))


def emit(log: TrajectoryLog, fmt: str, path) -> Path:
    """Write ``log`` to ``path`` as one of csv, json or svg."""
    if len(log) == 0:
        raise ValueError("cannot emit an empty trajectory log")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        _emit_csv(log, path)
    elif fmt == "json":
        _emit_json(log, path)
    elif fmt == "svg":
        _emit_svg(log, path)
    else:
        raise ValueError(f"unknown format {fmt!r} (expected csv, json or svg)")
    return path


# -- batch execution ------------------------------------------------------

def _run_one(args):
    path, out_dir, formats = args
    cfg = load_config(path)
    log, summary = run(cfg)
    stem = Path(path).stem
    run_dir = Path(out_dir) / stem
    run_dir.mkdir(parents=True, exist_ok=True)
    for fmt in formats:
        emit(log, fmt, run_dir / f"trajectory.{fmt}")
    summary_path = run_dir / "summary.json"
    summary_path.write_text(json.dumps(summary))
    brief = {k: summary[k] for k in
             ("inspected", "delta_v", "reward", "steps", "success")}
    return stem, brief


def run_batch(config_dir, out_dir, jobs: int = 1,
              formats=("csv", "json")) -> dict:
    """Run every ``*.json`` config under ``config_dir`` and merge summaries.

    Runs execute in parallel worker processes; each config carries its own
    seed so streams stay isolated.  Returns the merged index, also written
    to ``out_dir``/index.json.
    """
    paths = sorted(Path(config_dir).glob("*.json"))
    if not paths:
        raise ValueError(f"no *.json configs found in {config_dir}")
    tasks = [(str(p), str(out_dir), tuple(formats)) for p in paths]
    if jobs > 1:
        with Pool(processes=jobs) as pool:
            results = pool.map(_run_one, tasks)
    else:
        results = [_run_one(t) for t in tasks]
    index = {name: brief for name, brief in results}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "index.json").write_text(json.dumps(index, indent=2))
    return index
