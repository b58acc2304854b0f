#!/usr/bin/env python3
"""The policy-weights interface: build, save, validate and run an MLP
controller, and plug it into an experiment."""

import json
import tempfile
from pathlib import Path

import numpy as np

from cwinspect import (ExperimentConfig, mlp_act, mlp_load, mlp_save,
                       random_policy, run)

workdir = Path(tempfile.mkdtemp(prefix="cwinspect_weights_"))

# the canonical stack: 6 inputs -> 256 tanh -> 256 tanh -> 6 linear outputs
policy = random_policy(6, seed=42)
path = workdir / "policy.json"
mlp_save(policy, path)
doc = json.loads(path.read_text())
print(f"wrote {path.name}: input_dim={doc['input_dim']}, layers "
      + " -> ".join(str(l['rows']) for l in doc['layers']))

# the loader validates the dimension chain, activations, and input width
reloaded = mlp_load(path)
obs = np.array([0.218, -0.113, 0.418, 0.0, 0.0, 0.0])
print(f"thrust command for the initial observation: "
      f"{np.round(mlp_act(reloaded, obs), 4)} N")

broken = dict(doc)
broken["input_dim"] = 7
try:
    mlp_load_path = workdir / "broken.json"
    mlp_load_path.write_text(json.dumps(broken))
    mlp_load(mlp_load_path)
except ValueError as exc:
    print(f"rejected a 7-input document as expected: {exc}")

# drop the weights into an experiment config: the policy now drives the
# deputy (randomly initialized, so expect aimless thrusting, kept safe by
# the filter)
cfg = ExperimentConfig(controller="nnc_no_sensors", rta_enabled=True,
                       weights_path=str(path), max_duration=600.0)
log, summary = run(cfg)
print(f"\n600 s under the random policy + filter: "
      f"{summary['inspected']} points, delta-v {summary['delta_v']:.2f} m/s, "
      f"min distance {summary['min_distance']:.1f} m, "
      f"controller = {summary['controller_resolved']}")
