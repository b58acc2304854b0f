"""Simulation and run-time assurance for the on-orbit inspection task.

A deputy spacecraft propagated with Clohessy-Wiltshire relative dynamics
inspects a 99-point chief model while an Active Set Invariance Filter built
on six control barrier functions keeps arbitrary primary controllers safe.
"""

from .control import (LqrController, MlpPolicy, ScriptedOrbitController,
                      lqr_control, lqr_design, mlp_act, mlp_load, mlp_save,
                      random_policy, scripted_orbit)
from .dynamics import (DynamicsParams, LabPose, RelativeState,
                       analytic_propagate, cw_derivative, cw_matrices, cw_stm,
                       lab_to_space, space_to_lab, step, sun_vector)
from .env import (EnvConfig, InspectionEnv, build_observation, delta_v,
                  normalize_state)
from .harness import (ExperimentConfig, NoiseModel, TrajectoryLog,
                      default_experiment, emit, inject_noise, load_config,
                      run, run_batch)
from .inspection import (ClusterResult, InspectionSphere, generate_points,
                         inspected_count, nearest_uninspected_cluster,
                         update_inspected)
from .rta import FilterResult, filter_control, infeasible_fallback, solve_qp
from .safety import (CbfRow, SafetyParams, cbf_rows, grad_h, h_values,
                     is_safe)

__version__ = "0.1.0"
