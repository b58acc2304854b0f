"""Active Set Invariance Filter: minimally modify a desired thrust command.

Solves  min 0.5 ||u - u_des||^2  subject to the barrier rows c_i.u + b_i >= 0
and the per-axis thrust box |u_j| <= u_max.  With 3 variables and at most a
dozen inequalities the exact global minimizer is found by enumerating KKT
active sets in lexicographic order (sizes 0..3), which is deterministic and
gives lowest-index tie-breaking for free.  An infeasible intersection falls
back to a least-violation penalty solve over the box.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .dynamics import DynamicsParams
from .safety import CbfRow, SafetyParams, cbf_rows

__all__ = [
    "FilterResult",
    "solve_qp",
    "infeasible_fallback",
    "filter_control",
]

_FEAS_TOL = 1e-9  # primal feasibility slack used during the search
_DUAL_TOL = 1e-9  # multiplier non-negativity slack
_INTERVENTION_TOL = 1e-9
_PENALTY_WEIGHT = 1e-6  # tie-break weight pulling the fallback toward u_des


@dataclass
class FilterResult:
    """Outcome of one filter evaluation."""

    u_act: np.ndarray  # (3,) [N]
    intervened: bool
    deviation: float  # ||u_des - u_act||_2 after box pre-clamp [N]
    active_set: tuple  # constraint indices: rows 0..N-1, then box (see solve_qp)
    feasible: bool
    slack_used: np.ndarray  # per-row violation max(0, -(c.u+b)) at u_act


def _row_arrays(rows) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(rows, tuple) and len(rows) == 2:
        C = np.asarray(rows[0], dtype=float).reshape(-1, 3)
        b = np.asarray(rows[1], dtype=float).reshape(-1)
    else:
        C = np.array([r.c for r in rows], dtype=float).reshape(-1, 3)
        b = np.array([r.b for r in rows], dtype=float)
    if not (np.all(np.isfinite(C)) and np.all(np.isfinite(b))):
        raise ValueError("constraint rows must be finite")
    return C, b


@lru_cache(maxsize=32)
def _combo_indices(m: int, size: int) -> np.ndarray:
    return np.array(list(combinations(range(m), size)), dtype=int)


def solve_qp(u_des, rows, u_max: float):
    """Exact minimizer of ||u - u_des|| over the rows and the thrust box.

    ``rows`` is a list of :class:`CbfRow` or a tuple (C, b) with C (N, 3)
    and b (N,).  Returns (u, active_set, feasible); ``u`` is None when the
    intersection is empty.  Constraint indices in ``active_set`` are the row
    index for barrier rows, then N..N+2 for the upper box faces (+x,+y,+z)
    and N+3..N+5 for the lower faces.
    """
    u_des = np.asarray(u_des, dtype=float).reshape(3)
    if not np.all(np.isfinite(u_des)):
        raise ValueError("u_des must be finite")
    C, b = _row_arrays(rows)
    n_rows = len(b)
    # constraints in the uniform form a_j . u >= d_j
    A = np.vstack([C, -np.eye(3), np.eye(3)])
    d = np.concatenate([-b, np.full(3, -u_max), np.full(3, -u_max)])
    m = len(d)

    r = d - A @ u_des
    if np.all(r <= _FEAS_TOL):
        return u_des.copy(), (), True

    G = A @ A.T  # Gram matrix of constraint normals
    diag = np.diag(G)

    def _feasible_mask(U: np.ndarray) -> np.ndarray:
        return np.all(U @ A.T >= (d - _FEAS_TOL)[None, :], axis=1)

    # size-1 active sets: u = u_des + lam * a_j
    ok = diag > 1e-14
    lam1 = np.where(ok, r / np.where(ok, diag, 1.0), -1.0)
    U1 = u_des[None, :] + lam1[:, None] * A
    cand = ok & (lam1 >= -_DUAL_TOL) & _feasible_mask(U1)
    if np.any(cand):
        j = int(np.argmax(cand))
        return U1[j], (j,), True

    # size-2 active sets via the 2x2 Gram system
    pairs = _combo_indices(m, 2)
    i_, j_ = pairs[:, 0], pairs[:, 1]
    gii, gjj, gij = diag[i_], diag[j_], G[i_, j_]
    det = gii * gjj - gij * gij
    ok = np.abs(det) > 1e-12 * np.maximum(gii * gjj, 1e-30)
    safe_det = np.where(ok, det, 1.0)
    li = (r[i_] * gjj - r[j_] * gij) / safe_det
    lj = (r[j_] * gii - r[i_] * gij) / safe_det
    U2 = u_des[None, :] + li[:, None] * A[i_] + lj[:, None] * A[j_]
    cand = ok & (li >= -_DUAL_TOL) & (lj >= -_DUAL_TOL) & _feasible_mask(U2)
    if np.any(cand):
        kk = int(np.argmax(cand))
        return U2[kk], tuple(int(q) for q in pairs[kk]), True

    # size-3 active sets: batched 3x3 solves
    triples = _combo_indices(m, 3)
    Gsub = G[triples[:, :, None], triples[:, None, :]]
    rsub = r[triples]
    det3 = np.linalg.det(Gsub)
    ok = np.abs(det3) > 1e-12 * np.maximum(
        diag[triples].prod(axis=1), 1e-30)
    lam3 = np.zeros_like(rsub)
    if np.any(ok):
        lam3[ok] = np.linalg.solve(Gsub[ok], rsub[ok][:, :, None])[:, :, 0]
    U3 = u_des[None, :] + np.einsum("ts,tsk->tk", lam3, A[triples])
    cand = ok & np.all(lam3 >= -_DUAL_TOL, axis=1) & _feasible_mask(U3)
    if np.any(cand):
        kk = int(np.argmax(cand))
        return U3[kk], tuple(int(q) for q in triples[kk]), True

    return None, (), False


def infeasible_fallback(u_des, rows, u_max: float) -> np.ndarray:
    """Least-violation control over the thrust box.

    Minimizes sum_i max(0, -(c_i.u + b_i))^2 + 1e-6 ||u - u_des||^2 subject
    to |u_j| <= u_max.  Coincides with :func:`solve_qp` to about 1e-6 when
    the rows are actually feasible.
    """
    u_des = np.asarray(u_des, dtype=float).reshape(3)
    C, b = _row_arrays(rows)

    def objective(u):
        viol = np.maximum(0.0, -(C @ u + b))
        du = u - u_des
        f = np.dot(viol, viol) + _PENALTY_WEIGHT * np.dot(du, du)
        g = -2.0 * (C.T @ viol) + 2.0 * _PENALTY_WEIGHT * du
        return f, g

    x0 = np.clip(u_des, -u_max, u_max)
    res = minimize(objective, x0, jac=True, method="L-BFGS-B",
                   bounds=[(-u_max, u_max)] * 3,
                   options={"ftol": 1e-16, "gtol": 1e-12, "maxiter": 500})
    return np.asarray(res.x, dtype=float)


def filter_control(state, u_des, params: SafetyParams, dyn: DynamicsParams,
                   alphas=None) -> FilterResult:
    """Filter ``u_des`` through the barrier rows evaluated at ``state``.

    ``u_des`` is clamped to the thrust box first so the reported deviation
    measures distance from an admissible request.
    """
    u_des = np.asarray(u_des, dtype=float).reshape(3)
    if not np.all(np.isfinite(u_des)):
        raise ValueError("u_des must be finite")
    u_des = np.clip(u_des, -dyn.u_max, dyn.u_max)
    rows = cbf_rows(state, params, dyn, alphas)
    C, b = _row_arrays(rows)
    u, active, feasible = solve_qp(u_des, (C, b), dyn.u_max)
    if not feasible:
        u = infeasible_fallback(u_des, (C, b), dyn.u_max)
    deviation = float(np.linalg.norm(u - u_des))
    slack = np.maximum(0.0, -(C @ u + b))
    return FilterResult(
        u_act=u,
        intervened=deviation > _INTERVENTION_TOL,
        deviation=deviation,
        active_set=active,
        feasible=feasible,
        slack_used=slack,
    )
