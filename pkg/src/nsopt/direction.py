"""Search-direction computation from the bundle and quasi-Newton metric.

Builds the dual subproblem data for one of three strategies and recovers the
primal direction d = -W (G omega + gamma) from the chosen QP solver:

- "gradient": current gradient only (m = 1);
- "gradient_combination": all bundle gradients with a common intercept f_k;
- "cutting_plane": linearization values b_j = f_j + g_j'(x_k - x_j),
  downshifted to stay below f_k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .point_set import PointSet
from .qp_das import DasState, solve_das
from .qp_ipm import solve_ipm
from .quasi_newton import QuasiNewtonState
from .subproblem import SubproblemData, compute_kkt_residual, dual_objective

__all__ = ["SubproblemData", "DirectionResult", "build_subproblem",
           "compute_direction", "compute_kkt_residual", "dual_objective"]

_DOWNSHIFT = 1e-8


@dataclass
class DirectionResult:
    d: np.ndarray
    omega: np.ndarray
    gamma: np.ndarray
    u: float
    kkt_residual: float
    solver: str  # "gradient", "das", or "ipm"
    model_norm_sq: float  # d'Hd = (G w + gamma)' W (G w + gamma)
    inf_norms: tuple[float, float, float]  # ||d||, ||Gw||, ||Gw + gamma||
    das_state: DasState | None = None


def build_subproblem(point_set: PointSet, qn: QuasiNewtonState, delta: float,
                     strategy: str) -> SubproblemData:
    cur = point_set.current
    if strategy == "gradient":
        return SubproblemData(G=cur.g.reshape(-1, 1),
                              b=np.array([cur.f]), delta=delta, qn=qn)
    elements = point_set.elements
    G = np.column_stack([e.g for e in elements])
    if strategy == "gradient_combination":
        b = np.full(len(elements), cur.f)
    elif strategy == "cutting_plane":
        b = np.empty(len(elements))
        for j, e in enumerate(elements):
            dx = cur.x - e.x
            raw = e.f + float(e.g @ dx)
            b[j] = min(raw, cur.f - _DOWNSHIFT * float(dx @ dx))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return SubproblemData(G=G, b=b, delta=delta, qn=qn)


def _finalize(data: SubproblemData, omega, gamma, u, res, solver,
              das_state=None) -> DirectionResult:
    g_omega = data.G @ omega
    model = g_omega + gamma
    d = -data.qn.apply_W(model)
    model_norm_sq = float(-(d @ model))
    inf_norms = (float(np.max(np.abs(d), initial=0.0)),
                 float(np.max(np.abs(g_omega), initial=0.0)),
                 float(np.max(np.abs(model), initial=0.0)))
    return DirectionResult(d, np.asarray(omega, dtype=float), gamma, u, res,
                           solver, model_norm_sq, inf_norms, das_state)


def compute_direction(point_set: PointSet, qn: QuasiNewtonState, delta: float,
                      options, warm: DasState | None = None) -> DirectionResult:
    strategy = options.strategy
    n = qn.n

    if strategy == "gradient" and options.try_gradient_step:
        g = point_set.current.g
        wg = qn.apply_W(g)
        if np.max(np.abs(wg), initial=0.0) <= delta:
            f = point_set.current.f
            data = SubproblemData(G=g.reshape(-1, 1), b=np.array([f]),
                                  delta=delta, qn=qn)
            u = float(g @ wg) - f  # makes the single-point KKT system exact
            return _finalize(data, np.ones(1), np.zeros(n), u, 0.0, "gradient")

    data = build_subproblem(point_set, qn, delta, strategy)
    if data.m <= options.qp_size_threshold:
        sol = solve_das(data, tol=options.qp_tolerance, warm=warm)
        return _finalize(data, sol.omega, sol.gamma, sol.u, sol.kkt_residual,
                         "das", das_state=sol.state)
    sol = solve_ipm(data, tol=options.qp_tolerance)
    return _finalize(data, sol.omega, sol.gamma, sol.u, sol.kkt_residual, "ipm")
