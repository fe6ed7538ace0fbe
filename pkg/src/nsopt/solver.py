"""Outer minimization loop: sampling, direction, line search, bundle and
metric maintenance, radius schedule, and termination.

The objective is scaled once at the start so the initial gradient max-norm is
at most 1e2; all internal quantities are in the scaled objective, and the
report converts back.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .control import Decision, StallCounter, check_termination, init_radii, update_radii
from .direction import compute_direction
from .line_search import LineSearchError, backtracking_armijo, weak_wolfe
from .oracle import CountingOracle, ObjectiveOracle, scale_objective
from .options import SolverOptions
from .point_set import BundleElement, PointSet, prune_by_age, prune_by_distance, sample_ball
from .quasi_newton import QuasiNewtonState, damp

_UNBOUNDED_BELOW = -1e18
_DEGENERATE_MODEL = 1e-20


@dataclass
class Iterate:
    x: np.ndarray
    f: float  # scaled objective value
    g: np.ndarray  # scaled generalized gradient


@dataclass
class SolverReport:
    x: np.ndarray
    final_f_unscaled: float
    termination_reason: str  # stationary | iteration_limit | objective_unbounded | line_search_failure
    iterations: int
    function_evaluations: int
    gradient_evaluations: int
    cpu_seconds: float
    scale: float
    eps_final: float
    delta_final: float
    f_history: list[float] = field(default_factory=list)  # unscaled, accepted iterates


def run_solver(oracle: ObjectiveOracle, x1: np.ndarray,
               options: SolverOptions | None = None) -> SolverReport:
    opts = options or SolverOptions()
    start = time.process_time()
    rng = np.random.default_rng(opts.seed)
    n = oracle.dimension
    x = np.asarray(x1, dtype=float).copy()
    if x.size != n:
        raise ValueError("starting point dimension mismatch")

    ev = CountingOracle(oracle, scale=1.0)
    f = ev.f(x)
    if not np.isfinite(f):
        raise ValueError("objective must be finite at the starting point")
    g = ev.g(x)
    scale = scale_objective(g)
    ev.scale = scale
    f *= scale
    g = g * scale

    qn = QuasiNewtonState(n, mode=opts.qn_mode, storage=opts.qn_storage,
                          history_limit=opts.history_limit)
    radii = init_radii(g)
    stall = StallCounter(threshold=opts.n_f, tolerance=opts.delta_f)
    current = BundleElement(x=x, f=f, g=g, birth=0)
    bundle = PointSet(current)
    f_history = [f / scale]
    p = opts.samples_per_iteration(n)
    bundle_cap = opts.bundle_limit(n)
    termination = "iteration_limit"
    iterations = 0
    null_steps = 0  # consecutive line-search failures answered by enrichment

    for k in range(1, opts.iteration_limit + 1):
        iterations = k
        if p > 0:
            for x_s in sample_ball(current.x, radii.eps, p, rng):
                f_s = ev.f(x_s)
                if not np.isfinite(f_s):
                    continue
                bundle.add(BundleElement(x=x_s, f=f_s, g=ev.g(x_s), birth=k))
            prune_by_age(bundle, bundle_cap)

        result = compute_direction(bundle, qn, radii.delta, opts)

        if result.model_norm_sq <= _DEGENERATE_MODEL:
            # stationary for the current model: no usable step, shrink radii
            decision = check_termination(radii, (0.0, 0.0, 0.0), stall, opts.eps_min)
            if decision is Decision.TERMINATE or radii.eps <= opts.eps_min * (1 + 1e-9):
                termination = "stationary"
                break
            radii = update_radii(radii, (0.0, 0.0, 0.0), stall_triggered=True)
            stall.count = 0
            prune_by_distance(bundle, current.x, radii.eps, opts.envelope_factor)
            continue

        search = weak_wolfe if opts.line_search == "weak_wolfe" else backtracking_armijo
        try:
            ls = search(ev, current.x, current.f, result.d, result.model_norm_sq, opts)
        except LineSearchError:
            # Null step: the model direction gave no decrease, so enrich the
            # bundle with a nearby trial gradient and recompute the direction
            # without moving.  The single-gradient strategy cannot benefit
            # (its model ignores the bundle), so it terminates immediately.
            if opts.strategy == "gradient" or null_steps >= bundle_cap:
                termination = "line_search_failure"
                break
            null_steps += 1
            t = min(opts.ls_initial,
                    radii.eps / max(float(np.linalg.norm(result.d)), 1e-12))
            added = False
            for _ in range(20):
                x_t = current.x + t * result.d
                f_t = ev.f(x_t)
                if np.isfinite(f_t):
                    bundle.add(BundleElement(x=x_t, f=f_t, g=ev.g(x_t), birth=k))
                    prune_by_age(bundle, bundle_cap)
                    added = True
                    break
                t *= 0.5
            if not added:
                termination = "line_search_failure"
                break
            continue
        null_steps = 0

        stall.observe(current.f, ls.f_next)
        decision = check_termination(radii, result.inf_norms, stall, opts.eps_min)
        new_radii = update_radii(radii, result.inf_norms,
                                 stall_triggered=stall.count >= opts.n_f)
        if new_radii.eps < radii.eps:
            stall.count = 0
        radii = new_radii

        nxt = BundleElement(x=ls.x_next, f=ls.f_next, g=ls.g_next, birth=k)
        bundle.add(nxt)
        bundle.set_current(nxt)
        prune_by_distance(bundle, ls.x_next, radii.eps, opts.envelope_factor)
        prune_by_age(bundle, bundle_cap)

        s = ls.x_next - current.x
        if float(s @ s) > 0.0:
            _, v = damp(s, ls.g_next - current.g, opts.eta, opts.psi)
            qn.update(s, v)
        current = nxt
        f_history.append(current.f / scale)

        if current.f <= _UNBOUNDED_BELOW:
            termination = "objective_unbounded"
            break
        if decision is Decision.TERMINATE:
            termination = "stationary"
            break

    return SolverReport(
        x=current.x.copy(),
        final_f_unscaled=current.f / scale,
        termination_reason=termination,
        iterations=iterations,
        function_evaluations=ev.function_evaluations,
        gradient_evaluations=ev.gradient_evaluations,
        cpu_seconds=time.process_time() - start,
        scale=scale,
        eps_final=radii.eps,
        delta_final=radii.delta,
        f_history=f_history,
    )
