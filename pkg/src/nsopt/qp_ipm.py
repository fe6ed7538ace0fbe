"""Mehrotra-style predictor-corrector interior-point solver for

    min over theta:  1/2 theta' Q theta + c' theta
    s.t.  A theta = b,  theta >= 0,

where A is a single row.  The subproblem driver first attempts the
omega-only instance (trust region ignored) and falls back to the full
instance with theta = (omega, sigma, rho) when the trust region is active.

The predictor and corrector share one LDL' factorization of the reduced KKT
matrix per iteration.  Step sizes follow a two-segment merit-function search
bounded by the fraction-to-the-boundary rule: a common primal/dual step is
optimized first, then the remaining slack in whichever bound is looser.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .subproblem import SubproblemData, compute_kkt_residual

_BETA_FTB = 0.995
_MU0 = 0.5
_ZETA_MU_FLOOR = 1e-12


class IpmError(RuntimeError):
    """Iteration cap hit before the residual tolerance was met."""


@dataclass
class QpData:
    Q: np.ndarray
    c: np.ndarray
    A: np.ndarray  # single constraint row, stored as a vector
    b: float = 1.0

    @property
    def size(self) -> int:
        return self.c.size


@dataclass
class IpmDiagnostics:
    merit_history: list[float] = field(default_factory=list)
    plugback_history: list[float] = field(default_factory=list)
    min_interiority: float = np.inf
    factorizations: int = 0
    factor_solves: int = 0


@dataclass
class IpmCoreResult:
    theta: np.ndarray
    u: float
    v: np.ndarray
    residual: float
    iterations: int
    diagnostics: IpmDiagnostics


@dataclass
class IpmSolution:
    omega: np.ndarray
    gamma: np.ndarray
    sigma: np.ndarray
    rho: np.ndarray
    u: float
    kkt_residual: float
    iterations: int
    omega_only: bool
    diagnostics: IpmDiagnostics


class LdlFactor:
    """LDL' factorization of a symmetric indefinite matrix with a reusable
    solve supporting the 1x1 and 2x2 pivot blocks."""

    def __init__(self, K: np.ndarray):
        lu, d, perm = scipy.linalg.ldl(K, lower=True)
        self.K = K
        self.L = lu[perm]  # unit lower triangular
        self.d = d
        self.perm = perm

    def solve_refined(self, rhs: np.ndarray) -> np.ndarray:
        """Solve with one step of iterative refinement (same factorization)."""
        x = self.solve(rhs)
        return x + self.solve(rhs - self.K @ x)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        y = scipy.linalg.solve_triangular(self.L, rhs[self.perm],
                                          lower=True, unit_diagonal=True)
        w = self._block_diagonal_solve(y)
        t = scipy.linalg.solve_triangular(self.L.T, w,
                                          lower=False, unit_diagonal=True)
        out = np.empty_like(t)
        out[self.perm] = t
        return out

    def _block_diagonal_solve(self, y: np.ndarray) -> np.ndarray:
        d = self.d
        n = y.size
        w = np.empty_like(y)
        i = 0
        while i < n:
            if i + 1 < n and d[i, i + 1] != 0.0:
                blk = d[i:i + 2, i:i + 2]
                det = blk[0, 0] * blk[1, 1] - blk[0, 1] * blk[1, 0]
                w[i] = (blk[1, 1] * y[i] - blk[0, 1] * y[i + 1]) / det
                w[i + 1] = (-blk[1, 0] * y[i] + blk[0, 0] * y[i + 1]) / det
                i += 2
            else:
                w[i] = y[i] / d[i, i]
                i += 1
        return w


def merit(qp: QpData, theta: np.ndarray, u: float, v: np.ndarray) -> float:
    primal = float(qp.A @ theta) - qp.b
    dual = qp.A * u + v - qp.Q @ theta - qp.c
    return primal * primal + float(dual @ dual) + float(theta @ v)


def residuals(qp: QpData, theta: np.ndarray, u: float, v: np.ndarray):
    r_d = qp.Q @ theta + qp.c - qp.A * u - v
    r_p = qp.b - float(qp.A @ theta)
    r_c = -theta * v
    return r_d, r_p, r_c


def _fraction_to_boundary(x: np.ndarray, dx: np.ndarray) -> float:
    ratio = np.max(-dx / (_BETA_FTB * x), initial=1.0)
    return 1.0 / ratio


def _box_free_qp(P: np.ndarray, q: np.ndarray, lo: float, hi: float):
    """Minimize 1/2 x'Px + q'x with x1 in [lo, hi] and x2 free.

    Candidate-based: the reduced-in-x1 stationary point (when defined) plus
    the endpoints and zero, so indefinite P degrades gracefully.
    """
    p11, p12, p22 = P[0, 0], P[0, 1], P[1, 1]

    def x2_of(x1: float) -> float:
        return -(q[1] + p12 * x1) / p22 if p22 > 0.0 else 0.0

    def obj(x1: float, x2: float) -> float:
        return (0.5 * (p11 * x1 * x1 + 2.0 * p12 * x1 * x2 + p22 * x2 * x2)
                + q[0] * x1 + q[1] * x2)

    candidates = [lo, hi]
    if lo < 0.0 < hi:
        candidates.append(0.0)
    if p22 > 0.0:
        a = p11 - p12 * p12 / p22
        lin = q[0] - p12 * q[1] / p22
    else:
        a, lin = p11, q[0]
    if a > 0.0:
        candidates.append(min(max(-lin / a, lo), hi))
    best = min(((x1, x2_of(x1)) for x1 in candidates),
               key=lambda t: obj(t[0], t[1]))
    return best


def step_sizes(qp: QpData, theta, u, v, r_p, r_d, dtheta, du, dv):
    """Two-segment merit search bounded by fraction-to-the-boundary."""
    a_theta = _fraction_to_boundary(theta, dtheta)
    a_v = _fraction_to_boundary(v, dv)
    a_bar = min(a_theta, a_v)

    r = np.concatenate([[r_p], r_d])
    s = np.concatenate([[-float(qp.A @ dtheta)], qp.Q @ dtheta])
    o = np.concatenate([[0.0], -qp.A * du])
    p = np.concatenate([[0.0], -dv])
    sp = s + p
    dtv = float(dtheta @ dv)
    th_dv = float(theta @ dv)
    dth_v = float(dtheta @ v)

    def phi(at: float, au: float, av: float) -> float:
        res = r + at * s + au * o + av * p
        comp = float((theta + at * dtheta) @ (v + av * dv))
        return float(res @ res) + comp

    # segment 1: equal primal/dual step in [0, a_bar], multiplier step free
    P1 = np.array([[float(sp @ sp) + dtv, float(sp @ o)],
                   [float(sp @ o), float(o @ o)]])
    q1 = np.array([float(r @ sp) + 0.5 * (dth_v + th_dv), float(r @ o)])
    at1, au1 = _box_free_qp(P1, q1, 0.0, a_bar)
    cand1 = (at1, au1, at1)

    # segment 2: push the looser of the two bounds past a_bar
    if a_theta <= a_v:
        P2 = np.array([[float(p @ p), float(o @ p)],
                       [float(o @ p), float(o @ o)]])
        q2 = np.array([float(r @ p) + 0.5 * th_dv
                       + a_theta * (float(s @ p) + 0.5 * dtv),
                       float(r @ o) + a_theta * float(s @ o)])
        av2, au2 = _box_free_qp(P2, q2, a_bar, a_v)
        cand2 = (a_theta, au2, av2)
    else:
        P2 = np.array([[float(s @ s), float(s @ o)],
                       [float(s @ o), float(o @ o)]])
        q2 = np.array([float(r @ s) + 0.5 * dth_v
                       + a_v * (float(s @ p) + 0.5 * dtv),
                       float(r @ o) + a_v * float(o @ p)])
        at2, au2 = _box_free_qp(P2, q2, a_bar, a_theta)
        cand2 = (at2, au2, a_v)

    return min(cand1, cand2, key=lambda c: phi(*c))


def _factorize(qp: QpData, theta: np.ndarray, v: np.ndarray,
               diagnostics: IpmDiagnostics) -> LdlFactor:
    ell = theta.size
    K = np.zeros((ell + 1, ell + 1))
    K[:ell, :ell] = -(qp.Q + np.diag(v / theta))
    K[:ell, ell] = qp.A
    K[ell, :ell] = qp.A
    diagnostics.factorizations += 1
    factor = LdlFactor(K)
    probe = factor.solve(np.ones(ell + 1))
    if np.all(np.isfinite(probe)):
        return factor
    # one-shot quasi-definite regularization, then give up
    K[:ell, :ell] -= 1e-12 * np.eye(ell)
    K[ell, ell] += 1e-12
    factor = LdlFactor(K)
    probe = factor.solve(np.ones(ell + 1))
    if not np.all(np.isfinite(probe)):
        raise IpmError("singular reduced KKT system")
    return factor


def _newton_step(factor: LdlFactor, theta, v, r_d, r_p, r_c,
                 diagnostics: IpmDiagnostics):
    rhs = np.concatenate([r_d - r_c / theta, [r_p]])
    sol = factor.solve_refined(rhs)
    diagnostics.factor_solves += 1
    dtheta = sol[:-1]
    du = float(sol[-1])
    dv = (r_c - v * dtheta) / theta
    return dtheta, du, dv


def _plugback_residual(qp, theta, v, dtheta, du, dv, r_d, r_p, r_c) -> float:
    """Relative residual of the full unreduced Newton system."""
    row1 = -qp.Q @ dtheta + qp.A * du + dv - r_d
    row2 = float(qp.A @ dtheta) - r_p
    row3 = v * dtheta + theta * dv - r_c
    num = max(np.max(np.abs(row1), initial=0.0), abs(row2),
              np.max(np.abs(row3), initial=0.0))
    den = max(1.0, np.max(np.abs(r_d), initial=0.0), abs(r_p),
              np.max(np.abs(r_c), initial=0.0))
    return num / den


def solve_ipm_core(qp: QpData, theta: np.ndarray, u: float, v: np.ndarray,
                   tol: float = 1e-8, max_iterations: int = 200,
                   soft_tol: float | None = None) -> IpmCoreResult:
    theta = np.asarray(theta, dtype=float).copy()
    v = np.asarray(v, dtype=float).copy()
    if np.any(theta <= 0.0) or np.any(v <= 0.0):
        raise ValueError("initial point must be strictly interior")
    ell = qp.size
    diag = IpmDiagnostics()
    best = None  # (residual, theta, u, v, iteration)

    for it in range(max_iterations + 1):
        r_d, r_p, r_c = residuals(qp, theta, u, v)
        res = max(np.max(np.abs(r_d)), abs(r_p), np.max(np.abs(r_c)))
        diag.merit_history.append(merit(qp, theta, u, v))
        diag.min_interiority = min(diag.min_interiority,
                                   float(np.min(theta)), float(np.min(v)))
        if best is None or res < best[0]:
            best = (res, theta.copy(), u, v.copy(), it)
        if res <= tol:
            return IpmCoreResult(theta, u, v, float(res), it, diag)
        if it == max_iterations:
            break

        factor = _factorize(qp, theta, v, diag)
        dtheta_p, du_p, dv_p = _newton_step(factor, theta, v, r_d, r_p, r_c, diag)
        diag.plugback_history.append(
            _plugback_residual(qp, theta, v, dtheta_p, du_p, dv_p, r_d, r_p, r_c))
        at_p, _, av_p = step_sizes(qp, theta, u, v, r_p, r_d,
                                   dtheta_p, du_p, dv_p)
        mu = float(theta @ v) / ell
        zeta = (float((theta + at_p * dtheta_p) @ (v + av_p * dv_p))
                / (ell * mu)) ** 3
        zeta = max(zeta, _ZETA_MU_FLOOR / mu)
        r_c_corr = r_c + zeta * mu
        dtheta, du, dv = _newton_step(factor, theta, v, r_d, r_p, r_c_corr, diag)
        diag.plugback_history.append(
            _plugback_residual(qp, theta, v, dtheta, du, dv, r_d, r_p, r_c_corr))
        at, au, av = step_sizes(qp, theta, u, v, r_p, r_d, dtheta, du, dv)
        theta = theta + at * dtheta
        u = u + au * du
        v = v + av * dv

    if soft_tol is not None and best[0] <= soft_tol:
        res, theta, u, v, it = best
        return IpmCoreResult(theta, u, v, float(res), it, diag)
    raise IpmError(f"no convergence in {max_iterations} iterations "
                   f"(best residual {best[0]:.3e})")


def _initial_sigma_rho(w: np.ndarray, delta: float):
    sigma = np.full(w.size, 0.1)
    rho = np.full(w.size, 0.1)
    low = w < -delta
    high = w > delta
    sigma[low] = np.maximum(0.1, delta - w[low])
    rho[high] = np.maximum(0.1, -delta - w[high])
    return sigma, rho


def solve_ipm(data: SubproblemData, tol: float = 1e-8,
              max_iterations: int = 200) -> IpmSolution:
    """Trust-region-aware driver around the core iteration.

    The core runs at a tolerance one decade tighter than requested so that
    the reconstructed KKT residual of the original subproblem still clears
    ``tol``; the requested value acts as a soft fallback at the cap.
    """
    m, n = data.m, data.n
    core_tol = 0.1 * tol

    omega0 = np.full(m, 1.0 / m)
    v0 = np.full(m, _MU0 * m)
    qp_small = QpData(Q=data.gtwg, c=-data.b, A=np.ones(m))
    core = solve_ipm_core(qp_small, omega0, 0.0, v0, tol=core_tol,
                          max_iterations=max_iterations, soft_tol=tol)
    omega = core.theta
    if np.max(np.abs(data.wg @ omega)) <= data.delta:
        zeros = np.zeros(n)
        res = compute_kkt_residual(data, omega, zeros, zeros, core.u)
        return IpmSolution(omega, zeros.copy(), zeros.copy(), zeros.copy(),
                           core.u, res, core.iterations, True, core.diagnostics)

    wg = data.wg
    wd = data.qn.dense_W()
    K = data.gtwg
    Q = np.block([[K, wg.T, -wg.T],
                  [wg, wd, -wd],
                  [-wg, -wd, wd]])
    c = np.concatenate([-data.b, np.full(n, data.delta), np.full(n, data.delta)])
    A = np.concatenate([np.ones(m), np.zeros(2 * n)])
    qp_full = QpData(Q=Q, c=c, A=A)

    w = wg @ omega0
    sigma0, rho0 = _initial_sigma_rho(w, data.delta)
    theta0 = np.concatenate([omega0, sigma0, rho0])
    v_full0 = np.concatenate([v0, _MU0 / sigma0, _MU0 / rho0])
    core = solve_ipm_core(qp_full, theta0, 0.0, v_full0, tol=core_tol,
                          max_iterations=max_iterations, soft_tol=tol)
    omega = core.theta[:m]
    sigma = core.theta[m:m + n]
    rho = core.theta[m + n:]
    res = compute_kkt_residual(data, omega, sigma, rho, core.u)
    return IpmSolution(omega, sigma - rho, sigma, rho, core.u, res,
                       core.iterations, False, core.diagnostics)
