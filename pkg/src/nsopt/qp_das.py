"""Primal active-set solver for the simplex-constrained subproblem QP

    min over (omega, gamma):
        1/2 (G w + gamma)' W (G w + gamma) - b'w + delta ||gamma||_1
        s.t. 1'w = 1, w >= 0.

The working set is the support S of omega plus a sign state in {-1, 0, +1}
per gamma coordinate.  Each pivot solves the bordered equality-constrained
KKT system on the working set, takes a blocking-limited segment toward the
target, and either drops the blocking index or checks optimality and adds
the single most violated index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .subproblem import SubproblemData, compute_kkt_residual, dual_objective


class DasError(RuntimeError):
    """Pivot cap exceeded without reaching the requested KKT tolerance."""


@dataclass
class DasState:
    """Warm-startable working-set state; arrays are owned by the state."""
    G: np.ndarray
    WG: np.ndarray
    K: np.ndarray  # G'WG
    b: np.ndarray
    delta: float
    qn: object
    S: list[int]
    gamma_sign: np.ndarray  # (n,) in {-1, 0, +1}
    omega: np.ndarray
    gamma: np.ndarray
    _wd: np.ndarray | None = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return self.G.shape[1]

    @property
    def n(self) -> int:
        return self.G.shape[0]

    def dense_W(self) -> np.ndarray:
        if self._wd is None:
            self._wd = self.qn.dense_W()
        return self._wd


@dataclass
class DasSolution:
    omega: np.ndarray
    gamma: np.ndarray
    sigma: np.ndarray
    rho: np.ndarray
    u: float
    kkt_residual: float
    iterations: int
    objective_history: list[float]
    state: DasState


def _init_state(data: SubproblemData) -> DasState:
    K = data.gtwg
    j0 = int(np.argmin(np.diag(K)))
    omega = np.zeros(data.m)
    omega[j0] = 1.0
    return DasState(G=data.G.copy(), WG=data.wg.copy(), K=K.copy(),
                    b=data.b.copy(), delta=data.delta, qn=data.qn,
                    S=[j0], gamma_sign=np.zeros(data.n, dtype=int),
                    omega=omega, gamma=np.zeros(data.n))


def warm_start_augment(state: DasState, new_columns: np.ndarray,
                       new_b: np.ndarray) -> DasState:
    """Extend a previous state with extra bundle columns at zero weight."""
    new_columns = np.atleast_2d(np.asarray(new_columns, dtype=float))
    new_b = np.atleast_1d(np.asarray(new_b, dtype=float))
    if new_columns.shape[0] != state.n or new_columns.shape[1] != new_b.size:
        raise ValueError("new columns must be n-vectors aligned with new_b")
    w_new = state.qn.apply_W_matrix(new_columns)
    cross = state.G.T @ w_new
    corner = new_columns.T @ w_new
    state.K = np.block([[state.K, cross], [cross.T, corner]])
    state.G = np.hstack([state.G, new_columns])
    state.WG = np.hstack([state.WG, w_new])
    state.b = np.concatenate([state.b, new_b])
    state.omega = np.concatenate([state.omega, np.zeros(new_b.size)])
    return state


def _solve_eqp(st: DasState, S: list[int], F: np.ndarray, regularize: bool = True):
    """Bordered KKT solve on the working set: unknowns (omega_S, gamma_F, mult)."""
    s, f = len(S), F.size
    dim = s + f + 1
    M = np.zeros((dim, dim))
    rhs = np.zeros(dim)
    M[:s, :s] = st.K[np.ix_(S, S)]
    rhs[:s] = st.b[S]
    if f:
        B = st.WG[np.ix_(F, S)]
        M[s:s + f, :s] = B
        M[:s, s:s + f] = B.T
        M[s:s + f, s:s + f] = st.dense_W()[np.ix_(F, F)]
        rhs[s:s + f] = -st.delta * st.gamma_sign[F]
    M[:s, -1] = 1.0
    M[-1, :s] = 1.0
    rhs[-1] = 1.0
    # The Hessian block is a Gram matrix and can be singular when s + f > n.
    # A tiny proximal term makes the minimizer unique, which keeps a
    # just-freed variable's target on its feasible side (anti-cycling);
    # iterative refinement against the unregularized system then removes
    # the proximal bias from the returned solution.
    if regularize:
        reg = 1e-11 * max(1.0, float(np.trace(M[:s + f, :s + f])) / max(1, s + f))
        M_reg = M.copy()
        M_reg[np.arange(s + f), np.arange(s + f)] += reg
    else:
        M_reg = M
    try:
        sol = np.linalg.solve(M_reg, rhs)
        if not np.all(np.isfinite(sol)):
            raise np.linalg.LinAlgError
        for _ in range(3):
            sol = sol + np.linalg.solve(M_reg, rhs - M @ sol)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return sol[:s], sol[s:s + f], float(sol[-1])


def _w_times_model(st: DasState) -> np.ndarray:
    """W (G omega + gamma) at the current working point."""
    wm = st.WG @ st.omega
    F = np.flatnonzero(st.gamma_sign)
    if F.size:
        wm = wm + st.dense_W()[:, F] @ st.gamma[F]
    return wm


def solve_das(data: SubproblemData, tol: float = 1e-8,
              warm: DasState | None = None,
              max_iterations: int | None = None) -> DasSolution:
    if warm is not None:
        if warm.m != data.m or warm.n != data.n:
            raise ValueError("warm-start state does not match problem dimensions")
        st = warm
    else:
        st = _init_state(data)
    m, n = st.m, st.n
    cap = max_iterations if max_iterations is not None else 100 * (m + 2 * n)
    history: list[float] = []
    iterations = 0
    # Anti-cycling at numerical noise level: an index dropped by a
    # zero-length blocking step is barred from re-entry until the objective
    # makes measurable progress.
    banned: set[tuple[str, int]] = set()
    q_ref = np.inf

    for _ in range(cap):
        iterations += 1
        S = st.S
        F = np.flatnonzero(st.gamma_sign)
        t_omega, t_gamma, u_eqp = _solve_eqp(st, S, F)

        # blocking ratio toward the target along the segment
        alpha = 1.0
        block = None  # ("omega", j) or ("gamma", i)
        cur_w = st.omega[S]
        for idx, j in enumerate(S):
            if t_omega[idx] < -1e-14:
                a = cur_w[idx] / (cur_w[idx] - t_omega[idx])
                if a < alpha:
                    alpha, block = a, ("omega", j)
        cur_g = st.gamma[F]
        for idx, i in enumerate(F):
            if t_gamma[idx] * st.gamma_sign[i] < -1e-14:
                a = cur_g[idx] / (cur_g[idx] - t_gamma[idx])
                if a < alpha:
                    alpha, block = a, ("gamma", int(i))

        if block is not None:
            st.omega[S] = cur_w + alpha * (t_omega - cur_w)
            st.gamma[F] = cur_g + alpha * (t_gamma - cur_g)
            kind, idx = block
            if kind == "omega":
                st.S = [j for j in S if j != idx]
                st.omega[idx] = 0.0
            else:
                st.gamma_sign[idx] = 0
                st.gamma[idx] = 0.0
            if alpha <= 1e-12:
                banned.add(block)
            q = -dual_objective_from_state(st)
            if q < q_ref - 1e-13 * max(1.0, abs(q_ref)):
                banned.clear()
                q_ref = q
            history.append(q)
            continue

        st.omega[S] = t_omega
        if F.size:
            st.gamma[F] = t_gamma
        q = -dual_objective_from_state(st)
        if q < q_ref - 1e-13 * max(1.0, abs(q_ref)):
            banned.clear()
            q_ref = q
        history.append(q)

        # optimality check at the working-set solution
        wm = _w_times_model(st)
        grad = st.G.T @ wm - st.b
        u = -u_eqp
        v_omega = grad - u
        v_omega_masked = v_omega.copy()
        v_omega_masked[S] = np.inf
        for kind, idx in banned:
            if kind == "omega":
                v_omega_masked[idx] = np.inf
        worst_omega = float(np.min(v_omega_masked)) if m > len(S) else np.inf
        free_mask = st.gamma_sign == 0
        box = st.delta - np.abs(wm)
        box_masked = np.where(free_mask, box, np.inf)
        for kind, idx in banned:
            if kind == "gamma":
                box_masked[idx] = np.inf
        worst_gamma = float(np.min(box_masked)) if free_mask.any() else np.inf
        worst = min(worst_omega, worst_gamma)
        if worst >= -0.5 * tol:
            sigma = np.maximum(st.gamma, 0.0)
            rho = np.maximum(-st.gamma, 0.0)
            res = compute_kkt_residual(data, st.omega, sigma, rho, u)
            return DasSolution(st.omega.copy(), st.gamma.copy(), sigma, rho, u,
                               res, iterations, history, st)
        if worst_omega <= worst_gamma:
            j_new = int(np.argmin(v_omega_masked))
            st.S = S + [j_new]
        else:
            i_new = int(np.argmin(box_masked))
            st.gamma_sign[i_new] = -int(np.sign(wm[i_new]))

    raise DasError(f"active-set pivot cap {cap} exceeded")


def dual_objective_from_state(st: DasState) -> float:
    """Dual objective at the state's working point (uses cached products)."""
    r_w = _w_times_model(st)
    r = st.G @ st.omega + st.gamma
    return float(-0.5 * r @ r_w + st.b @ st.omega
                 - st.delta * np.sum(np.abs(st.gamma)))


def solution_objective(data: SubproblemData, sol: DasSolution) -> float:
    return dual_objective(data, sol.omega, sol.gamma)
