"""Random subproblem instances with a known primal step and KKT certificate.

Construction (W = I, delta = 1): pick the target step d*, set the
unconstrained step d_unc = 2 d*, draw n - 1 Gaussian gradient columns and
uniform weights, pad one column so that G omega* = -d_unc exactly with the
weights on the simplex, pad the remaining m - n columns at zero weight, and
back out b from stationarity with multiplier u = 5 and complementary bound
duals.  The trust region is active coordinate-wise exactly where d* hits
+/- delta, giving sigma* = d*, rho* = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quasi_newton import QuasiNewtonState
from .subproblem import SubproblemData

D_CASES = ("zero", "half", "full")


@dataclass
class GeneratedQp:
    n: int
    m: int
    dcase: str
    seed: int
    G: np.ndarray
    b: np.ndarray
    delta: float
    d_star: np.ndarray
    d_unc: np.ndarray
    omega_star: np.ndarray
    sigma_star: np.ndarray
    rho_star: np.ndarray
    u: float
    v_omega: np.ndarray

    def subproblem(self) -> SubproblemData:
        """The instance packaged for the QP solvers (identity metric)."""
        return SubproblemData(G=self.G, b=self.b, delta=self.delta,
                              qn=QuasiNewtonState(self.n))


def generate_qp(n: int, m: int, dcase: str, seed: int) -> GeneratedQp:
    if dcase not in D_CASES:
        raise ValueError(f"unknown d* case {dcase!r}")
    if m < n + 1:
        raise ValueError("the padding scheme requires m >= n + 1")
    rng = np.random.default_rng(seed)
    delta = 1.0

    d_star = np.zeros(n)
    if dcase == "half":
        d_star[: n // 2] = delta
    elif dcase == "full":
        d_star[:] = delta
    d_unc = 2.0 * d_star

    g_hat = rng.standard_normal((n, n - 1))
    w_hat = rng.uniform(size=n - 1)
    pad = -d_unc - g_hat @ w_hat
    G = np.column_stack([g_hat, pad])
    omega = np.append(w_hat, 1.0)
    zeta = float(np.sum(np.abs(omega)))
    omega /= zeta
    G *= zeta  # G omega is unchanged and equals -d_unc

    G = np.column_stack([G, rng.standard_normal((n, m - n))])
    omega = np.append(omega, np.zeros(m - n))

    q = d_star  # q = -(d* + W G omega*) with W G omega* = -d_unc = -2 d*
    rho_star = np.maximum(-q, 0.0)
    sigma_star = np.maximum(q, 0.0)
    u = 5.0
    v_omega = np.zeros(m)
    v_omega[n:] = rng.uniform(size=m - n)
    b = G.T @ (G @ omega + sigma_star - rho_star) + u - v_omega

    return GeneratedQp(n=n, m=m, dcase=dcase, seed=seed, G=G, b=b,
                       delta=delta, d_star=d_star, d_unc=d_unc,
                       omega_star=omega, sigma_star=sigma_star,
                       rho_star=rho_star, u=u, v_omega=v_omega)


def certificate_residual(qp: GeneratedQp) -> float:
    """Max violation of the four KKT blocks at the stored certificate."""
    z = qp.G @ qp.omega_star + qp.sigma_star - qp.rho_star  # W = I
    v_sigma = z + qp.delta
    v_rho = -z + qp.delta
    # stationarity under the generator's multiplier sign convention
    # (the solvers' simplex multiplier comes out as -u)
    stat = qp.G.T @ z - qp.b + qp.u - qp.v_omega
    theta = np.concatenate([qp.omega_star, qp.sigma_star, qp.rho_star])
    v = np.concatenate([qp.v_omega, v_sigma, v_rho])
    return max(
        float(np.max(np.abs(stat))),
        abs(float(np.sum(qp.omega_star)) - 1.0),
        float(max(0.0, -np.min(theta))),
        float(max(0.0, -np.min(v))),
        float(np.max(np.abs(theta * v))),
    )
