"""Shared data for the simplex-constrained QP subproblem

    max over (omega, gamma):
        -1/2 (G w + gamma)' W (G w + gamma) + b'w - delta ||gamma||_1
        s.t. 1'w = 1, w >= 0,

and the KKT residual of its nonnegative reformulation with theta = (w, sigma,
rho), gamma = sigma - rho.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quasi_newton import QuasiNewtonState


@dataclass
class SubproblemData:
    G: np.ndarray  # n x m, columns are bundle gradients
    b: np.ndarray
    delta: float
    qn: QuasiNewtonState
    _wg: np.ndarray | None = field(default=None, repr=False)
    _gtwg: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.G = np.atleast_2d(np.asarray(self.G, dtype=float))
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.G.shape[1] != self.b.size or self.G.shape[1] < 1:
            raise ValueError("G columns and b entries must align, with m >= 1")

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @property
    def m(self) -> int:
        return self.G.shape[1]

    @property
    def wg(self) -> np.ndarray:
        if self._wg is None:
            self._wg = self.qn.apply_W_matrix(self.G)
        return self._wg

    @property
    def gtwg(self) -> np.ndarray:
        if self._gtwg is None:
            self._gtwg = self.G.T @ self.wg
        return self._gtwg


def dual_objective(data: SubproblemData, omega: np.ndarray, gamma: np.ndarray) -> float:
    r = data.G @ omega + gamma
    return float(-0.5 * r @ data.qn.apply_W(r) + data.b @ omega
                 - data.delta * np.sum(np.abs(gamma)))


def compute_kkt_residual(data: SubproblemData, omega: np.ndarray, sigma: np.ndarray,
                         rho: np.ndarray, u: float) -> float:
    """Max-norm KKT violation of the nonnegative reformulation.

    The bound multiplier v is reconstructed from (theta, u) so the dual
    stationarity block is exact; what remains is primal feasibility, sign
    feasibility, and complementarity.
    """
    omega = np.asarray(omega, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    rho = np.asarray(rho, dtype=float)
    gamma = sigma - rho
    wm = data.wg @ omega
    if np.any(gamma):
        wm = wm + data.qn.apply_W(gamma)
    v_omega = data.G.T @ wm - data.b - u
    v_sigma = wm + data.delta
    v_rho = -wm + data.delta
    theta = np.concatenate([omega, sigma, rho])
    v = np.concatenate([v_omega, v_sigma, v_rho])
    return max(
        abs(float(np.sum(omega)) - 1.0),
        float(max(0.0, -np.min(theta, initial=0.0))),
        float(max(0.0, -np.min(v, initial=0.0))),
        float(np.max(np.abs(theta * v), initial=0.0)),
    )
