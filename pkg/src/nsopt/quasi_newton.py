"""Damped BFGS/DFP maintenance of the metric H and its inverse W.

Full storage keeps dense symmetric positive definite H and W = H^{-1}.
Limited storage keeps a FIFO window of damped pairs (s, v) and applies
H and W matrix-free with an identity base matrix.
"""

from __future__ import annotations

from collections import deque

import numpy as np


class DegenerateStepError(ValueError):
    """Raised when a zero step is offered to the damping or update routines."""


def damp(s: np.ndarray, y: np.ndarray, eta: float, psi: float) -> tuple[float, np.ndarray]:
    """Replace y by v = beta*s + (1-beta)*y with the smallest beta in [0, 1]
    such that s'v / ||s||^2 >= eta and ||v||^2 / s'v <= psi.

    Falls back to (1, s) when no beta in [0, 1] works, which can only happen
    for eta > 1.
    """
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    ss = float(s @ s)
    if ss == 0.0:
        raise DegenerateStepError("damping requires a nonzero step")

    sy = float(s @ y)

    # First bound: s'v = beta*ss + (1-beta)*sy >= eta*ss, linear in beta.
    if sy >= eta * ss:
        lo1 = 0.0
    elif ss > sy:
        lo1 = (eta * ss - sy) / (ss - sy)
    else:
        lo1 = np.inf

    # Second bound: h(beta) = ||v||^2 - psi * s'v <= 0, convex quadratic in beta.
    d = s - y
    a = float(d @ d)
    bq = 2.0 * float(y @ d) - psi * (ss - sy)
    cq = float(y @ y) - psi * sy
    if cq <= 0.0:
        lo2 = 0.0
    elif a > 0.0:
        disc = bq * bq - 4.0 * a * cq
        lo2 = np.inf if disc < 0.0 else (-bq - np.sqrt(disc)) / (2.0 * a)
    elif bq < 0.0:
        lo2 = -cq / bq
    else:
        lo2 = np.inf

    beta = max(lo1, lo2, 0.0)

    def _ok(bval: float) -> bool:
        vv = bval * s + (1.0 - bval) * y
        sv = float(s @ vv)
        return sv >= eta * ss and float(vv @ vv) <= psi * sv

    # Nudge upward past rounding at the constraint boundary.
    if beta <= 1.0:
        for bump in (0.0, 1e-15, 1e-12, 1e-9):
            cand = min(1.0, beta + bump * max(1.0, abs(beta)))
            if _ok(cand):
                return cand, cand * s + (1.0 - cand) * y
    return 1.0, s.copy()


class QuasiNewtonState:
    """Metric state with BFGS or DFP updates in full or limited storage."""

    def __init__(self, n: int, mode: str = "BFGS", storage: str = "full",
                 history_limit: int = 20):
        if mode not in ("BFGS", "DFP"):
            raise ValueError(f"unknown mode {mode!r}")
        if storage not in ("full", "limited"):
            raise ValueError(f"unknown storage {storage!r}")
        self.n = n
        self.mode = mode
        self.storage = storage
        self.history_limit = history_limit
        if storage == "full":
            self.H = np.eye(n)
            self.W = np.eye(n)
            self.pairs = None
        else:
            self.H = None
            self.W = None
            self.pairs: deque[tuple[np.ndarray, np.ndarray]] = deque(maxlen=history_limit)
        self._cache = None  # memoized direct-recursion coefficients

    # -- updates ----------------------------------------------------------

    def update(self, s: np.ndarray, v: np.ndarray) -> None:
        s = np.asarray(s, dtype=float)
        v = np.asarray(v, dtype=float)
        rho = float(s @ v)
        if float(s @ s) == 0.0:
            raise DegenerateStepError("update requires a nonzero step")
        if rho <= 0.0:
            raise ValueError("update rejected: s'v must be positive (damp first)")
        if self.storage == "limited":
            self.pairs.append((s.copy(), v.copy()))
            self._cache = None
            return
        if self.mode == "BFGS":
            h = self.H @ s
            shs = float(s @ h)
            self.H = self.H - np.outer(h, h) / shs + np.outer(v, v) / rho
            w = self.W @ v
            vwv = float(v @ w)
            self.W = (self.W - (np.outer(s, w) + np.outer(w, s)) / rho
                      + (vwv / rho**2 + 1.0 / rho) * np.outer(s, s))
        else:  # DFP: dual formulas, roles of the two update structures swapped
            h = self.H @ s
            shs = float(s @ h)
            self.H = (self.H - (np.outer(v, h) + np.outer(h, v)) / rho
                      + (shs / rho**2 + 1.0 / rho) * np.outer(v, v))
            w = self.W @ v
            vwv = float(v @ w)
            self.W = self.W - np.outer(w, w) / vwv + np.outer(s, s) / rho
        self.H = 0.5 * (self.H + self.H.T)
        self.W = 0.5 * (self.W + self.W.T)

    # -- matrix-free applications -----------------------------------------

    def apply_W(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.storage == "full":
            return self.W @ r
        if self.mode == "BFGS":
            return self._two_loop(r, swap=False)
        return self._direct_recursion(r, inverse=True)

    def apply_H(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.storage == "full":
            return self.H @ r
        if self.mode == "BFGS":
            return self._direct_recursion(r, inverse=False)
        return self._two_loop(r, swap=True)

    def dense_W(self) -> np.ndarray:
        if self.storage == "full":
            return self.W
        return self.apply_W_matrix(np.eye(self.n))

    def apply_W_matrix(self, A: np.ndarray) -> np.ndarray:
        """W applied to each column of A."""
        if self.storage == "full":
            return self.W @ A
        A = np.asarray(A, dtype=float)
        if self.mode == "BFGS":
            return self._two_loop_matrix(A, swap=False)
        coeffs = self._recursion_coeffs(inverse=True)
        out = A.copy()
        for s, v, Ai, c, rho in coeffs:
            out += -np.outer(Ai, Ai @ A) / c + np.outer(v, v @ A) / rho
        return out

    # Column-wise two-loop recursion; the per-column scalars become row
    # vectors so each pass is a rank-1 update on the whole block.
    def _two_loop_matrix(self, R: np.ndarray, swap: bool) -> np.ndarray:
        q = R.copy()
        alphas = []
        pairs = list(self.pairs)
        for s, v in reversed(pairs):
            if swap:
                s, v = v, s
            rho = float(s @ v)
            a = (s @ q) / rho
            alphas.append(a)
            q -= np.outer(v, a)
        out = q
        for (s, v), a in zip(pairs, reversed(alphas)):
            if swap:
                s, v = v, s
            rho = float(s @ v)
            b = (v @ out) / rho
            out += np.outer(s, a - b)
        return out

    # Two-loop recursion for the inverse-form update (BFGS W-product; with
    # s and v swapped it yields the DFP H-product by duality).
    def _two_loop(self, r: np.ndarray, swap: bool) -> np.ndarray:
        q = r.copy()
        alphas = []
        pairs = list(self.pairs)
        for s, v in reversed(pairs):
            if swap:
                s, v = v, s
            rho = float(s @ v)
            a = float(s @ q) / rho
            alphas.append(a)
            q -= a * v
        out = q  # identity base matrix
        for (s, v), a in zip(pairs, reversed(alphas)):
            if swap:
                s, v = v, s
            rho = float(s @ v)
            b = float(v @ out) / rho
            out += (a - b) * s
        return out

    # Direct-form product via the recursion M_{i+1} x = M_i x - A_i (A_i'x)/c_i
    # + v_i (v_i'x)/rho_i with A_i = M_i s_i, c_i = s_i'A_i (BFGS H-product;
    # with s and v swapped it yields the DFP W-product).
    def _direct_recursion(self, r: np.ndarray, inverse: bool) -> np.ndarray:
        coeffs = self._recursion_coeffs(inverse)
        out = r.copy()
        for s, v, A, c, rho in coeffs:
            out += -A * (float(A @ r) / c) + v * (float(v @ r) / rho)
        return out

    def _recursion_coeffs(self, inverse: bool):
        key = "inv" if inverse else "dir"
        if self._cache is not None and key in self._cache:
            return self._cache[key]
        coeffs = []
        for s, v in self.pairs:
            if inverse:
                s, v = v, s
            rho = float(s @ v)
            A = s.copy()
            for sp, vp, Ap, cp, rhop in coeffs:
                A += -Ap * (float(Ap @ s) / cp) + vp * (float(vp @ s) / rhop)
            c = float(s @ A)
            coeffs.append((s, v, A, c, rho))
        if self._cache is None:
            self._cache = {}
        self._cache[key] = coeffs
        return coeffs
