"""Image denoising objectives: anisotropic data-plus-regularizer model

    f(X) = sum (X - Xbar)^2
         + lambda * sum_{i<n_r, j<n_c} [phi(X[i+1,j] - X[i,j]) + phi(X[i,j+1] - X[i,j])]

with four scalar regularizers phi_beta (the first two convex, the last two
nonconvex).  Pixel values live in [1, 256]; optimization runs over flat real
vectors and rounds back to integers only for reporting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracle import ObjectiveOracle
from .problems import ProblemInstance

REGULARIZERS = ("abs", "log", "fraction", "hard")

# (lambda, beta) defaults tuned per regularizer for benchmark images
DEFAULT_PARAMETERS = {
    "abs": (2.0 ** 6, 2.0 ** 0),
    "log": (2.0 ** 21, 2.0 ** -7),
    "fraction": (2.0 ** 25, 2.0 ** -19),
    "hard": (2.0 ** 6, 2.0 ** 18),
}


@dataclass
class GrayImage:
    pixels: np.ndarray  # integers in [1, 256], shape (n_r, n_c)

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels)
        if self.pixels.ndim != 2:
            raise ValueError("image must be two-dimensional")
        if self.pixels.min() < 1 or self.pixels.max() > 256:
            raise ValueError("pixel values must lie in [1, 256]")

    @property
    def n_r(self) -> int:
        return self.pixels.shape[0]

    @property
    def n_c(self) -> int:
        return self.pixels.shape[1]


def phi(t: np.ndarray, regularizer: str, beta: float) -> np.ndarray:
    a = np.abs(t)
    if regularizer == "abs":
        return beta * a
    if regularizer == "log":
        return beta * np.log(1.0 + beta * a)
    if regularizer == "fraction":
        return beta * a / (1.0 + beta * a)
    if regularizer == "hard":
        return beta / 2.0 - np.maximum(0.0, beta - a) ** 2 / (2.0 * beta)
    raise ValueError(f"unknown regularizer {regularizer!r}")


def dphi(t: np.ndarray, regularizer: str, beta: float) -> np.ndarray:
    s = np.sign(t)
    a = np.abs(t)
    if regularizer == "abs":
        return beta * s
    if regularizer == "log":
        return beta * beta * s / (1.0 + beta * a)
    if regularizer == "fraction":
        return beta * s / (1.0 + beta * a) ** 2
    if regularizer == "hard":
        return np.maximum(0.0, beta - a) * s / beta
    raise ValueError(f"unknown regularizer {regularizer!r}")


def make_denoising(noisy: GrayImage, regularizer: str,
                   lam: float, beta: float) -> ProblemInstance:
    if regularizer not in REGULARIZERS:
        raise ValueError(f"unknown regularizer {regularizer!r}")
    if lam <= 0 or beta <= 0:
        raise ValueError("lambda and beta must be positive")
    xbar = noisy.pixels.astype(float)
    nr, nc = xbar.shape
    n = nr * nc

    def f(x):
        X = x.reshape(nr, nc)
        dv = X[1:, :-1] - X[:-1, :-1]
        dh = X[:-1, 1:] - X[:-1, :-1]
        data = float(np.sum((X - xbar) ** 2))
        return data + lam * float(np.sum(phi(dv, regularizer, beta))
                                  + np.sum(phi(dh, regularizer, beta)))

    def g(x):
        X = x.reshape(nr, nc)
        dv = X[1:, :-1] - X[:-1, :-1]
        dh = X[:-1, 1:] - X[:-1, :-1]
        out = 2.0 * (X - xbar)
        pv = lam * dphi(dv, regularizer, beta)
        ph = lam * dphi(dh, regularizer, beta)
        out[1:, :-1] += pv
        out[:-1, :-1] -= pv
        out[:-1, 1:] += ph
        out[:-1, :-1] -= ph
        return out.ravel()

    oracle = ObjectiveOracle(dimension=n, evaluate_f=f, evaluate_g=g)
    return ProblemInstance(name=f"denoise_{regularizer}", n=n,
                           x0=xbar.ravel().copy(), oracle=oracle, f_star=None)


def add_salt_pepper(image: GrayImage, density: float, seed: int) -> GrayImage:
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    shape = image.pixels.shape
    hit = rng.uniform(size=shape) < density
    salt = rng.integers(0, 2, size=shape)  # 0 -> pepper (1), 1 -> salt (256)
    noisy = np.where(hit, 1 + 255 * salt, image.pixels)
    return GrayImage(pixels=noisy)


def round_to_image(x: np.ndarray, n_r: int, n_c: int) -> GrayImage:
    vals = np.clip(np.rint(np.asarray(x, dtype=float)), 1, 256).astype(int)
    return GrayImage(pixels=vals.reshape(n_r, n_c))


def mse(x, y) -> float:
    """Sum of squared pixel differences (squared Frobenius norm)."""
    a = x.pixels if isinstance(x, GrayImage) else np.asarray(x, dtype=float)
    b = y.pixels if isinstance(y, GrayImage) else np.asarray(y, dtype=float)
    d = a.astype(float) - b.astype(float)
    return float(np.sum(d * d))


def synthetic_image(n_r: int, n_c: int) -> GrayImage:
    """Deterministic piecewise-constant test image with a gradient band."""
    img = np.full((n_r, n_c), 96)
    img[: n_r // 2, : n_c // 2] = 32
    img[n_r // 2:, n_c // 2:] = 224
    band = np.linspace(64, 192, n_c, dtype=int)
    img[n_r // 4: n_r // 4 + max(1, n_r // 8), :] = band
    return GrayImage(pixels=img.astype(int))
