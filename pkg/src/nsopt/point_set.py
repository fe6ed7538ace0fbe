"""Bundle maintenance: ball sampling, distance pruning, and age pruning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class BundleElement:
    x: np.ndarray
    f: float
    g: np.ndarray
    birth: int


class PointSet:
    """Ordered bundle of (x, f, g) triples; the current iterate is never pruned."""

    def __init__(self, current: BundleElement):
        self.elements: list[BundleElement] = [current]
        self.current = current

    def __len__(self) -> int:
        return len(self.elements)

    def add(self, element: BundleElement) -> None:
        self.elements.append(element)

    def set_current(self, element: BundleElement) -> None:
        if element not in self.elements:
            self.elements.append(element)
        self.current = element


def sample_ball(x_k: np.ndarray, eps: float, p: int, rng: np.random.Generator) -> list[np.ndarray]:
    """p points uniform over the closed Euclidean ball of radius eps around x_k.

    Directions come from normalized Gaussians and radii from eps * U^(1/n),
    which is exactly uniform over the ball.
    """
    x_k = np.asarray(x_k, dtype=float)
    n = x_k.size
    points = []
    for _ in range(p):
        direction = rng.standard_normal(n)
        norm = np.linalg.norm(direction)
        if norm == 0.0 or eps == 0.0:
            points.append(x_k.copy())
            continue
        radius = eps * rng.uniform() ** (1.0 / n)
        points.append(x_k + (radius / norm) * direction)
    return points


def prune_by_distance(point_set: PointSet, x_next: np.ndarray, eps_next: float,
                      envelope_factor: float) -> PointSet:
    """Drop elements farther than envelope_factor * eps_next from x_next."""
    if envelope_factor <= 0:
        raise ValueError("envelope_factor must be positive")
    limit = envelope_factor * eps_next
    kept = [e for e in point_set.elements
            if e is point_set.current or np.linalg.norm(e.x - x_next) <= limit]
    point_set.elements = kept
    return point_set


def prune_by_age(point_set: PointSet, limit: int) -> PointSet:
    """Keep at most ``limit`` elements, evicting the smallest birth indices first."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    if len(point_set.elements) <= limit:
        return point_set
    order = sorted(point_set.elements, key=lambda e: e.birth)
    excess = len(point_set.elements) - limit
    evicted = []
    for e in order:
        if len(evicted) == excess:
            break
        if e is not point_set.current:
            evicted.append(e)
    point_set.elements = [e for e in point_set.elements if e not in evicted]
    return point_set
