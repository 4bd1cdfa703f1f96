"""Sensing-coverage geometry.

All coverage quantities reduce to the area of intersection of two discs
(:func:`lens_area`). :func:`monte_carlo_region_area` is an independent
hit-or-miss estimator used to cross-check the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Disc",
    "Region",
    "CoverageScore",
    "lens_area",
    "clipped_coverage_area",
    "collaborative_score",
    "score_profile",
    "monte_carlo_region_area",
    "bounding_box",
]


class Region:
    """A planar point set supporting ``&``, ``|`` and ``-`` composition."""

    def contains(self, xy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __and__(self, other: "Region") -> "Region":
        return _Intersection(self, other)

    def __or__(self, other: "Region") -> "Region":
        return _Union(self, other)

    def __sub__(self, other: "Region") -> "Region":
        return _Difference(self, other)


@dataclass(frozen=True, eq=True)
class Disc(Region):
    center: tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disc radius must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    def contains(self, xy):
        dx = xy[:, 0] - self.center[0]
        dy = xy[:, 1] - self.center[1]
        return dx * dx + dy * dy <= self.radius * self.radius

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2


@dataclass(frozen=True)
class _Intersection(Region):
    a: Region
    b: Region

    def contains(self, xy):
        return self.a.contains(xy) & self.b.contains(xy)


@dataclass(frozen=True)
class _Union(Region):
    a: Region
    b: Region

    def contains(self, xy):
        return self.a.contains(xy) | self.b.contains(xy)


@dataclass(frozen=True)
class _Difference(Region):
    a: Region
    b: Region

    def contains(self, xy):
        return self.a.contains(xy) & ~self.b.contains(xy)


@dataclass(frozen=True)
class CoverageScore:
    raw_area_m2: float
    normalized: float

    def __post_init__(self):
        if self.raw_area_m2 < 0 or not 0.0 <= self.normalized <= 1.0:
            raise ValueError("invalid coverage score")


def _segment(r: float, half_angle: float) -> float:
    # circular segment cut by a chord subtending 2 * half_angle
    return r * r * (half_angle - math.sin(half_angle) * math.cos(half_angle))


def lens_area(r1: float, r2: float, d: float) -> float:
    """Area of intersection of two discs of radii ``r1``, ``r2`` whose
    centers are ``d`` apart."""
    if r1 < 0 or r2 < 0 or d < 0:
        raise ValueError("radii and distance must be non-negative")
    if r1 == 0 or r2 == 0 or d >= r1 + r2:
        return 0.0
    # the second test catches subnormal d, where 2*d*r underflows to zero
    if d <= abs(r1 - r2) or 2.0 * d * min(r1, r2) == 0.0:
        return math.pi * min(r1, r2) ** 2
    c1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)
    c2 = (d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)
    a1 = math.acos(min(1.0, max(-1.0, c1)))
    a2 = math.acos(min(1.0, max(-1.0, c2)))
    return _segment(r1, a1) + _segment(r2, a2)


def clipped_coverage_area(cav: Disc, ego_center, d_max: float) -> float:
    """Part of the CAV's sensing disc lying inside the collaborative
    coverage disc of radius ``d_max`` around the ego."""
    if not cav.radius < d_max:
        raise ValueError("sensing radius exceeds MCSC")
    return lens_area(cav.radius, d_max, math.dist(cav.center, ego_center))


def collaborative_score(cav: Disc, ego: Disc, d_max: float) -> float:
    """Area the CAV senses inside the collaborative coverage disc that the
    ego does not already sense.

    The ego disc lies inside the coverage disc, so the union-minus-ego area
    equals the clipped CAV area minus the CAV/ego lens.
    """
    if not cav.radius < d_max:
        raise ValueError("sensing radius exceeds MCSC")
    if ego.radius > d_max:
        raise ValueError("ego sensing radius exceeds MCSC")
    d = math.dist(cav.center, ego.center)
    score = clipped_coverage_area(cav, ego.center, d_max) - lens_area(cav.radius, ego.radius, d)
    return max(0.0, score)


def score_profile(r_cav: float, r_ego: float, d_max: float, num_samples: int = 1000) -> np.ndarray:
    """Collaborative score as a CAV moves radially away from the ego.

    Returns an ``(num_samples, 2)`` array of ``(distance_m, score_m2)`` on an
    even grid over ``[0, d_max + r_cav]``.
    """
    if num_samples < 3:
        raise ValueError("num_samples must be >= 3")
    ego = Disc((0.0, 0.0), r_ego)
    distances = np.linspace(0.0, d_max + r_cav, num_samples)
    scores = [collaborative_score(Disc((d, 0.0), r_cav), ego, d_max) for d in distances]
    return np.column_stack([distances, scores])


def bounding_box(*discs: Disc):
    """Axis-aligned ``((xmin, xmax), (ymin, ymax))`` enclosing ``discs``."""
    xs = [(c.center[0] - c.radius, c.center[0] + c.radius) for c in discs]
    ys = [(c.center[1] - c.radius, c.center[1] + c.radius) for c in discs]
    return ((min(x[0] for x in xs), max(x[1] for x in xs)),
            (min(y[0] for y in ys), max(y[1] for y in ys)))


def monte_carlo_region_area(region: Region, box, n_samples: int = 1_000_000, seed: int = 0,
                            chunk_size: int = 250_000):
    """Hit-or-miss estimate of ``region``'s area.

    Returns ``(estimate, standard_error)``; ``box`` is
    ``((xmin, xmax), (ymin, ymax))`` and must enclose the region.
    """
    (x0, x1), (y0, y1) = box
    if not (x1 > x0 and y1 > y0):
        raise ValueError("degenerate bounding box")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = n_samples
    while remaining:
        m = min(chunk_size, remaining)
        xy = np.column_stack([rng.uniform(x0, x1, m), rng.uniform(y0, y1, m)])
        hits += int(np.count_nonzero(region.contains(xy)))
        remaining -= m
    box_area = (x1 - x0) * (y1 - y0)
    p = hits / n_samples
    return box_area * p, box_area * math.sqrt(p * (1.0 - p) / n_samples)
