"""
Finitely supported probability measures in the plane and their diagnostics
"""
from dataclasses import dataclass, field
import logging

import numpy as np

from src.exceptions import InvalidMeasureError

logger = logging.getLogger(__name__)

PROBABILITY_TOL = 1e-12
CENTERING_TOL = 1e-12
LINE_TOL = 1e-12
DIRECTION_COUNT = 3600


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms y_i with positive masses nu({y_i}); centered, not supported on a line"""
    points: np.ndarray   # (N, 2)
    weights: np.ndarray  # (N,)

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise InvalidMeasureError(f"points must have shape (N, 2), got {points.shape}")
        if weights.shape != (points.shape[0],):
            raise InvalidMeasureError(f"expected {points.shape[0]} weights, got shape {weights.shape}")
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(weights))):
            raise InvalidMeasureError("points and weights must be finite")
        if np.any(weights <= 0):
            raise InvalidMeasureError("all weights must be strictly positive")
        if abs(weights.sum() - 1.0) > PROBABILITY_TOL:
            raise InvalidMeasureError(f"weights sum to {weights.sum():.17g}, not 1")
        if len(np.unique(points, axis=0)) != len(points):
            raise InvalidMeasureError("support points must be pairwise distinct")

        mean = weights @ points
        if np.any(np.abs(mean) > CENTERING_TOL):
            raise InvalidMeasureError(f"measure is not centered: mean = {mean}")
        centered = points - mean
        second_moment = (centered * weights[:, None]).T @ centered
        if np.linalg.eigvalsh(second_moment)[0] <= LINE_TOL:
            raise InvalidMeasureError("measure is supported on a line")

        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def min_weight(self) -> float:
        return float(self.weights.min())

    @classmethod
    def uniform(cls, points) -> "DiscreteMeasure":
        points = np.asarray(points, dtype=float)
        return cls(points, np.full(len(points), 1.0 / len(points)))


@dataclass(frozen=True)
class MeasureDiagnostics:
    """Constants R and r of the stability estimate, evaluated on nu"""
    R_lower: float
    r_upper: float
    direction: np.ndarray = field(default=None, repr=False)


def diagnostics(nu: DiscreteMeasure, directions: int = DIRECTION_COUNT) -> MeasureDiagnostics:
    """
    R_lower is the exact value of the integral of |y| against nu.

    r_upper approximates inf over unit w of the integral of |<w, y>| by the
    minimum over a uniform grid of `directions` angles, so it is an upper bound
    of the true infimum.
    """
    R_lower = float(nu.weights @ np.linalg.norm(nu.points, axis=1))

    angles = 2.0 * np.pi * np.arange(directions) / directions
    w = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    values = np.abs(nu.points @ w.T).T @ nu.weights
    best = int(np.argmin(values))

    return MeasureDiagnostics(R_lower=R_lower, r_upper=float(values[best]), direction=w[best])
