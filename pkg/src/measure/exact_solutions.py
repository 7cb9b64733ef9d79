"""
Closed-form solutions psi_mu of the continuous problems and their Legendre
transforms phi_mu

Both functions accept a single point of shape (2,) or a batch of shape (..., 2).
phi_mu uses the convention t log t = 0 for t = 0 and +inf for t < 0, so it is
finite exactly on supp mu.
"""
from dataclasses import dataclass
from typing import Callable, List, Tuple
import logging

import numpy as np
from scipy.special import logsumexp, xlogy

from config.test_cases import TEST_CASES
from src.exceptions import InvalidMeasureError

logger = logging.getLogger(__name__)

# rounding slack when grid points land on the boundary of supp mu
BOUNDARY_TOL = 1e-12

LOG2 = np.log(2.0)
LOG3 = np.log(3.0)


@dataclass(frozen=True)
class ExactSolution:
    """Exact psi_mu, phi_mu = psi_mu* and the polygon supp mu (ccw vertices)"""
    psi: Callable[[np.ndarray], np.ndarray]
    phi: Callable[[np.ndarray], np.ndarray]
    support: List[Tuple[float, float]]

    def contains(self, y) -> np.ndarray:
        """True where y lies in supp mu"""
        return np.isfinite(self.phi(y))


def _xlogx(t: np.ndarray) -> np.ndarray:
    t = np.where((t < 0) & (t > -BOUNDARY_TOL), 0.0, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(t < 0, np.inf, xlogy(t, np.maximum(t, 0.0)))


def _square_psi(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return 2.0 * np.logaddexp(0.0, x1) - x1 + 2.0 * np.logaddexp(0.0, x2) - x2


def _square_phi(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    y1, y2 = y[..., 0], y[..., 1]
    return _xlogx(1.0 + y1) + _xlogx(1.0 - y1) + _xlogx(1.0 + y2) + _xlogx(1.0 - y2) - 4.0 * LOG2


def _triangle_psi(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    terms = np.stack([np.zeros_like(x1), x1, x2], axis=-1)
    return 3.0 * logsumexp(terms, axis=-1) - x1 - x2 - LOG2


def _triangle_phi(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    y1, y2 = y[..., 0], y[..., 1]
    return _xlogx(1.0 + y1) + _xlogx(1.0 + y2) + _xlogx(1.0 - y1 - y2) - 3.0 * LOG3 + LOG2


_SOLUTIONS = {
    1: (_square_psi, _square_phi),
    2: (_triangle_psi, _triangle_phi),
}


def exact_solution(test_id: int) -> ExactSolution:
    """Exact solution shared by test case `test_id` (3 and 5 reuse 1, 4 reuses 2)"""
    if test_id not in TEST_CASES:
        raise InvalidMeasureError(f"unknown test case {test_id!r}, expected one of {sorted(TEST_CASES)}")
    case = TEST_CASES[test_id]
    psi, phi = _SOLUTIONS[case["exact"]]
    return ExactSolution(psi=psi, phi=phi, support=list(case["support"]))
