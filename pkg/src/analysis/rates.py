"""
Empirical convergence rates: least-squares slope of log(error) against log(N)
"""
from typing import Iterable, Tuple

import numpy as np

from src.exceptions import RateFitError

MIN_SAMPLES = 2


def fit_rate(samples: Iterable[Tuple[int, float]]) -> float:
    samples = list(samples)
    if len(samples) < MIN_SAMPLES:
        raise RateFitError(f"need at least {MIN_SAMPLES} rows, got {len(samples)}")
    N = np.array([s[0] for s in samples], dtype=float)
    error = np.array([s[1] for s in samples], dtype=float)
    if len(np.unique(N)) != len(N):
        raise RateFitError(f"sample sizes must be distinct, got {N.astype(int).tolist()}")
    if np.any(N <= 0) or np.any(~np.isfinite(error)) or np.any(error <= 0):
        raise RateFitError("sample sizes and errors must be positive and finite")
    slope, _ = np.polyfit(np.log(N), np.log(error), 1)
    return float(slope)
