import numpy as np
import pytest

from src.measure.discrete_measure import DiscreteMeasure

CROSS = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]


@pytest.fixture
def cross():
    """Uniform measure on the four unit axis points"""
    return DiscreteMeasure.uniform(CROSS)


@pytest.fixture
def cross_with_origin():
    """The four axis points plus the origin, uniform"""
    return DiscreteMeasure.uniform([(0.0, 0.0)] + CROSS)


def random_centered_measure(rng: np.random.Generator, size: int) -> DiscreteMeasure:
    points = rng.uniform(-1.0, 1.0, size=(size, 2))
    weights = rng.uniform(0.5, 1.5, size=size)
    weights /= weights.sum()
    points -= weights @ points
    return DiscreteMeasure(points, weights)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
