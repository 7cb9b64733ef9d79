import numpy as np
import pytest

from src.exceptions import InvalidMeasureError
from src.measure.discrete_measure import DiscreteMeasure, diagnostics


def test_uniform_measure(cross):
    assert cross.size == 4
    np.testing.assert_allclose(cross.weights, 0.25)
    assert cross.min_weight == 0.25


def test_measure_is_read_only(cross):
    with pytest.raises(ValueError):
        cross.weights[0] = 1.0


@pytest.mark.parametrize(
    "points, weights, message",
    [
        ([(1, 0), (0, 1), (-1, 0), (0, -1)], [0.5, 0.5, 0.0, 0.0], "strictly positive"),
        ([(1, 0), (0, 1), (-1, 0), (0, -1)], [0.3, 0.3, 0.3, 0.3], "sum"),
        ([(1, 0), (0, 1), (-1, 0), (0, -2)], [0.25] * 4, "centered"),
        ([(-1, 0), (0, 0), (1, 0)], [1 / 3, 1 / 3, 1 / 3], "line"),
        ([(1, 0), (1, 0), (-1, 0), (-1, 0)], [0.25] * 4, "distinct"),
        ([(1, 0, 0), (-1, 0, 0)], [0.5, 0.5], "shape"),
        ([(1, 0), (-1, 0)], [1.0], "weights"),
    ],
)
def test_invalid_measures_are_rejected(points, weights, message):
    with pytest.raises(InvalidMeasureError, match=message):
        DiscreteMeasure(points, weights)


def test_invalid_measure_is_a_value_error():
    with pytest.raises(ValueError):
        DiscreteMeasure([(np.nan, 0), (0, 1), (0, -1)], [1 / 3] * 3)


def test_diagnostics_of_cross(cross):
    report = diagnostics(cross)
    assert report.R_lower == pytest.approx(1.0)
    assert report.r_upper == pytest.approx(0.5)
    np.testing.assert_allclose(np.abs(report.direction), [1.0, 0.0], atol=1e-12)


def test_r_upper_bounds_every_sampled_direction(rng):
    points = rng.normal(size=(12, 2))
    points -= points.mean(axis=0)
    nu = DiscreteMeasure.uniform(points)
    report = diagnostics(nu, directions=720)
    for angle in rng.uniform(0, 2 * np.pi, size=20):
        w = np.array([np.cos(angle), np.sin(angle)])
        # grid spacing bounds how far below the grid minimum the true value can go
        assert nu.weights @ np.abs(nu.points @ w) >= report.r_upper - report.R_lower * np.pi / 720
    assert report.r_upper <= report.R_lower
