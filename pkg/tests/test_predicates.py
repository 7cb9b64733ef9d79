from fractions import Fraction

import numpy as np
import pytest

from src.geometry.predicates import lifted_midpoint_below, orient2d, orient3d


def _exact_orient2d(a, b, c):
    a, b, c = ([Fraction(float(v)) for v in p] for p in (a, b, c))
    det = (a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0])
    return (det > 0) - (det < 0)


def test_orient2d_simple():
    assert orient2d((0, 0), (1, 0), (0, 1)) == 1
    assert orient2d((0, 0), (0, 1), (1, 0)) == -1
    assert orient2d((0, 0), (1, 1), (2, 2)) == 0


def test_orient2d_is_vectorized():
    a = np.zeros((3, 2))
    b = np.array([[1, 0], [1, 0], [1, 0]])
    c = np.array([[0, 1], [0, -1], [2, 0]])
    np.testing.assert_array_equal(orient2d(a, b, c), [1, -1, 0])
    assert orient2d((0, 0), (1, 0), (0, 1)).shape == ()


def test_orient2d_near_degenerate_inputs_are_exact():
    # perturbations of the collinear triple (0.5, 0.5), (12, 12), (24, 24) by a few ulps
    ulp = 2.0 ** -53
    b, c = np.array([12.0, 12.0]), np.array([24.0, 24.0])
    for i in range(-8, 9):
        for j in range(-8, 9):
            a = np.array([0.5 + i * ulp, 0.5 + j * ulp])
            assert orient2d(a, b, c) == _exact_orient2d(a, b, c)


def test_orient3d_convention():
    a, b, c = (0, 0, 0), (1, 0, 0), (0, 1, 0)
    assert orient3d(a, b, c, (0.2, 0.2, 1.0)) == 1
    assert orient3d(a, b, c, (0.2, 0.2, -1.0)) == -1
    assert orient3d(a, b, c, (5.0, -3.0, 0.0)) == 0


def test_orient3d_on_a_paraboloid():
    # lifted cocircular points are coplanar, a point inside the circle lies below their plane
    lift = lambda x, y: (x, y, x * x + y * y)
    a, b, c = lift(1, 0), lift(0, 1), lift(-1, 0)
    assert orient3d(a, b, c, lift(0, -1)) == 0
    assert orient3d(a, b, c, lift(0.1, 0.2)) == -1
    assert orient3d(a, b, c, lift(2, 2)) == 1


def test_orient3d_tiny_height_is_resolved():
    a, b, c = (0, 0, 1.0), (1, 0, 1.0), (0, 1, 1.0)
    assert orient3d(a, b, c, (0.25, 0.25, 1.0 + 2.0 ** -52)) == 1
    assert orient3d(a, b, c, (0.25, 0.25, 1.0 - 2.0 ** -53)) == -1


def test_lifted_midpoint_below():
    assert lifted_midpoint_below((0, 0, 1.0), (0.5, 0, 0.4), (1, 0, 0.0))
    assert not lifted_midpoint_below((0, 0, 1.0), (0.5, 0, 0.5), (1, 0, 0.0))
    assert not lifted_midpoint_below((0, 0, 1.0), (0.25, 0, 0.9), (1, 0, 0.0))
