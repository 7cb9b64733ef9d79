import numpy as np
import pytest

from config.test_cases import TEST_CASES, support_size
from src.exceptions import InvalidMeasureError
from src.measure.exact_solutions import exact_solution
from src.measure.test_cases import (
    adapted_nodes,
    build_test_case,
    entropy_profile,
    interpolation_error,
    support_grid,
)


def _weight_at(nu, point):
    match = np.flatnonzero(np.all(np.isclose(nu.points, point, atol=1e-12), axis=1))
    assert len(match) == 1, f"{point} is not a support point"
    return nu.weights[match[0]]


@pytest.mark.parametrize("test_id", sorted(TEST_CASES))
@pytest.mark.parametrize("n", [2, 4, 8])
def test_support_size_and_normalization(test_id, n):
    nu = build_test_case(test_id, n)
    assert nu.size == support_size(test_id, n)
    assert nu.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(exact_solution(TEST_CASES[test_id]["exact"]).contains(nu.points))


def test_uniform_square_grid():
    nu = build_test_case(1, 8)
    assert nu.size == 81
    np.testing.assert_allclose(nu.weights, 1 / 81)
    np.testing.assert_allclose(np.unique(nu.points[:, 0]), np.arange(-4, 5) * 0.25)


def test_uniform_triangle_grid():
    nu = build_test_case(2, 8)
    assert nu.size == 91
    np.testing.assert_allclose(nu.weights, 8 / (26 * 28))
    assert np.all(nu.points.sum(axis=1) <= 1.0 + 1e-12)
    assert nu.points.min() == pytest.approx(-1.0)
    assert nu.points.max() == pytest.approx(2.0)


def test_lumped_triangle_weights():
    nu = build_test_case(4, 8)
    h = 0.25
    assert _weight_at(nu, (0.0, 0.0)) == pytest.approx(2 * h ** 2 / 9)
    assert _weight_at(nu, (0.0, -1.0)) == pytest.approx(h ** 2 / 9)
    assert _weight_at(nu, (0.5, 0.5)) == pytest.approx(h ** 2 / 9)
    assert _weight_at(nu, (-1.0, -1.0)) == pytest.approx(h ** 2 / 27)
    assert _weight_at(nu, (2.0, -1.0)) == pytest.approx(h ** 2 / 27)
    assert _weight_at(nu, (-1.0, 2.0)) == pytest.approx(h ** 2 / 27)


def test_lumped_square_weights():
    nu = build_test_case(3, 8)
    h = 0.25
    assert _weight_at(nu, (0.0, 0.0)) == pytest.approx(h ** 2 / 4)
    assert _weight_at(nu, (1.0, 0.0)) == pytest.approx(h ** 2 / 8)
    # the diagonal split puts one triangle at two corners and two at the others
    assert _weight_at(nu, (-1.0, -1.0)) == pytest.approx(h ** 2 / 24)
    assert _weight_at(nu, (1.0, 1.0)) == pytest.approx(h ** 2 / 24)
    assert _weight_at(nu, (1.0, -1.0)) == pytest.approx(h ** 2 / 12)
    assert _weight_at(nu, (-1.0, 1.0)) == pytest.approx(h ** 2 / 12)


def test_lumped_weights_reproduce_linear_moments():
    for test_id in (3, 4, 5):
        nu = build_test_case(test_id, 8)
        np.testing.assert_allclose(nu.weights @ nu.points, 0.0, atol=1e-14)


@pytest.mark.parametrize("test_id, n", [(0, 8), (6, 8), (1, 7), (1, 0), (1, -2), (1, 4.0), (1, True)])
def test_invalid_parameters(test_id, n):
    with pytest.raises(InvalidMeasureError):
        build_test_case(test_id, n)


def test_adapted_nodes_small():
    np.testing.assert_allclose(adapted_nodes(2), [-1.0, 0.0, 1.0])
    np.testing.assert_allclose(adapted_nodes(4), [-1.0, -0.5, 0.0, 0.5, 1.0])


@pytest.mark.parametrize("n", [6, 8, 16, 32])
def test_adapted_nodes_are_symmetric_and_refined_at_the_ends(n):
    nodes = adapted_nodes(n)
    assert len(nodes) == n + 1
    assert np.all(np.diff(nodes) > 0)
    np.testing.assert_array_equal(nodes, -nodes[::-1])
    assert nodes[0] == -1.0 and nodes[-1] == 1.0
    spacing = np.diff(nodes)
    assert spacing[0] <= spacing[n // 2]


def test_adapted_grid_support():
    nu = build_test_case(5, 8)
    np.testing.assert_allclose(np.unique(nu.points[:, 0]), adapted_nodes(8))
    np.testing.assert_array_equal(support_grid(5, 8), adapted_nodes(8))


def test_support_grid_of_uniform_cases():
    np.testing.assert_allclose(support_grid(1, 4), [-1.0, -0.5, 0.0, 0.5, 1.0])
    np.testing.assert_allclose(support_grid(2, 2), [-1.0, 0.0, 1.0, 2.0])


@pytest.mark.parametrize("a, b", [(0.0, 1.0), (0.5, 0.75), (-1.0, -0.5), (0.9, 1.0)])
def test_interpolation_error_matches_brute_force(a, b):
    t = np.linspace(a, b, 200001)
    chord = entropy_profile(a) + (entropy_profile(b) - entropy_profile(a)) * (t - a) / (b - a)
    assert interpolation_error(a, b) == pytest.approx(np.max(chord - entropy_profile(t)), abs=1e-9)


def test_entropy_profile_endpoints():
    np.testing.assert_allclose(entropy_profile([-1.0, 0.0, 1.0]), [2 * np.log(2), 0.0, 2 * np.log(2)])
