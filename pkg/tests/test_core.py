import numpy as np
import pytest
from conftest import random_assignments, random_cloud
from numpy.testing import assert_allclose, assert_array_equal

from global_kmeans.core import (
    Assignment,
    PointCloud,
    SolverConfig,
    ZMatrix,
    assignment_image,
    centroids,
    concave_objective,
    concave_values,
    gradient,
    kmeans_objective,
)
from global_kmeans.errors import DomainError, InfeasibleError


def test_point_cloud_shapes(four_points):
    assert four_points.n == 4
    assert four_points.d == 1
    assert_array_equal(four_points.augmented[-1], np.ones(4))
    assert_allclose(four_points.total, [22.0, 4.0])
    assert four_points.c0 == 0.0 + 1.0 + 100.0 + 121.0


def test_point_cloud_rejects_bad_data():
    with pytest.raises(DomainError):
        PointCloud(np.zeros((0, 3)))

    with pytest.raises(DomainError):
        PointCloud.from_points([[0.0, np.nan]])


def test_kmeans_objective_four_points(four_points):
    best = Assignment([0, 0, 1, 1], 2)
    worst = Assignment([0, 1, 0, 1], 2)
    assert kmeans_objective(four_points, best) == pytest.approx(1.0)
    assert kmeans_objective(four_points, worst) == pytest.approx(100.0)
    assert_allclose(centroids(four_points, best), [[0.5, 10.5]])


def test_empty_cluster_is_rejected(four_points):
    with pytest.raises(DomainError):
        kmeans_objective(four_points, Assignment([0, 0, 0, 0], 2))


def test_concave_objective_matches_kmeans(rng):
    cloud = random_cloud(rng, 12, 3)
    for gamma in random_assignments(rng, 12, 3, 50):
        z = ZMatrix.from_assignment(cloud, gamma)
        assert_allclose(
            concave_objective(cloud, z), kmeans_objective(cloud, gamma), rtol=1e-10
        )
        assert_allclose(z.masses, gamma.counts)


def test_assignment_image_matches_matrix_product(rng):
    cloud = random_cloud(rng, 7, 2)
    gamma = random_assignments(rng, 7, 3, 1)[0]
    assert_allclose(assignment_image(cloud, gamma), cloud.augmented @ gamma.matrix())


def _interior_points(rng, count: int, d: int, k: int) -> np.ndarray:
    """Random Z matrices with cluster masses in [1, 5]."""
    zs = rng.normal(scale=2.0, size=(count, d + 1, k))
    zs[:, -1, :] = rng.uniform(1.0, 5.0, size=(count, k))
    return zs


def _central_differences(cloud, z: np.ndarray, step: float) -> np.ndarray:
    shifts = step * np.eye(z.size).reshape(z.size, *z.shape)
    forward = concave_values(cloud, z + shifts)
    backward = concave_values(cloud, z - shifts)
    return ((forward - backward) / (2 * step)).reshape(z.shape)


def test_gradient_one_dimensional_example(four_points):
    z = np.array([[4.0], [2.0]])
    assert_allclose(gradient(four_points, z), [[-4.0], [4.0]])
    assert_allclose(
        _central_differences(four_points, z, 1e-5), [[-4.0], [4.0]], rtol=1e-6
    )


def test_gradient_matches_finite_differences(rng):
    cloud = random_cloud(rng, 9, 2)
    for z in _interior_points(rng, 100, 2, 3):
        grad = gradient(cloud, z)
        numeric = _central_differences(cloud, z, 1e-5)
        assert_allclose(grad, numeric, rtol=1e-6, atol=1e-8)


def test_gradient_at_assignment_images(rng):
    cloud = random_cloud(rng, 9, 2)
    for gamma in random_assignments(rng, 9, 3, 10):
        z = assignment_image(cloud, gamma)
        numeric = _central_differences(cloud, z, 1e-5)
        assert_allclose(gradient(cloud, z), numeric, rtol=1e-6, atol=1e-8)


def test_concave_along_segments(rng):
    cloud = random_cloud(rng, 9, 2)
    first = _interior_points(rng, 200, 2, 3)
    second = _interior_points(rng, 200, 2, 3)
    t = rng.uniform(size=(200, 1, 1))

    middle = concave_values(cloud, t * first + (1 - t) * second)
    chord = t.ravel() * concave_values(cloud, first)
    chord += (1 - t.ravel()) * concave_values(cloud, second)
    scale = np.maximum(1.0, np.abs(chord))
    assert np.all(middle >= chord - 1e-9 * scale)


def test_gradient_overestimates(rng):
    cloud = random_cloud(rng, 9, 2)
    first = _interior_points(rng, 200, 2, 3)
    second = _interior_points(rng, 200, 2, 3)

    for z_a, z_b in zip(first, second):
        tangent = concave_objective(cloud, z_a) + np.vdot(
            gradient(cloud, z_a), z_b - z_a
        )
        value = concave_objective(cloud, z_b)
        assert value <= tangent + 1e-9 * max(1.0, abs(tangent))


def test_mass_floor(four_points):
    z = np.array([[1.0, 21.0], [0.0, 4.0]])
    with pytest.raises(DomainError):
        concave_objective(four_points, z)

    with pytest.raises(DomainError):
        gradient(four_points, z)


def test_assignment_matrix_round_trip():
    gamma = Assignment([2, 0, 2, 1], 3)
    again = Assignment.from_matrix(gamma.matrix())
    assert_array_equal(again.labels, gamma.labels)
    assert_array_equal(gamma.counts, [1, 1, 2])

    with pytest.raises(DomainError):
        Assignment.from_matrix(np.array([[1, 1], [0, 1]]))


def test_assignment_canonical_relabels_by_first_appearance():
    gamma = Assignment([2, 2, 0, 1, 0], 3)
    assert_array_equal(gamma.canonical().labels, [0, 0, 1, 2, 1])


def test_assignment_validity():
    assert not Assignment([0, 0, 1], 2, n_min=2).is_valid()
    assert Assignment([0, 0, 1, 1], 2, n_min=2).is_valid()

    with pytest.raises(DomainError):
        Assignment([0, 3], 2)


def test_solver_config_validation():
    SolverConfig(k=2).validate(4)

    with pytest.raises(DomainError):
        SolverConfig(k=0).validate(4)

    with pytest.raises(DomainError):
        SolverConfig(k=5).validate(4)

    with pytest.raises(InfeasibleError):
        SolverConfig(k=2, n_min=3).validate(5)

    with pytest.raises(DomainError):
        SolverConfig(k=2, epsilon=0.0, rel_gap=0.0).validate(4)

    assert SolverConfig(k=3).tight_cut_count == 6
    assert SolverConfig(k=3, tight_count=1).tight_cut_count == 1
