import numpy as np
import pytest
from conftest import all_assignments, random_assignments, random_cloud
from numpy.testing import assert_allclose
from scipy.optimize import nnls

from global_kmeans.assignment_lp import (
    CostMatrix,
    LPBasis,
    cut_from_gradient,
    linear_min,
    local_search,
    ls_project,
    standard_form,
    tight_cuts,
)
from global_kmeans.core import (
    Assignment,
    assignment_image,
    gradient,
    kmeans_objective,
)
from global_kmeans.errors import DegenerateError, DomainError, InfeasibleError
from global_kmeans.state import CutKind


def _brute_linear_min(weights: np.ndarray, n_min: int) -> float:
    n, k = weights.shape
    return min(
        float(weights[np.arange(n), gamma.labels].sum())
        for gamma in all_assignments(n, k, n_min)
    )


@pytest.mark.parametrize(
    "n, k, n_min", [(4, 2, 1), (6, 3, 1), (7, 2, 2), (8, 3, 2), (8, 2, 1)]
)
def test_linear_min_matches_enumeration(rng, n, k, n_min):
    for _ in range(5):
        weights = rng.normal(size=(n, k))
        gamma, value, _ = linear_min(weights, n_min)
        assert gamma.is_valid()
        assert_allclose(value, weights[np.arange(n), gamma.labels].sum())
        assert_allclose(value, _brute_linear_min(weights, n_min), atol=1e-12)


def test_linear_min_dominant_column():
    weights = np.array([[0.0, 5.0], [0.0, 1.0], [0.0, 3.0]])
    gamma, value, _ = linear_min(weights)
    assert gamma.labels.tolist() == [0, 1, 0]
    assert value == pytest.approx(1.0)


def test_linear_min_zero_costs():
    gamma, value, _ = linear_min(np.zeros((5, 3)), 1)
    assert value == 0.0
    assert gamma.is_valid()


def test_linear_min_ties_prefer_low_indices():
    gamma, value, _ = linear_min(np.zeros((4, 2)), 2)
    assert gamma.labels.tolist() == [0, 0, 1, 1]
    assert value == 0.0

    gamma, _, _ = linear_min(np.zeros((5, 2)), 1)
    assert gamma.labels.tolist() == [0, 1, 0, 0, 0]

    # Points 1 and 3 cost the same in cluster 1, point 1 takes the seat
    weights = np.array([[0.0, 5.0], [0.0, 2.0], [0.0, 3.0], [0.0, 2.0]])
    gamma, value, _ = linear_min(weights, 1)
    assert gamma.labels.tolist() == [0, 1, 0, 0]
    assert value == pytest.approx(2.0)


def test_linear_min_is_order_independent_under_ties(rng):
    # Duplicate rows give many equal-cost seatings
    base = rng.normal(size=(3, 3))
    weights = base[[0, 1, 2, 0, 1, 2, 0, 1]]
    gamma, value, _ = linear_min(weights, 2)
    again, repeated, _ = linear_min(weights.copy(), 2)
    assert gamma.labels.tolist() == again.labels.tolist()
    assert value == repeated
    assert_allclose(value, _brute_linear_min(weights, 2), atol=1e-12)


def test_linear_min_infeasible():
    with pytest.raises(InfeasibleError):
        linear_min(np.zeros((3, 2)), 2)


def test_cost_matrix_rejects_bad_entries():
    with pytest.raises(DomainError):
        CostMatrix(np.array([[0.0, np.inf]]))

    with pytest.raises(DomainError):
        CostMatrix(np.zeros(3))


def test_basis_is_square_and_nonsingular(rng):
    weights = rng.normal(size=(6, 3))
    _, _, basis = linear_min(weights, 2)
    assert basis.basic.size == basis.n + basis.k
    assert basis.nonbasic.size == basis.n * basis.k - basis.n
    assert np.linalg.matrix_rank(basis.matrix()) == basis.n + basis.k
    assert standard_form(6, 3).shape == (9, 21)


def test_basis_tight_clusters():
    basis = LPBasis.from_assignment(Assignment([0, 0, 1, 2, 2, 2], 3, n_min=2))
    assert basis.tight.tolist() == [True, False, False]


# -----------------------------------------------------------------------------


def test_cut_from_gradient_is_valid(rng):
    cloud = random_cloud(rng, 7, 2)
    z = assignment_image(cloud, random_assignments(rng, 7, 3, 1)[0])
    grad = gradient(cloud, z)
    cut, gamma = cut_from_gradient(cloud, grad)

    assert cut.kind == CutKind.GRADIENT
    images = np.array([assignment_image(cloud, g) for g in all_assignments(7, 3)])
    scale = max(1.0, abs(cut.offset))
    assert np.all(cut.value(images) <= 1e-9 * scale)
    # The minimizing assignment lies on the cut
    assert cut.value(assignment_image(cloud, gamma)) == pytest.approx(0.0, abs=1e-9)


def test_cut_from_gradient_four_points(four_points):
    z = assignment_image(four_points, Assignment([0, 1, 0, 1], 2))
    cut, gamma = cut_from_gradient(four_points, gradient(four_points, z))
    # Nearest-centroid reassignment of the interleaved split
    assert gamma.labels.tolist() == [0, 0, 1, 1]
    assert cut.contains(z)


def test_cut_from_zero_gradient(four_points):
    with pytest.raises(DegenerateError):
        cut_from_gradient(four_points, np.zeros((2, 2)))


# -----------------------------------------------------------------------------


def test_local_search_four_points(four_points):
    history = []
    result = local_search(four_points, Assignment([0, 1, 0, 1], 2), history=history)
    assert result.labels.tolist() == [0, 0, 1, 1]
    assert history == pytest.approx([100.0, 1.0])


def test_local_search_fixed_point(four_points):
    start = Assignment([0, 0, 1, 1], 2)
    history = []
    result = local_search(four_points, start, history=history)
    assert result.labels.tolist() == [0, 0, 1, 1]
    assert len(history) == 1


def test_local_search_strictly_decreases(rng):
    cloud = random_cloud(rng, 30, 2)
    for gamma in random_assignments(rng, 30, 4, 5):
        history = []
        result = local_search(cloud, gamma, history=history)
        assert np.all(np.diff(history) < 0)
        assert kmeans_objective(cloud, result) == pytest.approx(history[-1])
        assert result.is_valid()


# -----------------------------------------------------------------------------


def _hull_distance(images: np.ndarray, target: np.ndarray) -> float:
    """Distance from target to the convex hull of images (penalized nnls)."""
    weight = 1e4
    flat = images.reshape(len(images), -1)
    matrix = np.vstack([flat.T, np.full((1, len(images)), weight)])
    rhs = np.concatenate([target.ravel(), [weight]])
    coeffs, _ = nnls(matrix, rhs)
    return float(np.linalg.norm(coeffs @ flat - target.ravel()))


def test_ls_project_inside_hull(rng):
    cloud = random_cloud(rng, 8, 2)
    first, second = random_assignments(rng, 8, 2, 2)
    target = 0.5 * (assignment_image(cloud, first) + assignment_image(cloud, second))
    _, support, cut = ls_project(cloud, target)
    assert cut is None
    assert support.is_valid()


def test_ls_project_separates_far_target(rng):
    cloud = random_cloud(rng, 8, 2)
    target = 3.0 * assignment_image(cloud, random_assignments(rng, 8, 2, 1)[0])
    projected, _, cut = ls_project(cloud, target)

    assert cut is not None
    assert cut.kind == CutKind.LEAST_SQUARES
    assert not cut.contains(target)
    images = np.array([assignment_image(cloud, g) for g in all_assignments(8, 2)])
    assert np.all(cut.value(images) <= 1e-9 * max(1.0, abs(cut.offset)))
    assert projected.values.shape == target.shape


def test_ls_project_distance_matches_hull_oracle(rng):
    cloud = random_cloud(rng, 5, 1)
    images = np.array([assignment_image(cloud, g) for g in all_assignments(5, 2)])
    target = 3.0 * images[0]
    projected, _, _ = ls_project(cloud, target)

    expected = _hull_distance(images, target)
    actual = float(np.linalg.norm(projected.values - target))
    assert actual == pytest.approx(expected, rel=0.05)


def test_ls_project_rejects_non_finite(four_points):
    with pytest.raises(DomainError):
        ls_project(four_points, np.full((2, 2), np.nan))


# -----------------------------------------------------------------------------


@pytest.mark.parametrize("n_min", [1, 2])
def test_tight_cuts_keep_basis_optimal(rng, n_min):
    cloud = random_cloud(rng, 8, 2)
    start = random_assignments(rng, 8, 3, 1, n_min)[0]
    grad = gradient(cloud, assignment_image(cloud, start))
    gamma, _, basis = linear_min(CostMatrix.from_normal(cloud, grad), n_min)

    normals = tight_cuts(cloud, basis, grad, alpha=0.1, count=3)
    assert len(normals) <= 3
    for normal in normals:
        assert normal.shape == grad.shape
        assert np.abs(normal - grad).max() <= 0.5 * np.abs(grad).max() + 1e-9

        weights = CostMatrix.from_normal(cloud, normal).entries
        at_basis = float(weights[np.arange(cloud.n), gamma.labels].sum())
        _, best, _ = linear_min(weights, n_min)
        assert at_basis <= best + 1e-7 * max(1.0, abs(best))


def test_tight_cuts_give_valid_cuts(rng):
    cloud = random_cloud(rng, 7, 2)
    start = random_assignments(rng, 7, 2, 1)[0]
    grad = gradient(cloud, assignment_image(cloud, start))
    _, _, basis = linear_min(CostMatrix.from_normal(cloud, grad))
    images = np.array([assignment_image(cloud, g) for g in all_assignments(7, 2)])

    for normal in tight_cuts(cloud, basis, grad):
        cut, _ = cut_from_gradient(cloud, normal, kind=CutKind.TIGHT)
        assert cut.kind == CutKind.TIGHT
        assert np.all(cut.value(images) <= 1e-9 * max(1.0, abs(cut.offset)))


def test_tight_cuts_single_cluster(four_points):
    basis = LPBasis.from_assignment(Assignment([0, 0, 0, 0], 1))
    assert tight_cuts(four_points, basis, np.ones((2, 1))) == []
