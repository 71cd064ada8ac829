"""Shared fixtures and independent oracles for the test suite."""
import itertools

import numpy as np
import pytest

from global_kmeans.core import Assignment, PointCloud
from global_kmeans.polytope import AffineFrame, Polytope


@pytest.fixture
def four_points() -> PointCloud:
    return PointCloud.from_points([0.0, 1.0, 10.0, 11.0])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_cloud(rng: np.random.Generator, n: int, d: int) -> PointCloud:
    return PointCloud.from_points(rng.normal(size=(n, d)))


def random_assignments(
    rng: np.random.Generator, n: int, k: int, count: int, n_min: int = 1
):
    """Valid assignments: n_min forced points per cluster, the rest uniform."""
    result = []
    for _ in range(count):
        labels = rng.integers(k, size=n)
        order = rng.permutation(n)
        labels[order[: k * n_min]] = np.repeat(np.arange(k), n_min)
        result.append(Assignment(labels, k, n_min))

    return result


def all_assignments(n: int, k: int, n_min: int = 1):
    for labels in itertools.product(range(k), repeat=n):
        gamma = Assignment(labels, k, n_min)
        if gamma.is_valid():
            yield gamma


def box_polytope(dim: int, high: float = 1.0) -> Polytope:
    """[0, high]^dim in a reduced frame equal to the ambient space."""
    frame = AffineFrame(np.zeros(dim), np.eye(dim), (dim, 1))
    normals = np.vstack([-np.eye(dim), np.eye(dim)])
    offsets = np.concatenate([np.zeros(dim), np.full(dim, high)])
    vertices = np.array(list(itertools.product([0.0, high], repeat=dim)))
    return Polytope.from_vertices(frame, normals, offsets, vertices)


def enumerate_vertices(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Vertices of {x : normals x <= offsets} by trying every basis."""
    dim = normals.shape[1]
    found = []
    for subset in itertools.combinations(range(len(offsets)), dim):
        rows = normals[list(subset)]
        if abs(np.linalg.det(rows)) < 1e-12:
            continue

        point = np.linalg.solve(rows, offsets[list(subset)])
        limit = 1e-9 * np.maximum(1.0, np.abs(offsets))
        if np.all(normals @ point - offsets <= limit):
            if not any(np.allclose(point, other, atol=1e-9) for other in found):
                found.append(point)

    return np.array(found)


def assert_same_points(actual: np.ndarray, expected: np.ndarray, atol: float = 1e-7):
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    assert actual.shape == expected.shape, (actual, expected)
    for point in expected:
        distances = np.abs(actual - point).max(axis=1)
        assert distances.min() <= atol, f"{point} missing from {actual}"


def kmeans_1d(values, k: int) -> float:
    """Optimal 1-D k-means objective by dynamic programming over sorted values."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    prefix = np.concatenate([[0.0], np.cumsum(x)])
    prefix_sq = np.concatenate([[0.0], np.cumsum(x * x)])

    def cost(start: int, stop: int) -> float:
        count = stop - start
        total = prefix[stop] - prefix[start]
        return prefix_sq[stop] - prefix_sq[start] - total * total / count

    best = np.full((k + 1, n + 1), np.inf)
    best[0, 0] = 0.0
    for clusters in range(1, k + 1):
        for stop in range(clusters, n + 1):
            best[clusters, stop] = min(
                best[clusters - 1, start] + cost(start, stop)
                for start in range(clusters - 1, stop)
            )

    return float(best[k, n])
