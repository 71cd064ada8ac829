"""Local k-means baselines, the brute-force oracle and the model problem."""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from .core import Assignment, PointCloud, kmeans_objective
from .errors import DomainError, InfeasibleError, InstanceTooLargeError

# Three isotropic Gaussians; with sigma = 1 they overlap heavily
MODEL_CENTERS = np.array([[0.0, 0.0], [0.0, 2.0], [2.0, 0.0]])

BRUTE_FORCE_LIMIT = 10**7
_BRUTE_FORCE_CHUNK = 1 << 15

_LOGGER = logging.getLogger(__name__)

Seed = Union[None, int, np.random.Generator]


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    cloud: PointCloud
    labels: Optional[np.ndarray] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
            if labels.size != self.cloud.n:
                raise DomainError(
                    f"Got {labels.size} labels for {self.cloud.n} points"
                )

            object.__setattr__(self, "labels", labels)


def lloyd(
    cloud: PointCloud,
    initial_centroids: np.ndarray,
    max_iter: int = 300,
    history: Optional[List[float]] = None,
) -> Tuple[Assignment, float]:
    """Alternate nearest-centroid assignment and mean updates.

    initial_centroids is k x d. A cluster that runs empty takes the point
    farthest from its own centroid.
    """
    centroids = np.array(initial_centroids, dtype=np.float64)
    if centroids.ndim != 2 or centroids.shape[1] != cloud.d:
        raise DomainError(f"Expected k x {cloud.d} centroids, got {centroids.shape}")

    if not np.all(np.isfinite(centroids)):
        raise DomainError("Centroids contain non-finite values")

    k = centroids.shape[0]
    if k > cloud.n:
        raise DomainError(f"k={k} exceeds the number of points n={cloud.n}")

    points = cloud.points
    labels: Optional[np.ndarray] = None
    for _ in range(max_iter):
        distances = cdist(points, centroids, "sqeuclidean")
        new_labels = _repair_empty(np.argmin(distances, axis=1), distances, k)
        if labels is not None and np.array_equal(labels, new_labels):
            break

        labels = new_labels
        gamma = Assignment(labels, k)
        centroids = np.stack([points[labels == j].mean(axis=0) for j in range(k)])
        if history is not None:
            history.append(kmeans_objective(cloud, gamma))

    assert labels is not None, "max_iter must be positive"
    gamma = Assignment(labels, k)
    return gamma, kmeans_objective(cloud, gamma)


def _repair_empty(labels: np.ndarray, distances: np.ndarray, k: int) -> np.ndarray:
    labels = labels.copy()
    own = distances[np.arange(labels.size), labels]
    for cluster in range(k):
        counts = np.bincount(labels, minlength=k)
        if counts[cluster] > 0:
            continue

        movable = counts[labels] > 1
        farthest = int(np.argmax(np.where(movable, own, -np.inf)))
        labels[farthest] = cluster
        own[farthest] = distances[farthest, cluster]

    return labels


def kmeanspp_seed(cloud: PointCloud, k: int, rng: Seed = None) -> np.ndarray:
    """k-means++ seeding; returns k x d centroids drawn from the points."""
    if not 1 <= k <= cloud.n:
        raise DomainError(f"Cannot seed k={k} centroids from n={cloud.n} points")

    rng = np.random.default_rng(rng)
    points = cloud.points
    chosen = [int(rng.integers(cloud.n))]
    dist_sq = cdist(points, points[chosen], "sqeuclidean")[:, 0]

    for _ in range(1, k):
        total = dist_sq.sum()
        if total > 0:
            index = int(rng.choice(cloud.n, p=dist_sq / total))
        else:
            # Every point coincides with a centroid
            remaining = np.setdiff1d(np.arange(cloud.n), chosen)
            index = int(rng.choice(remaining))

        chosen.append(index)
        dist_sq = np.minimum(
            dist_sq, cdist(points, points[[index]], "sqeuclidean")[:, 0]
        )

    return points[chosen].copy()


def kmeans_restarts(
    cloud: PointCloud, k: int, restarts: int, rng: Seed = None
) -> Tuple[Assignment, List[float]]:
    """Best assignment and all objectives of k-means++ seeded Lloyd runs."""
    if restarts < 1:
        raise DomainError(f"restarts must be positive, got {restarts}")

    rng = np.random.default_rng(rng)
    best: Optional[Assignment] = None
    objectives: List[float] = []
    for _ in range(restarts):
        gamma, value = lloyd(cloud, kmeanspp_seed(cloud, k, rng))
        if not objectives or value < min(objectives):
            best = gamma

        objectives.append(value)

    assert best is not None
    return best, objectives


def brute_force(
    cloud: PointCloud, k: int, n_min: int = 1, limit: int = BRUTE_FORCE_LIMIT
) -> Tuple[Assignment, float]:
    """Exact optimum by enumerating label vectors with label[0] = 0."""
    n = cloud.n
    if k < 1 or n_min < 1:
        raise DomainError(f"Invalid k={k}, n_min={n_min}")

    if k * n_min > n:
        raise InfeasibleError(f"k * n_min = {k * n_min} exceeds n = {n}")

    total = k ** (n - 1)
    if total > limit:
        raise InstanceTooLargeError(
            f"Brute force over {total} label vectors exceeds the limit {limit}"
        )

    augmented = cloud.augmented
    powers = k ** np.arange(n - 2, -1, -1)
    best_code, best_value = -1, np.inf
    for start in range(0, total, _BRUTE_FORCE_CHUNK):
        codes = np.arange(start, min(start + _BRUTE_FORCE_CHUNK, total))
        labels = np.zeros((codes.size, n), dtype=np.int64)
        labels[:, 1:] = (codes[:, None] // powers) % k

        onehot = (labels[:, :, None] == np.arange(k)).astype(np.float64)
        image = np.einsum("rn,bnk->brk", augmented, onehot)
        counts = image[:, -1, :]
        valid = np.all(counts >= n_min, axis=1)
        if not np.any(valid):
            continue

        sums = image[:, :-1, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            spread = np.sum(np.sum(sums * sums, axis=1) / counts, axis=1)

        values = np.where(valid, cloud.c0 - spread, np.inf)
        index = int(np.argmin(values))
        if values[index] < best_value:
            best_code, best_value = int(codes[index]), float(values[index])

    labels = np.zeros(n, dtype=np.int64)
    labels[1:] = (best_code // powers) % k
    gamma = Assignment(labels, k, n_min).canonical()
    return gamma, kmeans_objective(cloud, gamma)


def model_problem(
    sigma: float,
    n_per_cluster: Union[int, Sequence[int]],
    rng: Seed = None,
) -> LabeledDataset:
    """Points from N((0,0), σ), N((0,2), σ) and N((2,0), σ), labeled by source."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")

    if isinstance(n_per_cluster, int):
        sizes = [n_per_cluster] * len(MODEL_CENTERS)
    else:
        sizes = list(n_per_cluster)

    if len(sizes) != len(MODEL_CENTERS) or min(sizes) < 0 or sum(sizes) < 1:
        raise DomainError(f"Invalid cluster sizes: {sizes}")

    seed = rng if isinstance(rng, int) else None
    rng = np.random.default_rng(rng)
    labels = np.repeat(np.arange(len(MODEL_CENTERS)), sizes)
    points = MODEL_CENTERS[labels] + sigma * rng.standard_normal((labels.size, 2))
    _LOGGER.debug("Generated model problem: sigma=%s, sizes=%s", sigma, sizes)
    return LabeledDataset(PointCloud.from_points(points), labels, seed)
