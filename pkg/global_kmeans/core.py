"""
Data model and objective functions of the k-means problem.

The k-means objective of an assignment Γ only depends on the image point
Z = 𝒳Γ, where 𝒳 is the data matrix with a row of ones appended. Column j of
Z stacks the coordinate sum of cluster j over its mass (point count), and the
objective becomes the concave function

    F(Z) = c0 - sum_j |zhat_j|^2 / n_j

which is what the solver minimizes over outer approximations of {𝒳Γ}.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, InfeasibleError

# Smallest cluster mass accepted by the concave objective and its gradient
MASS_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Data matrix with d rows (coordinates) and n columns (points)."""

    data: np.ndarray
    augmented: np.ndarray = field(init=False, repr=False)
    c0: float = field(init=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 2 or min(data.shape) < 1:
            raise DomainError(f"Expected a non-empty d x n matrix, got {data.shape}")

        if not np.all(np.isfinite(data)):
            raise DomainError("Point cloud contains non-finite values")

        augmented = np.vstack([data, np.ones((1, data.shape[1]))])
        data.setflags(write=False)
        augmented.setflags(write=False)

        object.__setattr__(self, "data", data)
        object.__setattr__(self, "augmented", augmented)
        object.__setattr__(self, "c0", float(np.einsum("ij,ij->", data, data)))

    @classmethod
    def from_points(cls, points: Union[Sequence[Sequence[float]], np.ndarray]):
        """Build from an n x d array (one point per row)."""
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]

        return cls(points.T)

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def points(self) -> np.ndarray:
        """n x d view of the data."""
        return self.data.T

    @property
    def total(self) -> np.ndarray:
        """Row sums of the augmented matrix (𝒳𝟙)."""
        return self.augmented.sum(axis=1)


@dataclass(frozen=True, eq=False)
class Assignment:
    """Cluster label per point; the n x k 0/1 matrix is only built on demand."""

    labels: np.ndarray
    k: int
    n_min: int = 1

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64).reshape(-1)
        if self.k < 1:
            raise DomainError(f"k must be positive, got {self.k}")

        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise DomainError(f"Labels must lie in [0, {self.k})")

        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, n_min: int = 1) -> "Assignment":
        matrix = np.asarray(matrix)
        if not np.all(matrix.sum(axis=1) == 1) or not np.isin(matrix, (0, 1)).all():
            raise DomainError("Each row of an assignment matrix needs exactly one 1")

        return cls(np.argmax(matrix, axis=1), matrix.shape[1], n_min)

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def matrix(self) -> np.ndarray:
        gamma = np.zeros((self.n, self.k), dtype=np.int64)
        gamma[np.arange(self.n), self.labels] = 1
        return gamma

    def is_valid(self) -> bool:
        return bool(np.all(self.counts >= self.n_min))

    def canonical(self) -> "Assignment":
        """Relabel clusters in order of first appearance."""
        _, first = np.unique(self.labels, return_index=True)
        order = self.labels[np.sort(first)]
        relabel = np.empty(self.k, dtype=np.int64)
        relabel[order] = np.arange(order.size)
        missing = np.setdiff1d(np.arange(self.k), order)
        relabel[missing] = np.arange(order.size, self.k)
        return Assignment(relabel[self.labels], self.k, self.n_min)


@dataclass(frozen=True, eq=False)
class ZMatrix:
    """Image point Z = 𝒳Γ; column j is (coordinate sum; mass) of cluster j."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 2:
            raise DomainError(f"Expected a (d+1) x k matrix, got {values.shape}")

        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_assignment(cls, cloud: PointCloud, gamma: Assignment) -> "ZMatrix":
        return cls(assignment_image(cloud, gamma))

    @property
    def k(self) -> int:
        return self.values.shape[1]

    @property
    def sums(self) -> np.ndarray:
        return self.values[:-1]

    @property
    def masses(self) -> np.ndarray:
        return self.values[-1]


@dataclass
class SolverConfig:
    """Inputs of the cutting-plane solver and its accelerator schedule."""

    k: int
    epsilon: float = 0.0
    rel_gap: float = 1e-4
    n_min: int = 1

    # Accelerators
    fixed_marginal: bool = True
    symmetry_breaking: bool = True
    centroid_box: bool = True
    integer_cuts: bool = True
    local_search: bool = True
    ls_gate: Optional[float] = 1.0  # least-squares cuts while gap > ls_gate
    tight_gate: Optional[float] = 0.01  # tight cuts while gap < tight_gate
    tight_alpha: float = 0.1
    tight_count: Optional[int] = None

    # Branching
    branch_vertex_limit: int = 500_000
    beta: float = 1e-6

    # Resource caps
    max_iterations: int = 100_000
    max_vertices: Optional[int] = None
    time_limit: Optional[float] = None

    threads: int = 1
    # The solver is deterministic; this only seeds the k-means++ baseline of a report
    rng_seed: int = 0

    def validate(self, n: int) -> None:
        if self.k < 1:
            raise DomainError(f"k must be positive, got {self.k}")

        if self.k > n:
            raise DomainError(f"k={self.k} exceeds the number of points n={n}")

        if self.n_min < 1:
            raise DomainError(f"n_min must be positive, got {self.n_min}")

        if self.k * self.n_min > n:
            raise InfeasibleError(
                f"k * n_min = {self.k * self.n_min} exceeds n = {n}"
            )

        if self.epsilon < 0 or self.rel_gap < 0:
            raise DomainError("Gap tolerances must be non-negative")

        if self.epsilon == 0 and self.rel_gap == 0:
            raise DomainError("One of epsilon and rel_gap must be positive")

        if self.branch_vertex_limit < 1:
            raise DomainError("branch_vertex_limit must be at least 1")

        if self.threads < 1:
            raise DomainError("threads must be at least 1")

    @property
    def tight_cut_count(self) -> int:
        return self.tight_count if self.tight_count is not None else 2 * self.k


# -----------------------------------------------------------------------------


def assignment_image(cloud: PointCloud, gamma: Assignment) -> np.ndarray:
    """Return 𝒳Γ as a (d+1) x k array without building Γ."""
    if gamma.n != cloud.n:
        raise DomainError(f"Assignment has {gamma.n} rows, cloud has {cloud.n} points")

    image = np.zeros((cloud.d + 1, gamma.k))
    for row in range(cloud.d + 1):
        image[row] = np.bincount(
            gamma.labels, weights=cloud.augmented[row], minlength=gamma.k
        )

    return image


def kmeans_objective(cloud: PointCloud, gamma: Assignment) -> float:
    """Sum of squared distances from each point to the mean of its cluster."""
    if gamma.n != cloud.n:
        raise DomainError(f"Assignment has {gamma.n} rows, cloud has {cloud.n} points")

    counts = gamma.counts
    if np.any(counts == 0):
        raise DomainError(f"Empty cluster in assignment: counts={counts.tolist()}")

    means = centroids(cloud, gamma)
    residual = cloud.data - means[:, gamma.labels]
    return float(np.einsum("ij,ij->", residual, residual))


def centroids(cloud: PointCloud, gamma: Assignment) -> np.ndarray:
    """Cluster means as a d x k matrix."""
    counts = gamma.counts
    if np.any(counts == 0):
        raise DomainError(f"Empty cluster in assignment: counts={counts.tolist()}")

    image = assignment_image(cloud, gamma)
    return image[:-1] / counts


def concave_values(cloud: PointCloud, zs: np.ndarray) -> np.ndarray:
    """F(Z) for a stack of (d+1) x k matrices (any leading shape)."""
    zs = np.asarray(zs, dtype=np.float64)
    masses = zs[..., -1, :]
    if np.any(masses < MASS_FLOOR):
        raise DomainError(f"Cluster mass below {MASS_FLOOR}: {masses.min()}")

    sums = zs[..., :-1, :]
    return cloud.c0 - np.sum(np.sum(sums * sums, axis=-2) / masses, axis=-1)


def concave_objective(cloud: PointCloud, z: Union[ZMatrix, np.ndarray]) -> float:
    """F(Z) = c0 - sum_j |zhat_j|^2 / n_j."""
    values = z.values if isinstance(z, ZMatrix) else np.asarray(z, dtype=np.float64)
    if values.shape[0] != cloud.d + 1:
        raise DomainError(f"Z has {values.shape[0]} rows, expected {cloud.d + 1}")

    return float(concave_values(cloud, values))


def gradient(cloud: PointCloud, z: Union[ZMatrix, np.ndarray]) -> np.ndarray:
    """Gradient of F at Z as a (d+1) x k matrix.

    Column j is (-2 zhat_j / n_j ; |zhat_j|^2 / n_j^2).
    """
    values = z.values if isinstance(z, ZMatrix) else np.asarray(z, dtype=np.float64)
    if values.shape[0] != cloud.d + 1:
        raise DomainError(f"Z has {values.shape[0]} rows, expected {cloud.d + 1}")

    masses = values[-1]
    if np.any(masses < MASS_FLOOR):
        raise DomainError(f"Cluster mass below {MASS_FLOOR}: {masses.min()}")

    sums = values[:-1]
    grad = np.empty_like(values)
    grad[:-1] = -2.0 * sums / masses
    grad[-1] = np.sum(sums * sums, axis=0) / (masses * masses)
    return grad
