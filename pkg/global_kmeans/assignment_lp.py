"""
Linear and projection subproblems over the relaxed assignment polytope

    {Γ >= 0 : Γ𝟙 = 𝟙, Γᵀ𝟙 >= n_min 𝟙}.

Every linear objective <A, 𝒳Γ> equals <𝒳ᵀA, Γ>, so cut depths, local search
and the projection oracle all reduce to one transportation problem.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment, linprog

from .core import (
    Assignment,
    PointCloud,
    ZMatrix,
    assignment_image,
    gradient,
    kmeans_objective,
)
from .errors import DegenerateError, DomainError, InfeasibleError
from .polytope import HalfSpace
from .state import CutKind

FW_MAX_ITERATIONS = 500

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """n x k matrix W; W_ij is the cost of putting point i in cluster j."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.float64)
        if entries.ndim != 2 or min(entries.shape) < 1:
            raise DomainError(f"Expected an n x k cost matrix, got {entries.shape}")

        if not np.all(np.isfinite(entries)):
            raise DomainError("Cost matrix has non-finite entries")

        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_normal(cls, cloud: PointCloud, normal: np.ndarray) -> "CostMatrix":
        """W = 𝒳ᵀA, so that <A, 𝒳Γ> = <W, Γ>."""
        return cls(cloud.augmented.T @ np.asarray(normal, dtype=np.float64))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def k(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True, eq=False)
class LPBasis:
    """Basis of the standard-form LP at an integral vertex.

    Variables are vec(Γ) (index j * n + i) followed by one surplus per
    cluster (index n * k + j). Rows are Γ𝟙 = 𝟙 and Γᵀ𝟙 - s = n_min 𝟙.
    """

    labels: np.ndarray
    k: int
    n_min: int
    basic: np.ndarray = field(init=False)
    nonbasic: np.ndarray = field(init=False)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        n = labels.size
        basic = np.concatenate(
            [labels * n + np.arange(n), n * self.k + np.arange(self.k)]
        )
        basic.sort()
        nonbasic = np.setdiff1d(np.arange(n * self.k + self.k), basic)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "basic", basic)
        object.__setattr__(self, "nonbasic", nonbasic)

    @classmethod
    def from_assignment(cls, gamma: Assignment) -> "LPBasis":
        return cls(gamma.labels, gamma.k, gamma.n_min)

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def tight(self) -> np.ndarray:
        """Clusters holding exactly n_min points."""
        return np.bincount(self.labels, minlength=self.k) == self.n_min

    def matrix(self) -> np.ndarray:
        """Dense basis matrix (columns of the constraint matrix in `basic`)."""
        return standard_form(self.n, self.k)[:, self.basic]


def standard_form(n: int, k: int) -> np.ndarray:
    """Constraint matrix [𝟙ᵀ⊗I, 0; I⊗𝟙ᵀ, -I] for vec(Γ) and the surpluses."""
    top = np.hstack([np.kron(np.ones((1, k)), np.eye(n)), np.zeros((n, k))])
    bottom = np.hstack([np.kron(np.eye(k), np.ones((1, n))), -np.eye(k)])
    return np.vstack([top, bottom])


# -----------------------------------------------------------------------------


def linear_min(
    cost: Union[CostMatrix, np.ndarray], n_min: int = 1
) -> Tuple[Assignment, float, LPBasis]:
    """Integral minimizer of <W, Γ> over the relaxed assignment polytope.

    Every cluster first takes n_min points chosen by a rectangular
    assignment on the regrets W_ij - min_l W_il; the remaining points go to
    their cheapest cluster (lowest index on ties). Seats that can change
    hands at equal cost go to the lowest point index, then the lowest
    cluster index.
    """
    if not isinstance(cost, CostMatrix):
        cost = CostMatrix(cost)

    weights = cost.entries
    n, k = weights.shape
    if n_min < 1 or n < k * n_min:
        raise InfeasibleError(
            f"No assignment of n={n} points with k={k}, n_min={n_min}"
        )

    cheapest = np.argmin(weights, axis=1)
    regret = weights - weights[np.arange(n), cheapest][:, None]

    # Widened column c is a seat of cluster c // n_min
    rows, seats = linear_sum_assignment(np.repeat(regret, n_min, axis=1))
    seated = np.full(n, -1, dtype=np.int64)
    seated[rows] = seats // n_min
    _settle_ties(regret, seated)

    labels = np.where(seated >= 0, seated, cheapest)
    gamma = Assignment(labels, k, n_min)
    value = float(weights[np.arange(n), labels].sum())
    return gamma, value, LPBasis.from_assignment(gamma)


def _settle_ties(regret: np.ndarray, seated: np.ndarray) -> None:
    """Move seats toward low point indices through equal-cost exchanges.

    seated[i] is the cluster whose quota point i fills, or -1. A seat passes
    to a free lower-index point with the same regret, and two seated points
    trade clusters when the lower index gets the lower cluster at equal
    cost. Every move lowers the seated index sum or keeps it and raises
    sum(i * seated[i]), so the loop ends.
    """
    changed = True
    while changed:
        changed = False
        for point in np.flatnonzero(seated >= 0)[::-1]:
            col = seated[point]
            lower = seated[:point]
            same = regret[:point, col] == regret[point, col]
            free = np.flatnonzero((lower < 0) & same)
            if free.size:
                seated[free[0]] = col
                seated[point] = -1
                changed = True
                continue

            for other in np.flatnonzero(lower > col):
                other_col = seated[other]
                kept = regret[other, other_col] + regret[point, col]
                traded = regret[other, col] + regret[point, other_col]
                if traded == kept:
                    seated[other], seated[point] = col, other_col
                    changed = True
                    break


def cut_from_gradient(
    cloud: PointCloud,
    grad: np.ndarray,
    n_min: int = 1,
    kind: CutKind = CutKind.GRADIENT,
) -> Tuple[HalfSpace, Assignment]:
    """Supporting cut <grad, Z> >= b with b = min over Γ of <grad, 𝒳Γ>.

    Stored as <-grad, Z> <= -b. Raises DegenerateError for a zero gradient.
    """
    grad = np.asarray(grad, dtype=np.float64)
    if not np.all(np.isfinite(grad)):
        raise DomainError("Gradient has non-finite entries")

    if not np.any(grad):
        raise DegenerateError("Gradient is zero, no cut")

    gamma, value, _ = linear_min(CostMatrix.from_normal(cloud, grad), n_min)
    return HalfSpace(-grad, -value, kind), gamma


def local_search(
    cloud: PointCloud,
    gamma0: Assignment,
    n_min: int = 1,
    history: Optional[List[float]] = None,
) -> Assignment:
    """Follow Γ <- argmin <𝒳ᵀ∇F(𝒳Γ), Γ> while the k-means objective drops.

    Objective values along the path are appended to `history` if given.
    """
    current = gamma0
    objective = kmeans_objective(cloud, current)
    if history is not None:
        history.append(objective)

    for _ in range(cloud.n * gamma0.k):
        grad = gradient(cloud, assignment_image(cloud, current))
        candidate, _, _ = linear_min(CostMatrix.from_normal(cloud, grad), n_min)
        if np.array_equal(candidate.labels, current.labels):
            break

        value = kmeans_objective(cloud, candidate)
        if value >= objective - 1e-12 * max(1.0, abs(objective)):
            break

        current, objective = candidate, value
        if history is not None:
            history.append(objective)

    _LOGGER.debug("Local search finished at %s", objective)
    return current


def ls_project(
    cloud: PointCloud,
    z_target: Union[ZMatrix, np.ndarray],
    n_min: int = 1,
    tol: Optional[float] = None,
    max_iterations: int = FW_MAX_ITERATIONS,
) -> Tuple[ZMatrix, Assignment, Optional[HalfSpace]]:
    """Project z_target onto conv{𝒳Γ} by conditional gradient.

    When the target is farther than tol from the hull, the returned half-space
    has normal z_target - ẑ and the exact support value of the hull in that
    direction as offset, and the assignment is the supporting vertex.
    Otherwise the last oracle vertex is returned with no cut.
    """
    target = (
        z_target.values
        if isinstance(z_target, ZMatrix)
        else np.asarray(z_target, dtype=np.float64)
    )
    if not np.all(np.isfinite(target)):
        raise DomainError("Projection target has non-finite entries")

    if tol is None:
        tol = max(1e-6 * float(np.linalg.norm(target)), 1e-12)

    def oracle(direction: np.ndarray) -> Tuple[Assignment, np.ndarray]:
        gamma, _, _ = linear_min(CostMatrix.from_normal(cloud, direction), n_min)
        return gamma, assignment_image(cloud, gamma)

    vertex_gamma, z = oracle(-target)
    iteration = 0
    for iteration in range(max_iterations):
        residual = z - target
        vertex_gamma, vertex = oracle(residual)
        step = z - vertex
        duality_gap = float(np.vdot(residual, step))
        if duality_gap <= tol * max(1.0, float(np.linalg.norm(residual))):
            break

        length = float(np.clip(duality_gap / np.vdot(step, step), 0.0, 1.0))
        z = z - length * step
    else:
        _LOGGER.debug("Projection stopped after %s iterations", max_iterations)

    normal = target - z
    distance = float(np.linalg.norm(normal))
    if distance <= tol:
        return ZMatrix(z), vertex_gamma, None

    support, _, _ = linear_min(CostMatrix.from_normal(cloud, -normal), n_min)
    offset = float(np.vdot(normal, assignment_image(cloud, support)))
    if float(np.vdot(normal, target)) <= offset + tol * distance:
        return ZMatrix(z), support, None

    _LOGGER.debug("Projection distance %s after %s iterations", distance, iteration)
    return ZMatrix(z), support, HalfSpace(normal, offset, CutKind.LEAST_SQUARES)


def tight_cuts(
    cloud: PointCloud,
    basis: LPBasis,
    normal: np.ndarray,
    alpha: float = 0.1,
    count: Optional[int] = None,
) -> List[np.ndarray]:
    """Perturbed normals A + ∂ for which the basis assignment stays optimal.

    Each ∂ minimizes the total reduced cost of the nonbasic assignment
    variables subject to their non-negativity, |∂|∞ <= |A|∞ / 2 and
    <∂, ∂_prev> <= alpha |A|² for the perturbations found before it.
    """
    grad = np.asarray(normal, dtype=np.float64)
    rows, k = grad.shape
    count = 2 * k if count is None else count
    if k < 2 or count < 1 or not np.any(grad):
        return []

    data = cloud.augmented
    n = basis.n
    labels = basis.labels
    dim = rows * k

    # One reduced cost per (point, other cluster) pair
    point, other = np.nonzero(np.arange(k)[None, :] != labels[:, None])
    own = labels[point]
    n_costs = point.size

    weights = data.T @ grad
    base = weights[point, other] - weights[point, own]

    # d s / d ∂[r, l]: +𝒳[r, i] at l = j, -𝒳[r, i] at l = c(i)
    coord = np.repeat(np.arange(rows), n_costs)
    values = np.concatenate([data[:, point].ravel(), -data[:, point].ravel()])
    row_index = np.tile(np.arange(n_costs), 2 * rows)
    col_index = np.concatenate(
        [coord * k + np.tile(other, rows), coord * k + np.tile(own, rows)]
    )
    sensitivity = sparse.csr_matrix(
        (values, (row_index, col_index)), shape=(n_costs, dim)
    )

    # Duals of the size constraints: d s / d v = +1 at c(i), -1 at j
    duals = sparse.csr_matrix(
        (
            np.concatenate([np.ones(n_costs), -np.ones(n_costs)]),
            (np.tile(np.arange(n_costs), 2), np.concatenate([own, other])),
        ),
        shape=(n_costs, k),
    )

    operator = sparse.hstack([sensitivity, duals]).tocsr()
    objective = np.asarray(operator.sum(axis=0)).ravel()

    radius = 0.5 * float(np.abs(grad).max())
    bounds = [(-radius, radius)] * dim + [
        (0.0, None) if is_tight else (0.0, 0.0) for is_tight in basis.tight
    ]
    budget = alpha * float(np.vdot(grad, grad))

    found: List[np.ndarray] = []
    previous: List[np.ndarray] = []
    for _ in range(count):
        a_ub = -operator
        b_ub = base
        if previous:
            diversity = np.hstack([np.array(previous), np.zeros((len(previous), k))])
            a_ub = sparse.vstack([a_ub, sparse.csr_matrix(diversity)])
            b_ub = np.concatenate([base, np.full(len(previous), budget)])

        result = linprog(
            objective, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs"
        )
        if result.status != 0:
            _LOGGER.warning("Tight cut LP failed: %s", result.message)
            break

        delta = result.x[:dim]
        if np.linalg.norm(delta) <= 1e-9 * np.linalg.norm(grad):
            break

        previous.append(delta)
        found.append(grad + delta.reshape(rows, k))

    _LOGGER.debug("Generated %s tight normal(s) for n=%s", len(found), n)
    return found
