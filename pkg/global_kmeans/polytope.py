"""
Outer approximation of {𝒳Γ : Γ in the relaxed assignment polytope}.

The polytope is kept in double description: half-spaces, vertices, the
incidence of vertices on half-spaces ("tight sets") and the vertex adjacency
graph. Everything is stored in reduced coordinates y of an affine frame

    Z = origin + basis @ y

so that the fixed-marginal equalities Z𝟙 = 𝒳𝟙 never have to be carried as
constraints. Cuts arrive in Z coordinates and are projected into the frame.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .core import PointCloud
from .errors import DegenerateError, DomainError, InfeasibleError
from .state import CutKind

TOL_FEAS = 1e-8
TOL_DEDUP = 1e-9
TOL_TIGHT = 1e-7

# Row chunk for pairwise incidence products
_CHUNK = 1024

_LOGGER = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class AffineFrame:
    """Affine parameterization Z = origin + basis @ y of a (d+1) x k space."""

    origin: np.ndarray
    basis: np.ndarray
    shape: Tuple[int, int]
    _pinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=np.float64).reshape(-1)
        basis = np.asarray(self.basis, dtype=np.float64).reshape(origin.size, -1)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_pinv", np.linalg.pinv(basis))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.origin.size

    def to_ambient(self, y: np.ndarray) -> np.ndarray:
        """Map reduced points (..., m) to flattened Z points (..., D)."""
        return self.origin + np.asarray(y) @ self.basis.T

    def to_reduced(self, z: np.ndarray) -> np.ndarray:
        """Map Z points (..., d+1, k) or (..., D) into reduced coordinates."""
        z = np.asarray(z, dtype=np.float64)
        flat = z
        if z.ndim >= 2 and z.shape[-2:] == self.shape:
            flat = z.reshape(z.shape[: z.ndim - 2] + (-1,))

        return (flat - self.origin) @ self._pinv.T

    def project(self, normal: np.ndarray, offset: float) -> Tuple[np.ndarray, float]:
        """Restrict <normal, Z> <= offset to the frame."""
        flat = np.asarray(normal, dtype=np.float64).reshape(-1)
        return self.basis.T @ flat, float(offset - flat @ self.origin)


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The constraint <normal, Z> <= offset, normal a (d+1) x k matrix."""

    normal: np.ndarray
    offset: float
    kind: CutKind = CutKind.GRADIENT

    def __post_init__(self):
        normal = np.array(self.normal, dtype=np.float64)
        if not (np.all(np.isfinite(normal)) and np.isfinite(self.offset)):
            raise DomainError("Half-space has non-finite entries")

        if not np.any(normal):
            raise DegenerateError("Half-space normal is zero")

        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    def value(self, z: np.ndarray) -> np.ndarray:
        """<normal, Z> - offset for one or a stack of Z matrices."""
        z = np.asarray(z, dtype=np.float64)
        return np.tensordot(z, self.normal, axes=self.normal.ndim) - self.offset

    def normalized(self) -> "HalfSpace":
        norm = float(np.linalg.norm(self.normal))
        return HalfSpace(self.normal / norm, self.offset / norm, self.kind)

    def contains(self, z: np.ndarray, tol: float = TOL_FEAS) -> np.ndarray:
        unit = self.normalized()
        return unit.value(z) <= tol * max(1.0, abs(unit.offset))


@dataclass
class BranchNode:
    polytope: "Polytope"
    lower: float
    depth: int = 0
    id: int = 0

    def __lt__(self, other: "BranchNode") -> bool:
        return (self.lower, self.id) < (other.lower, other.id)


# -----------------------------------------------------------------------------


class Polytope:
    """Bounded polytope in double description with incremental cuts."""

    def __init__(
        self,
        frame: AffineFrame,
        normals: np.ndarray,
        offsets: np.ndarray,
        kinds: Sequence[CutKind],
        vertices: np.ndarray,
        tight: np.ndarray,
        edges: np.ndarray,
    ):
        self.frame = frame
        self._normals = _rows(normals, frame.dim)
        self._offsets = np.asarray(offsets, dtype=np.float64).reshape(-1)
        self._kinds: List[CutKind] = list(kinds)
        self._count = self._offsets.size
        self.vertices = _rows(vertices, frame.dim)
        self._tight = np.asarray(tight, dtype=bool).reshape(self.vertices.shape[0], -1)
        self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.redundant_cuts = 0
        self.last_created = 0

    @classmethod
    def from_vertices(
        cls,
        frame: AffineFrame,
        normals: np.ndarray,
        offsets: np.ndarray,
        vertices: np.ndarray,
        kinds: Optional[Sequence[CutKind]] = None,
    ) -> "Polytope":
        """Build incidence and adjacency for a known complete vertex list."""
        normals = _rows(normals, frame.dim)
        offsets = np.asarray(offsets, dtype=np.float64).reshape(-1)
        norms = np.linalg.norm(normals, axis=1)
        if np.any(norms == 0):
            raise DegenerateError("Half-space normal is zero")

        normals = normals / norms[:, None]
        offsets = offsets / norms
        vertices = _rows(vertices, frame.dim)
        tight = _tight_sets(vertices, normals, offsets)
        if kinds is None:
            kinds = [CutKind.SIMPLEX] * offsets.size

        edges = _adjacent_pairs(tight, frame.dim)
        return cls(frame, normals, offsets, kinds, vertices, tight, edges)

    # -------------------------------------------------------------------------

    @property
    def normals(self) -> np.ndarray:
        return self._normals[: self._count]

    @property
    def offsets(self) -> np.ndarray:
        return self._offsets[: self._count]

    @property
    def kinds(self) -> List[CutKind]:
        return list(self._kinds)

    @property
    def tight(self) -> np.ndarray:
        return self._tight[:, : self._count]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_halfspaces(self) -> int:
        return self._count

    @property
    def effective_dim(self) -> int:
        return self.frame.dim

    @property
    def ambient_dim(self) -> int:
        return self.frame.ambient_dim

    def ambient_vertices(self) -> np.ndarray:
        """Vertices as a (V, d+1, k) stack of Z matrices."""
        return self.frame.to_ambient(self.vertices).reshape((-1,) + self.frame.shape)

    def copy(self) -> "Polytope":
        other = Polytope(
            self.frame,
            self.normals.copy(),
            self.offsets.copy(),
            self._kinds,
            self.vertices.copy(),
            self.tight.copy(),
            self.edges.copy(),
        )
        other.redundant_cuts = self.redundant_cuts
        return other

    def contains(self, z: np.ndarray, tol: float = TOL_FEAS) -> np.ndarray:
        """Membership of Z points (..., d+1, k) in the polytope."""
        z = np.asarray(z, dtype=np.float64)
        flat = z.reshape(z.shape[: z.ndim - 2] + (-1,))
        y = self.frame.to_reduced(flat)
        residual = np.linalg.norm(self.frame.to_ambient(y) - flat, axis=-1)
        scale = np.maximum(1.0, np.abs(flat).max(axis=-1))
        slack = y @ self.normals.T - self.offsets
        limit = tol * np.maximum(1.0, np.abs(self.offsets))
        return np.all(slack <= limit, axis=-1) & (residual <= tol * scale)

    # -------------------------------------------------------------------------

    def add_cut(self, halfspace: HalfSpace) -> bool:
        """Intersect with a half-space given in Z coordinates.

        Returns False (and leaves the polytope unchanged) when no vertex is cut.
        """
        normal, offset = self.frame.project(halfspace.normal, halfspace.offset)
        return self.add_reduced_cut(normal, offset, halfspace.kind)

    def add_reduced_cut(
        self, normal: np.ndarray, offset: float, kind: CutKind = CutKind.GRADIENT
    ) -> bool:
        normal = np.asarray(normal, dtype=np.float64).reshape(-1)
        self.last_created = 0
        norm = float(np.linalg.norm(normal))
        if norm <= 1e-12 * max(1.0, abs(offset)):
            # Constant on the frame: either always satisfied or empty
            if offset >= -TOL_FEAS * max(1.0, abs(offset)):
                self.redundant_cuts += 1
                return False

            raise InfeasibleError("Cut is violated on the whole affine frame")

        normal = normal / norm
        offset = offset / norm

        slack = self.vertices @ normal - offset
        tol = TOL_FEAS * max(1.0, abs(offset))
        outside = slack > tol
        if not np.any(outside):
            self.redundant_cuts += 1
            return False

        if np.all(outside):
            raise InfeasibleError("Cut removes every vertex of the polytope")

        on_plane = np.abs(slack) <= tol
        inside = ~outside & ~on_plane
        self._update(normal, offset, kind, slack, inside, on_plane, outside)
        return True

    def _update(
        self,
        normal: np.ndarray,
        offset: float,
        kind: CutKind,
        slack: np.ndarray,
        inside: np.ndarray,
        on_plane: np.ndarray,
        outside: np.ndarray,
    ) -> None:
        """Double description step: replace cut vertices by edge intersections."""
        edges = self.edges
        tight = self.tight

        # Edges from a strictly feasible vertex to a cut vertex
        crossing = (inside[edges[:, 0]] & outside[edges[:, 1]]) | (
            outside[edges[:, 0]] & inside[edges[:, 1]]
        )
        cross = edges[crossing].copy()
        flip = outside[cross[:, 0]]
        cross[flip] = cross[flip][:, ::-1]
        src, dst = cross[:, 0], cross[:, 1]

        t = slack[src] / (slack[src] - slack[dst])
        points = self.vertices[src] + t[:, None] * (
            self.vertices[dst] - self.vertices[src]
        )
        point_tight = (tight[src] & tight[dst]) | _tight_sets(
            points, self.normals, self.offsets
        )

        keep = ~outside
        n_keep = int(keep.sum())
        old_to_new = np.full(self.n_vertices, -1, dtype=np.int64)
        old_to_new[keep] = np.arange(n_keep)
        on_index = old_to_new[on_plane]

        # Merge intersection points that coincide with each other or with
        # vertices lying on the cutting plane
        target, survivors = _deduplicate(self.vertices[on_plane], points)
        n_new = survivors.size
        point_index = np.empty(points.shape[0], dtype=np.int64)
        point_index[survivors] = n_keep + np.arange(n_new)

        new_tight = np.zeros((n_keep + n_new, self._count + 1), dtype=bool)
        new_tight[:n_keep, :-1] = tight[keep]
        new_tight[n_keep:, :-1] = point_tight[survivors]
        new_tight[on_index, -1] = True
        new_tight[n_keep:, -1] = True

        for point, merged in target.items():
            if merged < 0:
                # Merged into the on-plane vertex number -(merged + 1)
                row = on_index[-(merged + 1)]
            else:
                row = point_index[merged]

            point_index[point] = row
            new_tight[row, :-1] |= point_tight[point]

        # Old edges survive unless they touch a cut vertex; edges between two
        # on-plane vertices are recomputed below
        both_kept = keep[edges[:, 0]] & keep[edges[:, 1]]
        both_on = on_plane[edges[:, 0]] & on_plane[edges[:, 1]]
        kept_edges = old_to_new[edges[both_kept & ~both_on]]
        cut_edges = np.column_stack([old_to_new[src], point_index])

        plane = np.concatenate([on_index, n_keep + np.arange(n_new)])
        local = _adjacent_pairs(new_tight[plane], self.frame.dim)
        plane_edges = plane[local]

        all_edges = np.vstack([kept_edges, cut_edges, plane_edges])
        all_edges = all_edges[all_edges[:, 0] != all_edges[:, 1]]
        all_edges.sort(axis=1)

        self.vertices = np.vstack([self.vertices[keep], points[survivors]])
        self._tight = new_tight
        self.edges = np.unique(all_edges, axis=0)
        self._normals = np.vstack([self.normals, normal])
        self._offsets = np.append(self.offsets, offset)
        self._kinds.append(kind)
        self._count += 1
        self.last_created = n_new

    # -------------------------------------------------------------------------

    def min_vertex(self, objective: Objective) -> Tuple[np.ndarray, float]:
        """Minimize a concave objective by scanning the vertices.

        The objective receives a (V, d+1, k) stack and returns V values.
        """
        if self.n_vertices == 0:
            raise InfeasibleError("Polytope has no vertices")

        stack = self.ambient_vertices()
        values = np.asarray(objective(stack))
        best = int(np.argmin(values))
        return stack[best], float(values[best])

    def split(self, beta: float) -> Tuple["Polytope", "Polytope"]:
        """Split along the principal direction of the vertex cloud.

        Children are {<v, y - mean> <= beta s} and {<v, y - mean> >= -beta s}
        with s the spread of <v, y> over the vertices.
        """
        if self.n_vertices < 2:
            raise DegenerateError("Cannot split a polytope with fewer than 2 vertices")

        mean = self.vertices.mean(axis=0)
        centered = self.vertices - mean
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        direction = vt[0]
        direction = direction * np.sign(direction[np.argmax(np.abs(direction))])

        projection = centered @ direction
        spread = float(projection.max() - projection.min())
        if spread <= TOL_DEDUP * max(1.0, float(np.abs(self.vertices).max())):
            raise DegenerateError("Vertex cloud has zero spread")

        center = float(direction @ mean)
        lower_child, upper_child = self.copy(), self.copy()
        lower_child.add_reduced_cut(direction, center + beta * spread, CutKind.BRANCH)
        upper_child.add_reduced_cut(
            -direction, -center + beta * spread, CutKind.BRANCH
        )
        return lower_child, upper_child

    def count_range(self) -> Tuple[np.ndarray, np.ndarray]:
        """Min and max of each cluster mass over the vertices."""
        masses = self.ambient_vertices()[:, -1, :]
        return masses.min(axis=0), masses.max(axis=0)

    def check_consistency(self, tol: float = TOL_FEAS) -> List[str]:
        """Describe every violated representation invariant (empty if none)."""
        problems: List[str] = []
        if self.n_vertices == 0:
            return ["no vertices"]

        slack = self.vertices @ self.normals.T - self.offsets
        limit = tol * np.maximum(1.0, np.abs(self.offsets))
        bad = np.argwhere(slack > limit)
        if bad.size:
            problems.append(f"{len(bad)} vertex/half-space violations")

        dim = self.effective_dim
        for index, row in enumerate(self.tight):
            if dim and np.linalg.matrix_rank(self.normals[row]) < dim:
                problems.append(f"vertex {index} has rank-deficient tight set")

        common = (self.tight[self.edges[:, 0]] & self.tight[self.edges[:, 1]]).sum(1)
        if np.any(common < dim - 1):
            problems.append("adjacent vertices share too few tight half-spaces")

        return problems

    def to_json(self) -> Dict[str, object]:
        return {
            "shape": list(self.frame.shape),
            "effective_dim": self.effective_dim,
            "frame": {
                "origin": self.frame.origin.tolist(),
                "basis": self.frame.basis.tolist(),
            },
            "halfspaces": [
                {"normal": normal.tolist(), "offset": float(offset), "kind": kind.value}
                for normal, offset, kind in zip(self.normals, self.offsets, self._kinds)
            ],
            "vertices": self.vertices.tolist(),
            "ambient_vertices": self.ambient_vertices().tolist(),
            "tight": [np.flatnonzero(row).tolist() for row in self.tight],
            "edges": self.edges.tolist(),
        }


# -----------------------------------------------------------------------------


def _rows(values, width: int) -> np.ndarray:
    """Float matrix with the given row width (width may be zero)."""
    values = np.asarray(values, dtype=np.float64)
    if width == 0:
        return values.reshape(values.shape[0] if values.ndim == 2 else 0, 0)

    return values.reshape(-1, width)


def _tight_sets(
    points: np.ndarray, normals: np.ndarray, offsets: np.ndarray
) -> np.ndarray:
    slack = points @ normals.T - offsets
    return np.abs(slack) <= TOL_TIGHT * np.maximum(1.0, np.abs(offsets))


def _adjacent_pairs(tight: np.ndarray, dim: int) -> np.ndarray:
    """Adjacent vertex pairs by the combinatorial test.

    Two vertices are adjacent iff they share at least dim - 1 tight
    half-spaces and no third vertex is tight on all of the shared ones.
    """
    count = tight.shape[0]
    if count < 2:
        return np.empty((0, 2), dtype=np.int64)

    incidence = tight.astype(np.float32)
    candidates = []
    for start in range(0, count, _CHUNK):
        shared = incidence[start : start + _CHUNK] @ incidence.T
        rows, cols = np.nonzero(shared >= dim - 1.5)
        rows += start
        upper = rows < cols
        candidates.append(np.column_stack([rows[upper], cols[upper]]))

    pairs = np.vstack(candidates)
    if pairs.size == 0:
        return pairs.astype(np.int64)

    adjacent = np.zeros(pairs.shape[0], dtype=bool)
    for start in range(0, pairs.shape[0], _CHUNK):
        block = pairs[start : start + _CHUNK]
        common = tight[block[:, 0]] & tight[block[:, 1]]
        size = common.sum(axis=1)
        covering = (common.astype(np.float32) @ incidence.T) >= size[:, None] - 0.5
        adjacent[start : start + _CHUNK] = covering.sum(axis=1) == 2

    return pairs[adjacent].astype(np.int64)


def _deduplicate(
    anchors: np.ndarray, points: np.ndarray
) -> Tuple[Dict[int, int], np.ndarray]:
    """Find intersection points within TOL_DEDUP of an anchor or earlier point.

    Returns (merged point -> target, surviving point indices). A negative
    target -(a + 1) refers to anchor a, a non-negative one to another point.
    """
    if points.shape[0] == 0:
        return {}, np.arange(0)

    stacked = np.vstack([anchors, points])
    radius = TOL_DEDUP * max(1.0, float(np.abs(stacked).max()))
    pairs = cKDTree(stacked).query_pairs(radius, output_type="ndarray")

    n_anchors = anchors.shape[0]
    target: Dict[int, int] = {}
    for first, second in sorted(map(tuple, pairs)):
        if second < n_anchors or (second - n_anchors) in target:
            continue

        root = first
        if root >= n_anchors and (root - n_anchors) in target:
            merged = target[root - n_anchors]
            root = merged + n_anchors if merged >= 0 else -(merged + 1)

        target[second - n_anchors] = (
            root - n_anchors if root >= n_anchors else -(root + 1)
        )

    survivors = np.array(
        [index for index in range(points.shape[0]) if index not in target],
        dtype=np.int64,
    )
    return target, survivors


# -----------------------------------------------------------------------------


def elementwise_extreme(
    cloud: PointCloud, k: int, n_min: int, i: int, j: int, direction: str = "min"
) -> float:
    """Exact min (or max) of (𝒳Γ)_ij over the relaxed assignment polytope.

    Only column j of Γ matters: it holds between n_min and n - (k-1) n_min
    points, so the extreme takes the n_min most extreme values of row i and
    then every further value that improves the objective.
    """
    if not 0 <= i <= cloud.d or not 0 <= j < k:
        raise IndexError(f"Element ({i}, {j}) outside a {cloud.d + 1} x {k} matrix")

    if direction not in ("min", "max"):
        raise ValueError(f"direction must be 'min' or 'max', got {direction}")

    values = np.sort(cloud.augmented[i])
    if direction == "max":
        values = -values[::-1]

    if k == 1:
        best = values.sum()
    else:
        capacity = cloud.n - (k - 1) * n_min
        extra = values[n_min:capacity]
        best = values[:n_min].sum() + extra[extra < 0].sum()

    return float(best if direction == "min" else -best)


def bounding_simplex(
    cloud: PointCloud, k: int, n_min: int
) -> Tuple[np.ndarray, float]:
    """Element lower bounds L and the diagonal upper bound U."""
    if k < 1 or cloud.n < k * n_min:
        raise InfeasibleError(
            f"No assignment of n={cloud.n} points with k={k}, n_min={n_min}"
        )

    lower = np.empty((cloud.d + 1, k))
    for row in range(cloud.d + 1):
        # All columns share the same bound
        lower[row] = elementwise_extreme(cloud, k, n_min, row, 0, "min")

    # <𝟙, 𝒳Γ> equals the sum of 𝒳𝟙 for every Γ with unit row sums
    upper = float(cloud.total.sum())
    return lower, upper


def init_simplex(
    cloud: PointCloud, k: int, n_min: int = 1, fixed_marginal: bool = True
) -> Polytope:
    """Initial outer approximation {L <= Z, <𝟙, Z> <= U}.

    With fixed_marginal the polytope lives in the affine subspace Z𝟙 = 𝒳𝟙,
    where it becomes a product of one simplex per non-constant row.
    """
    lower, upper = bounding_simplex(cloud, k, n_min)
    shape = (cloud.d + 1, k)
    ambient = shape[0] * shape[1]

    if fixed_marginal:
        total = cloud.total
        row_slack = total - lower.sum(axis=1)
        origin = lower.copy()
        origin[:, k - 1] = total - lower[:, : k - 1].sum(axis=1)

        columns: List[np.ndarray] = []
        blocks: List[Tuple[List[int], float]] = []
        scale = np.abs(cloud.augmented).sum(axis=1)
        for row in range(shape[0]):
            if k == 1 or row_slack[row] <= TOL_DEDUP * max(1.0, scale[row]):
                _LOGGER.debug("Row %s is fixed by the marginal constraint", row)
                continue

            block = []
            for col in range(k - 1):
                column = np.zeros(shape)
                column[row, col] = 1.0
                column[row, k - 1] = -1.0
                block.append(len(columns))
                columns.append(column.reshape(-1))

            blocks.append((block, float(row_slack[row])))

        basis = np.column_stack(columns) if columns else np.zeros((ambient, 0))
        frame = AffineFrame(origin.reshape(-1), basis, shape)
    else:
        frame = AffineFrame(lower.reshape(-1), np.eye(ambient), shape)
        blocks = [(list(range(ambient)), upper - float(lower.sum()))]

    return _simplex_product(frame, blocks)


def _simplex_product(
    frame: AffineFrame, blocks: Sequence[Tuple[List[int], float]]
) -> Polytope:
    """{y >= 0, sum of y over each block <= block slack} with all its vertices."""
    dim = frame.dim
    normals = [-row for row in np.eye(dim)]
    offsets = [0.0] * dim
    options = []
    for block, slack in blocks:
        normal = np.zeros(dim)
        normal[block] = 1.0
        normals.append(normal)
        offsets.append(slack)

        choices = [np.zeros(dim)]
        for coord in block:
            vertex = np.zeros(dim)
            vertex[coord] = slack
            choices.append(vertex)

        options.append(choices)

    # product() of no blocks yields the single origin vertex
    vertices = np.array(
        [sum(combo, np.zeros(dim)) for combo in itertools.product(*options)]
    )

    return Polytope.from_vertices(
        frame,
        _rows(normals, dim),
        np.array(offsets),
        vertices,
    )


# -----------------------------------------------------------------------------


def add_cut(polytope: Polytope, halfspace: HalfSpace) -> Polytope:
    """Functional form of Polytope.add_cut (mutates and returns the polytope)."""
    polytope.add_cut(halfspace)
    return polytope


def min_vertex(polytope: Polytope, objective: Objective) -> Tuple[np.ndarray, float]:
    return polytope.min_vertex(objective)


def branch(
    polytope: Polytope,
    beta: float,
    parent: Optional[BranchNode] = None,
    ids: Optional[Iterator[int]] = None,
) -> Tuple[BranchNode, BranchNode]:
    """Split a polytope into two overlapping child nodes."""
    ids = ids if ids is not None else itertools.count(1)
    lower = parent.lower if parent is not None else -np.inf
    depth = parent.depth + 1 if parent is not None else 1
    first, second = polytope.split(beta)
    return (
        BranchNode(first, lower, depth, next(ids)),
        BranchNode(second, lower, depth, next(ids)),
    )


def integer_prune(polytope: Polytope) -> List[HalfSpace]:
    """Integer bounds on the cluster masses spanned by the vertices.

    Raises InfeasibleError when some mass range contains no integer.
    """
    low, high = polytope.count_range()
    rows, k = polytope.frame.shape
    cuts: List[HalfSpace] = []
    for col in range(k):
        tol = TOL_DEDUP * max(1.0, abs(high[col]))
        lo_int = np.ceil(low[col] - tol)
        hi_int = np.floor(high[col] + tol)
        if lo_int > hi_int:
            raise InfeasibleError(
                f"Cluster {col} mass range [{low[col]}, {high[col]}] holds no integer"
            )

        normal = np.zeros((rows, k))
        normal[-1, col] = 1.0
        if lo_int > low[col] + tol:
            cuts.append(HalfSpace(-normal, -lo_int, CutKind.INTEGER))

        if hi_int < high[col] - tol:
            cuts.append(HalfSpace(normal, hi_int, CutKind.INTEGER))

    return cuts
