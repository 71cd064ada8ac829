"""
Cutting-plane driver with spatial branching.

Each step takes the open node with the worst lower bound, minimizes the
concave objective over the node's vertices (a valid lower bound for the
node), cuts that vertex off with the supporting gradient cut and turns the
cut's minimizing assignment into an upper bound.
"""
import heapq
import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .accelerators import Schedule, centroid_box_cuts, schedule, symmetry_cuts
from .assignment_lp import (
    LPBasis,
    cut_from_gradient,
    local_search,
    ls_project,
    tight_cuts,
)
from .core import (
    Assignment,
    PointCloud,
    SolverConfig,
    assignment_image,
    concave_values,
    gradient,
    kmeans_objective,
)
from .errors import DegenerateError, InfeasibleError
from .polytope import (
    BranchNode,
    HalfSpace,
    Polytope,
    branch,
    init_simplex,
    integer_prune,
)
from .state import (
    CutKind,
    SearchState,
    SolveResult,
    SolveStatus,
    SolveTrace,
    TraceRecord,
    relative_gap,
)

__all__ = [
    "centroid_box_cuts",
    "schedule",
    "solve",
    "symmetry_cuts",
]

# Separation below this (relative) means the vertex already lies in the hull
SEPARATION_TOL = 1e-12

_LOGGER = logging.getLogger(__name__)


@dataclass
class NodeOutcome:
    """What one step did to a node; merged into the search state in id order."""

    node: BranchNode
    lower: float
    status: str = "open"  # open, pruned, converged, infeasible, branched
    candidates: List[Tuple[Assignment, float]] = field(default_factory=list)
    cuts: List[Tuple[CutKind, int, int]] = field(default_factory=list)
    children: List[BranchNode] = field(default_factory=list)


class _NodeWorker:
    """Runs single node steps; holds only read-only problem data."""

    def __init__(self, cloud: PointCloud, config: SolverConfig):
        self.cloud = cloud
        self.config = config

    def objective(self, zs: np.ndarray) -> np.ndarray:
        return concave_values(self.cloud, zs)

    def step(self, node: BranchNode, upper: float) -> NodeOutcome:
        cloud, config = self.cloud, self.config
        polytope = node.polytope

        vertex, value = polytope.min_vertex(self.objective)
        outcome = NodeOutcome(node, max(node.lower, value, 0.0))
        if outcome.lower >= upper:
            outcome.status = "pruned"
            return outcome

        grad = gradient(cloud, vertex)
        try:
            cut, gamma = cut_from_gradient(cloud, grad, config.n_min)
        except DegenerateError:
            outcome.status = "converged"
            return outcome

        self._candidate(outcome, gamma)
        improved = gamma
        if config.local_search:
            improved = local_search(cloud, gamma, config.n_min)
            self._candidate(outcome, improved)

        separation = float(cut.value(vertex))
        scale = max(1.0, abs(cut.offset))
        try:
            if separation <= SEPARATION_TOL * scale or not self._add(
                outcome, cut
            ):
                outcome.status = "converged"
                return outcome

            best = min([upper] + [found for _, found in outcome.candidates])
            active = schedule(config, relative_gap(best, outcome.lower))
            self._accelerate(outcome, vertex, grad, gamma, improved, active)

            if config.integer_cuts:
                for halfspace in integer_prune(polytope):
                    self._add(outcome, halfspace)
        except InfeasibleError:
            outcome.status = "infeasible"
            return outcome

        if polytope.n_vertices > config.branch_vertex_limit:
            try:
                outcome.children = list(branch(polytope, config.beta, node))
                for child in outcome.children:
                    child.lower = outcome.lower

                outcome.status = "branched"
            except DegenerateError as err:
                _LOGGER.warning("Not branching node %s: %s", node.id, err)

        return outcome

    def _accelerate(
        self,
        outcome: NodeOutcome,
        vertex: np.ndarray,
        grad: np.ndarray,
        gamma: Assignment,
        improved: Assignment,
        active: Schedule,
    ) -> None:
        cloud, config = self.cloud, self.config

        if active.least_squares:
            _, support, halfspace = ls_project(cloud, vertex, config.n_min)
            self._candidate(outcome, support)
            if halfspace is not None:
                self._add(outcome, halfspace)

        if not active.tight:
            return

        anchors = [(grad, gamma)]
        if not np.array_equal(improved.labels, gamma.labels):
            # The local optimum is its own linear minimizer
            local_grad = gradient(cloud, assignment_image(cloud, improved))
            halfspace, _ = cut_from_gradient(cloud, local_grad, config.n_min)
            self._add(outcome, halfspace)
            anchors.append((local_grad, improved))

        for normal, anchor in anchors:
            for tight_normal in tight_cuts(
                cloud,
                LPBasis.from_assignment(anchor),
                normal,
                config.tight_alpha,
                config.tight_cut_count,
            ):
                halfspace, _ = cut_from_gradient(
                    cloud, tight_normal, config.n_min, CutKind.TIGHT
                )
                self._add(outcome, halfspace)

    def _candidate(self, outcome: NodeOutcome, gamma: Assignment) -> None:
        outcome.candidates.append((gamma, kmeans_objective(self.cloud, gamma)))

    def _add(self, outcome: NodeOutcome, halfspace: HalfSpace) -> bool:
        polytope = outcome.node.polytope
        if not polytope.add_cut(halfspace):
            return False

        outcome.cuts.append(
            (halfspace.kind, polytope.n_vertices, polytope.last_created)
        )
        return True


# -----------------------------------------------------------------------------


class _Search:
    """Open-node queue and bound bookkeeping of one solve call."""

    def __init__(self, cloud: PointCloud, config: SolverConfig):
        self.cloud = cloud
        self.config = config
        self.state = SearchState()
        self.trace = SolveTrace()
        self.heap: List[BranchNode] = []
        self.closed_lower = math.inf
        self.ids = itertools.count()
        self.last_polytope: Optional[Polytope] = None

    def record(self, node: int, kind: CutKind, vertices: int) -> None:
        self.trace.append(
            TraceRecord(
                self.state.iterations,
                node,
                self.state.lower,
                self.state.upper,
                kind,
                vertices,
            )
        )

    def open_vertices(self) -> int:
        return sum(node.polytope.n_vertices for node in self.heap)

    def setup(self) -> None:
        cloud, config = self.cloud, self.config
        root = init_simplex(cloud, config.k, config.n_min, config.fixed_marginal)
        self.state.cumulative_vertices = root.n_vertices
        self.state.peak_vertices = root.n_vertices
        node = BranchNode(root, 0.0, 0, next(self.ids))

        initial: List[HalfSpace] = []
        if config.symmetry_breaking and config.k > 1:
            initial.extend(symmetry_cuts(config.k, cloud.d))

        if config.centroid_box:
            initial.extend(centroid_box_cuts(cloud, config.k))

        for halfspace in initial:
            if root.add_cut(halfspace):
                self.merge_cut(
                    node.id, halfspace.kind, root.n_vertices, root.last_created
                )

        _LOGGER.debug(
            "Root polytope: dim=%s, %s vertices, %s half-spaces",
            root.effective_dim,
            root.n_vertices,
            root.n_halfspaces,
        )
        self.last_polytope = root
        heapq.heappush(self.heap, node)

    def merge_cut(
        self, node: int, kind: CutKind, vertices: int, created: int
    ) -> None:
        self.state.count_cut(kind)
        self.state.cumulative_vertices += created
        self.state.peak_vertices = max(self.state.peak_vertices, vertices)
        self.record(node, kind, vertices)

    def merge(self, outcome: NodeOutcome, pending: List[BranchNode]) -> None:
        state = self.state
        node = outcome.node
        state.iterations += 1

        for gamma, value in outcome.candidates:
            if value < state.upper:
                state.upper = value
                state.incumbent = gamma

        node.lower = outcome.lower
        if outcome.status == "open":
            heapq.heappush(self.heap, node)
        elif outcome.status == "branched":
            state.branches += 1
            for child in outcome.children:
                child.id = next(self.ids)
                heapq.heappush(self.heap, child)

            _LOGGER.info(
                "Branched node %s (%s vertices) into %s",
                node.id,
                node.polytope.n_vertices,
                [child.id for child in outcome.children],
            )
        elif outcome.status == "converged":
            self.closed_lower = min(self.closed_lower, outcome.lower)

        self.last_polytope = node.polytope
        self.update_lower(pending)

        for kind, vertices, created in outcome.cuts:
            self.merge_cut(node.id, kind, vertices, created)

        if outcome.status == "branched":
            self.record(node.id, CutKind.BRANCH, node.polytope.n_vertices)
        elif not outcome.cuts:
            self.record(node.id, CutKind.NONE, node.polytope.n_vertices)

        _LOGGER.debug(
            "Iteration %s: node %s %s, lower=%s, upper=%s, vertices=%s",
            state.iterations,
            node.id,
            outcome.status,
            state.lower,
            state.upper,
            node.polytope.n_vertices,
        )

    def update_lower(self, pending: List[BranchNode]) -> None:
        state = self.state
        bounds = [self.closed_lower, state.upper]
        if self.heap:
            bounds.append(self.heap[0].lower)

        bounds.extend(node.lower for node in pending)
        state.lower = min(max(state.lower, min(bounds)), state.upper)

    def converged(self) -> bool:
        state, config = self.state, self.config
        if state.incumbent is None:
            return False

        if config.epsilon > 0 and state.upper - state.lower < config.epsilon:
            return True

        return relative_gap(state.upper, state.lower) <= config.rel_gap

    def next_batch(self) -> List[BranchNode]:
        batch: List[BranchNode] = []
        while self.heap and len(batch) < self.config.threads:
            node = heapq.heappop(self.heap)
            if node.lower >= self.state.upper:
                continue

            batch.append(node)

        return batch


def solve(cloud: PointCloud, config: SolverConfig) -> SolveResult:
    """Globally minimize the k-means objective with a certified gap."""
    start_time = time.monotonic()
    config.validate(cloud.n)

    if config.k == 1:
        gamma = Assignment(np.zeros(cloud.n, dtype=np.int64), 1, config.n_min)
        value = kmeans_objective(cloud, gamma)
        trace = SolveTrace([TraceRecord(1, 0, value, value, CutKind.NONE, 1)])
        return SolveResult(
            status=SolveStatus.OPTIMAL,
            best_assignment=gamma,
            best_objective=value,
            lower_bound=value,
            iterations=1,
            cuts_added=0,
            peak_vertices=1,
            cumulative_vertices=1,
            final_vertices=1,
            branches=0,
            wall_time=time.monotonic() - start_time,
            trace=trace,
        )

    _LOGGER.info(
        "Solving n=%s, d=%s, k=%s (fixed marginal=%s, symmetry=%s, box=%s, "
        "local search=%s, integer cuts=%s)",
        cloud.n,
        cloud.d,
        config.k,
        config.fixed_marginal,
        config.symmetry_breaking,
        config.centroid_box,
        config.local_search,
        config.integer_cuts,
    )

    search = _Search(cloud, config)
    search.setup()
    worker = _NodeWorker(cloud, config)
    state = search.state

    message = ""
    status = SolveStatus.UNCERTIFIED
    executor = ThreadPoolExecutor(config.threads) if config.threads > 1 else None
    try:
        while True:
            if search.converged():
                status = SolveStatus.OPTIMAL
                break

            if not search.heap:
                message = "search tree exhausted before the gap closed"
                break

            if state.iterations >= config.max_iterations:
                message = f"iteration cap {config.max_iterations} reached"
                break

            if (
                config.max_vertices is not None
                and search.open_vertices() > config.max_vertices
            ):
                message = f"vertex cap {config.max_vertices} exceeded"
                break

            elapsed = time.monotonic() - start_time
            if config.time_limit is not None and elapsed > config.time_limit:
                message = f"time limit {config.time_limit}s reached"
                break

            batch = search.next_batch()
            if not batch:
                search.update_lower([])
                continue

            upper = state.upper
            if executor is None:
                outcomes = [worker.step(node, upper) for node in batch]
            else:
                outcomes = list(
                    executor.map(lambda node: worker.step(node, upper), batch)
                )

            outcomes.sort(key=lambda outcome: outcome.node.id)
            for index, outcome in enumerate(outcomes):
                search.merge(outcome, [o.node for o in outcomes[index + 1 :]])
    finally:
        if executor is not None:
            executor.shutdown()

    incumbent = state.incumbent
    assert incumbent is not None, "Solver stopped without an incumbent"

    if status == SolveStatus.UNCERTIFIED:
        _LOGGER.warning("Result is not certified: %s", message)

    result = SolveResult(
        status=status,
        best_assignment=incumbent.canonical(),
        best_objective=state.upper,
        lower_bound=state.lower,
        iterations=state.iterations,
        cuts_added=state.cuts_added,
        peak_vertices=state.peak_vertices,
        cumulative_vertices=state.cumulative_vertices,
        final_vertices=search.open_vertices(),
        branches=state.branches,
        wall_time=time.monotonic() - start_time,
        trace=search.trace,
        cut_counts=dict(state.cut_counts),
        message=message,
        polytope=search.last_polytope,
    )

    _LOGGER.info(
        "Finished (%s): objective=%s, lower bound=%s, gap=%s, iterations=%s",
        result.status.value,
        result.best_objective,
        result.lower_bound,
        result.relative_gap,
        result.iterations,
    )
    return result
