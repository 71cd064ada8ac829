import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, TYPE_CHECKING, Dict, List, Optional

import numpy as np

from .core import Assignment

if TYPE_CHECKING:
    from .polytope import Polytope

TRACE_COLUMNS = ("iter", "node", "lower", "upper", "gap", "cut_kind", "vertices")


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    UNCERTIFIED = "uncertified"


class CutKind(str, Enum):
    SIMPLEX = "simplex"
    GRADIENT = "gradient"
    LEAST_SQUARES = "least-squares"
    TIGHT = "tight"
    BOX = "box"
    INTEGER = "integer"
    SYMMETRY = "symmetry"
    BRANCH = "branch"
    NONE = "none"


def relative_gap(upper: float, lower: float) -> float:
    """(U - L) / max(|U|, 1e-12); infinite until an incumbent exists."""
    if not math.isfinite(upper):
        return math.inf

    return max(upper - lower, 0.0) / max(abs(upper), 1e-12)


@dataclass
class TraceRecord:
    iteration: int
    node: int
    lower: float
    upper: float
    cut_kind: CutKind
    vertices: int

    @property
    def gap(self) -> float:
        return relative_gap(self.upper, self.lower)

    def row(self) -> List[str]:
        return [
            str(self.iteration),
            str(self.node),
            repr(self.lower),
            repr(self.upper),
            repr(self.gap),
            self.cut_kind.value,
            str(self.vertices),
        ]


@dataclass
class SolveTrace:
    records: List[TraceRecord] = field(default_factory=list)

    def append(self, record: TraceRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def lower_bounds(self) -> np.ndarray:
        return np.array([r.lower for r in self.records])

    @property
    def upper_bounds(self) -> np.ndarray:
        return np.array([r.upper for r in self.records])

    def is_monotone(self) -> bool:
        """Lower bounds never decrease and upper bounds never increase."""
        lower, upper = self.lower_bounds, self.upper_bounds
        rising = np.all(lower[1:] >= lower[:-1])
        return bool(rising and np.all(upper[1:] <= upper[:-1]))

    def write_csv(self, trace_file: IO[str]) -> None:
        writer = csv.writer(trace_file, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for record in self.records:
            writer.writerow(record.row())


@dataclass
class SearchState:
    """Bound bookkeeping shared by the branch-node workers."""

    upper: float = math.inf
    lower: float = 0.0
    incumbent: Optional[Assignment] = None
    iterations: int = 0
    cuts_added: int = 0
    branches: int = 0
    peak_vertices: int = 0
    cumulative_vertices: int = 0
    cut_counts: Dict[str, int] = field(default_factory=dict)

    def count_cut(self, kind: CutKind) -> None:
        self.cuts_added += 1
        self.cut_counts[kind.value] = self.cut_counts.get(kind.value, 0) + 1


@dataclass
class SolveResult:
    status: SolveStatus
    best_assignment: Assignment
    best_objective: float
    lower_bound: float
    iterations: int
    cuts_added: int
    peak_vertices: int
    cumulative_vertices: int
    final_vertices: int
    branches: int
    wall_time: float
    trace: SolveTrace
    cut_counts: Dict[str, int] = field(default_factory=dict)
    message: str = ""
    polytope: Optional["Polytope"] = field(default=None, repr=False)

    @property
    def relative_gap(self) -> float:
        return relative_gap(self.best_objective, self.lower_bound)

    @property
    def certified(self) -> bool:
        return self.status == SolveStatus.OPTIMAL

    def summary(self) -> Dict[str, object]:
        return {
            "status": self.status.value,
            "objective": self.best_objective,
            "lower_bound": self.lower_bound,
            "relative_gap": self.relative_gap,
            "labels": self.best_assignment.labels.tolist(),
            "cluster_sizes": self.best_assignment.counts.tolist(),
            "iterations": self.iterations,
            "cuts_added": self.cuts_added,
            "cut_counts": dict(sorted(self.cut_counts.items())),
            "peak_vertices": self.peak_vertices,
            "cumulative_vertices": self.cumulative_vertices,
            "final_vertices": self.final_vertices,
            "branches": self.branches,
            "message": self.message,
        }
