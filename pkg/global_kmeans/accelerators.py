"""Problem-specific cuts and the gap-driven schedule of the expensive ones."""
from dataclasses import dataclass
from typing import List

import numpy as np

from .core import PointCloud, SolverConfig
from .errors import DomainError
from .polytope import HalfSpace
from .state import CutKind


@dataclass(frozen=True)
class Schedule:
    """Accelerators active at the current relative gap."""

    least_squares: bool
    tight: bool


def schedule(config: SolverConfig, gap: float) -> Schedule:
    """Least-squares cuts while gap > ls_gate, tight cuts once gap < tight_gate."""
    return Schedule(
        least_squares=config.ls_gate is not None and gap > config.ls_gate,
        tight=config.tight_gate is not None and gap < config.tight_gate,
    )


def symmetry_cuts(k: int, d: int) -> List[HalfSpace]:
    """Order the clusters by <𝟙, z_j> <= <𝟙, z_(j+1)>.

    Any assignment can be relabeled to satisfy every cut, so the optimal
    value does not change.
    """
    if k < 2:
        raise DomainError(f"Symmetry cuts need k >= 2, got {k}")

    cuts = []
    for col in range(k - 1):
        normal = np.zeros((d + 1, k))
        normal[:, col] = 1.0
        normal[:, col + 1] = -1.0
        cuts.append(HalfSpace(normal, 0.0, CutKind.SYMMETRY))

    return cuts


def centroid_box_cuts(cloud: PointCloud, k: int) -> List[HalfSpace]:
    """Keep every centroid inside the bounding box of the data.

    For cluster j and coordinate i: n_j s_i <= (z_j)_i <= n_j S_i, with s and
    S the per-coordinate minimum and maximum.
    """
    low = cloud.data.min(axis=1)
    high = cloud.data.max(axis=1)
    mass = cloud.d

    cuts = []
    for col in range(k):
        for coord in range(cloud.d):
            upper = np.zeros((cloud.d + 1, k))
            upper[coord, col] = 1.0
            upper[mass, col] = -high[coord]
            cuts.append(HalfSpace(upper, 0.0, CutKind.BOX))

            lower = np.zeros((cloud.d + 1, k))
            lower[coord, col] = -1.0
            lower[mass, col] = low[coord]
            cuts.append(HalfSpace(lower, 0.0, CutKind.BOX))

    return cuts
