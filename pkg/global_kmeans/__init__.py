"""Globally optimal k-means clustering with cutting planes."""
from pathlib import Path

_DIR = Path(__file__).parent

__version__ = (_DIR / "VERSION").read_text(encoding="utf-8").strip()

from .core import (  # noqa: E402
    Assignment,
    PointCloud,
    SolverConfig,
    ZMatrix,
    concave_objective,
    kmeans_objective,
)
from .solver import solve  # noqa: E402
from .state import SolveResult, SolveStatus  # noqa: E402

__all__ = [
    "Assignment",
    "PointCloud",
    "SolveResult",
    "SolveStatus",
    "SolverConfig",
    "ZMatrix",
    "__version__",
    "concave_objective",
    "kmeans_objective",
    "solve",
]
