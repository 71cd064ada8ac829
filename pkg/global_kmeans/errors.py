"""Exceptions raised by global_kmeans."""
from typing import Optional


class GlobalKMeansError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GlobalKMeansError, ValueError):
    """Input outside the domain of an operation (empty cluster, zero mass, ...)."""


class InfeasibleError(GlobalKMeansError):
    """Constraints leave no feasible assignment or polytope region."""


class DegenerateError(GlobalKMeansError):
    """Geometric degeneracy: zero-spread branch or zero cut normal."""


class InstanceTooLargeError(GlobalKMeansError):
    """Exhaustive enumeration refused because the instance is too large."""


class InputFormatError(GlobalKMeansError, ValueError):
    """Malformed input file."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"

        super().__init__(message)
        self.line = line
