"""External clustering quality against ground-truth classes."""
from typing import Union

import numpy as np
from sklearn.metrics import normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from .core import Assignment
from .errors import DomainError

Labels = Union[Assignment, np.ndarray]


def _pair(gamma: Labels, labels: np.ndarray):
    clusters = gamma.labels if isinstance(gamma, Assignment) else np.asarray(gamma)
    classes = np.asarray(labels).reshape(-1)
    if clusters.size != classes.size:
        raise DomainError(f"Got {classes.size} labels for {clusters.size} points")

    if classes.size == 0:
        raise DomainError("Cannot score an empty clustering")

    return clusters, classes


def purity(gamma: Labels, labels: np.ndarray) -> float:
    """Fraction of points in the majority class of their cluster."""
    clusters, classes = _pair(gamma, labels)
    table = contingency_matrix(classes, clusters)
    return float(table.max(axis=0).sum() / classes.size)


def nmi(gamma: Labels, labels: np.ndarray) -> float:
    """Mutual information over the arithmetic mean of the two entropies.

    Two constant labelings score 0.
    """
    clusters, classes = _pair(gamma, labels)
    if np.unique(clusters).size == 1 and np.unique(classes).size == 1:
        return 0.0

    return float(
        normalized_mutual_info_score(classes, clusters, average_method="arithmetic")
    )
