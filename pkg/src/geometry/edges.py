"""Edge System Module

Complete-graph edge enumeration over a point set with canonical indexing,
distance vectors and the pullback of edge gradients onto point coordinates.
"""

import logging
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.spatial.distance import pdist, squareform

from ..exceptions import GraphModeError, InvalidInputError, SampleSizeError
from .samples import PointSample

logger = logging.getLogger(__name__)


class EdgeMode(str, Enum):
    """Orientation of the complete graph."""
    DIRECTED = "directed"
    UNDIRECTED = "undirected"


class Metric(str, Enum):
    """Weighting functions d(x, x') accepted by ``pairwise_distances``."""
    EUCLIDEAN = "euclidean"


def undirected_pairs(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Pairs (i, j), i < j, in lexicographic order."""
    return np.triu_indices(n, k=1)


def directed_pairs(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Pairs (i, j), i != j, in lexicographic order."""
    return np.nonzero(~np.eye(n, dtype=bool))


def directed_index(n: int, i, j):
    """Canonical index of the directed edge i -> j."""
    return i * (n - 1) + j - (j > i)


def undirected_index(n: int, i, j):
    """Canonical index of the undirected edge {i, j}, i < j."""
    return i * n - (i * (i + 1)) // 2 + (j - i - 1)


class EdgeSystem(BaseModel):
    """Edges of the complete graph on ``n`` vertices with their distances.

    Undirected systems hold each pair (i, j), i < j, once; directed systems
    hold both orientations and a reverse-edge map.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mode: EdgeMode
    n: int
    sources: np.ndarray
    targets: np.ndarray
    distances: np.ndarray
    reverse: Optional[np.ndarray] = None

    @classmethod
    def from_distance_matrix(cls, matrix: np.ndarray, mode: EdgeMode = EdgeMode.UNDIRECTED) -> "EdgeSystem":
        """Build an edge system from a symmetric n x n distance matrix."""
        matrix = np.asarray(matrix, dtype=float)
        n = matrix.shape[0]
        if matrix.shape != (n, n):
            raise InvalidInputError(f"Distance matrix must be square, got {matrix.shape}")
        if n < 2:
            raise SampleSizeError(f"Need at least 2 vertices, got {n}")
        if not np.all(np.isfinite(matrix)) or np.any(matrix < 0):
            raise InvalidInputError("Distances must be finite and non-negative")
        mode = EdgeMode(mode)
        if mode is EdgeMode.UNDIRECTED:
            sources, targets = undirected_pairs(n)
            reverse = None
        else:
            sources, targets = directed_pairs(n)
            reverse = directed_index(n, targets, sources)
            reverse.setflags(write=False)
        distances = matrix[sources, targets]
        for array in (sources, targets, distances):
            array.setflags(write=False)
        return cls(mode=mode, n=n, sources=sources, targets=targets,
                   distances=distances, reverse=reverse)

    @property
    def num_edges(self) -> int:
        return len(self.distances)

    @property
    def directed(self) -> bool:
        return self.mode is EdgeMode.DIRECTED

    @property
    def edges(self) -> List[Tuple[int, int]]:
        """Edges as (source, target) pairs in canonical order."""
        return list(zip(self.sources.tolist(), self.targets.tolist()))

    def index_of(self, i: int, j: int) -> int:
        """Canonical index of edge (i, j); undirected systems accept either order."""
        if i == j or not (0 <= i < self.n and 0 <= j < self.n):
            raise InvalidInputError(f"No edge ({i}, {j}) in a complete graph on {self.n} vertices")
        if self.directed:
            return int(directed_index(self.n, i, j))
        i, j = min(i, j), max(i, j)
        return int(undirected_index(self.n, i, j))

    def distance_matrix(self) -> np.ndarray:
        """Symmetric n x n matrix of distances (zero diagonal)."""
        matrix = np.zeros((self.n, self.n))
        matrix[self.sources, self.targets] = self.distances
        matrix[self.targets, self.sources] = self.distances
        return matrix

    def crossing(self, labels: np.ndarray) -> np.ndarray:
        """Indicator Delta(e) that the endpoints of each edge carry different labels."""
        labels = np.asarray(labels)
        return (labels[self.sources] != labels[self.targets]).astype(float)

    def with_distances(self, distances: np.ndarray) -> "EdgeSystem":
        """Same edges with a replaced distance vector (directed systems stay symmetric only if the input is)."""
        distances = np.array(distances, dtype=float)
        if distances.shape != self.distances.shape:
            raise InvalidInputError(f"Expected {self.num_edges} distances, got {distances.shape}")
        distances.setflags(write=False)
        return self.model_copy(update={"distances": distances})

    def require(self, mode: EdgeMode, operation: str) -> None:
        """Raise ``GraphModeError`` unless this system has the given mode."""
        if self.mode is not mode:
            raise GraphModeError(f"{operation} requires a {mode.value} edge system, got {self.mode.value}")


def pairwise_distances(sample: PointSample, metric: Metric = Metric.EUCLIDEAN,
                       mode: EdgeMode = EdgeMode.UNDIRECTED) -> EdgeSystem:
    """Compute the complete-graph edge system of a sample.

    Args:
        sample: Points, one per row
        metric: Weighting function; only the Euclidean norm is supported
        mode: Undirected (one edge per pair) or directed (both orientations)

    Returns:
        Edge system with raw (unscaled) distances

    Raises:
        SampleSizeError: If fewer than two points are given
        InvalidInputError: If coordinates are not finite
    """
    points = np.asarray(sample.points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 2:
        raise SampleSizeError(f"pairwise_distances needs at least 2 points, got {points.shape[0]}")
    if not np.all(np.isfinite(points)):
        raise InvalidInputError("Point coordinates must be finite")
    metric = Metric(metric)
    matrix = squareform(pdist(points, metric=metric.value))
    return EdgeSystem.from_distance_matrix(matrix, mode=mode)


def pullback_to_points(points: np.ndarray, es: EdgeSystem, grad_d: np.ndarray) -> np.ndarray:
    """Chain edge-distance gradients onto point coordinates.

    For d(e) = ||x_i - x_j||, the gradient with respect to x_i is
    grad_d[e] * (x_i - x_j) / ||x_i - x_j|| and the negation for x_j.
    Coincident endpoints contribute zero.

    Args:
        points: n x d coordinates the distances were computed from
        es: Edge system over those points
        grad_d: Gradient with respect to each edge distance

    Returns:
        n x d gradient with respect to the points
    """
    points = np.asarray(points, dtype=float)
    diff = points[es.sources] - points[es.targets]
    norms = np.linalg.norm(diff, axis=1)
    scale = np.divide(grad_d, norms, out=np.zeros_like(norms), where=norms > 0)
    contrib = diff * scale[:, None]
    grad = np.zeros_like(points)
    np.add.at(grad, es.sources, contrib)
    np.add.at(grad, es.targets, -contrib)
    return grad
