"""Classical Neighbourhoods Module

Exact (non-smoothed) neighbourhood construction for the Friedman-Rafsky and
k-nearest-neighbour tests, and the raw cross-count statistic.
"""

import logging
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..exceptions import InvalidInputError, ParameterError, SampleSizeError
from ..geometry import EdgeMode, EdgeSystem, PooledData, directed_index

logger = logging.getLogger(__name__)


class NeighbourhoodKind(str, Enum):
    """Neighbourhood selection algorithms."""
    MST = "mst"
    KNN = "knn"


class NeighbourhoodSet(BaseModel):
    """A selected subset U* of the edges of an edge system."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: NeighbourhoodKind
    n: int
    num_edges: int
    edge_indices: np.ndarray
    sources: np.ndarray
    targets: np.ndarray
    k: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.edge_indices)

    def indicator(self) -> np.ndarray:
        """0/1 vector over the whole edge system marking the selected edges."""
        values = np.zeros(self.num_edges)
        values[self.edge_indices] = 1.0
        return values


def _select(kind: NeighbourhoodKind, es: EdgeSystem, indices: np.ndarray, k: Optional[int] = None) -> NeighbourhoodSet:
    indices = np.sort(np.asarray(indices, dtype=np.int64))
    return NeighbourhoodSet(kind=kind, n=es.n, num_edges=es.num_edges, edge_indices=indices,
                            sources=es.sources[indices], targets=es.targets[indices], k=k)


class UnionFind:
    """Disjoint sets with path compression and union by rank."""

    def __init__(self, num: int):
        self.parents = list(range(num))
        self.rank = [0] * num

    def find(self, x: int) -> int:
        root = x
        while self.parents[root] != root:
            root = self.parents[root]
        while self.parents[x] != root:
            self.parents[x], x = root, self.parents[x]
        return root

    def union(self, x: int, y: int) -> bool:
        """Merge the sets of x and y; return False if they were already joined."""
        x = self.find(x)
        y = self.find(y)
        if x == y:
            return False
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        self.parents[y] = x
        if self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        return True


def mst_kruskal(es: EdgeSystem) -> NeighbourhoodSet:
    """Minimum spanning tree of an undirected edge system.

    Edges are scanned by increasing distance; equal distances are scanned by
    increasing canonical index, so the smaller index wins ties.

    Args:
        es: Undirected edge system

    Returns:
        The n - 1 tree edges

    Raises:
        GraphModeError: If ``es`` is directed
    """
    es.require(EdgeMode.UNDIRECTED, "mst_kruskal")
    if es.n < 2:
        raise SampleSizeError("mst_kruskal needs at least 2 vertices")
    order = np.argsort(es.distances, kind="stable")
    forest = UnionFind(es.n)
    chosen = []
    sources = es.sources.tolist()
    targets = es.targets.tolist()
    for index in order.tolist():
        if forest.union(sources[index], targets[index]):
            chosen.append(index)
            if len(chosen) == es.n - 1:
                break
    return _select(NeighbourhoodKind.MST, es, np.array(chosen))


def knn_edges(es: EdgeSystem, k: int) -> NeighbourhoodSet:
    """Directed k-nearest-neighbour graph.

    The edge i -> j is selected iff x_i is among the k closest points to x_j;
    ties in distance go to the smaller source index.

    Args:
        es: Directed edge system
        k: Neighbours per vertex, 1 <= k <= n - 1

    Returns:
        The k * n selected edges

    Raises:
        GraphModeError: If ``es`` is undirected
        ParameterError: If k is out of range
    """
    es.require(EdgeMode.DIRECTED, "knn_edges")
    n = es.n
    if not 1 <= k <= n - 1:
        raise ParameterError(f"k must lie in [1, {n - 1}], got {k}")
    matrix = es.distance_matrix()
    np.fill_diagonal(matrix, np.inf)
    # stable sort down each column keeps the lower source index first on ties
    nearest = np.argsort(matrix, axis=0, kind="stable")[:k]
    targets = np.broadcast_to(np.arange(n), nearest.shape)
    indices = directed_index(n, nearest.ravel(), targets.ravel())
    return _select(NeighbourhoodKind.KNN, es, indices, k=k)


def cross_count(U: NeighbourhoodSet, data: PooledData, labels: Optional[np.ndarray] = None) -> int:
    """Number of selected edges joining points with different labels.

    Args:
        U: Selected neighbourhood
        data: Pooled data the neighbourhood was built from
        labels: Optional labelling replacing the canonical one

    Returns:
        T(U) = sum over e in U of Delta(e)
    """
    if U.n != data.n:
        raise InvalidInputError(f"Neighbourhood has {U.n} vertices but data has {data.n} points")
    labels = data.labels if labels is None else np.asarray(labels)
    return int(np.count_nonzero(labels[U.sources] != labels[U.targets]))
