"""
Geometry Module

Point storage, pooling of two samples, pairwise distances and canonical edge
indexing for complete graphs.
"""

from .samples import (
    PointSample,
    PooledData,
    canonical_labels,
    load_points_csv,
    pool_samples,
    write_points_csv,
)
from .edges import (
    EdgeMode,
    EdgeSystem,
    Metric,
    directed_index,
    pairwise_distances,
    pullback_to_points,
    undirected_index,
)

__all__ = [
    "PointSample",
    "PooledData",
    "canonical_labels",
    "load_points_csv",
    "pool_samples",
    "write_points_csv",
    "EdgeMode",
    "EdgeSystem",
    "Metric",
    "directed_index",
    "pairwise_distances",
    "pullback_to_points",
    "undirected_index",
]
