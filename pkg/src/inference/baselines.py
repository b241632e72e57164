"""Baselines Module

Comparison statistics: the unbiased MMD with a squared-exponential kernel,
the energy statistic and the median-heuristic bandwidth. The ``*_from_*``
variants evaluate a relabelling of a precomputed pooled matrix so permutation
tests never rebuild kernels.
"""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.spatial.distance import cdist, pdist

from ..exceptions import DegenerateBandwidthError, SampleSizeError
from ..geometry import PointSample, PooledData

logger = logging.getLogger(__name__)


class KernelConfig(BaseModel):
    """Squared-exponential kernel bandwidth sigma."""

    model_config = ConfigDict(frozen=True)

    bandwidth: float = Field(gt=0)


def bandwidth_from_gamma(dim: int, gamma: float) -> KernelConfig:
    """Bandwidth sigma = d^gamma."""
    return KernelConfig(bandwidth=float(dim) ** gamma)


def gaussian_kernel(sq_distances: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    return np.exp(-sq_distances / (2.0 * cfg.bandwidth ** 2))


def mmd_from_kernel(kernel: np.ndarray, labels: np.ndarray) -> float:
    """Unbiased MMD^2 of the split given by ``labels`` over a pooled kernel matrix."""
    first = np.asarray(labels) == 1
    second = ~first
    n1, n2 = int(first.sum()), int(second.sum())
    k11 = kernel[np.ix_(first, first)]
    k22 = kernel[np.ix_(second, second)]
    k12 = kernel[np.ix_(first, second)]
    within1 = (k11.sum() - np.trace(k11)) / (n1 * (n1 - 1))
    within2 = (k22.sum() - np.trace(k22)) / (n2 * (n2 - 1))
    return float(within1 + within2 - 2.0 * k12.mean())


def mmd_unbiased(x1: PointSample, x2: PointSample, cfg: KernelConfig) -> float:
    """Unbiased estimate of MMD^2 with k(x, y) = exp(-||x - y||^2 / (2 sigma^2)).

    Raises:
        SampleSizeError: If either sample has fewer than two points
    """
    if x1.n < 2 or x2.n < 2:
        raise SampleSizeError(f"mmd_unbiased needs at least 2 points per sample, got {x1.n} and {x2.n}")
    pooled = np.vstack([x1.points, x2.points])
    kernel = gaussian_kernel(cdist(pooled, pooled, "sqeuclidean"), cfg)
    labels = np.concatenate([np.ones(x1.n, dtype=int), np.full(x2.n, 2)])
    return mmd_from_kernel(kernel, labels)


def _mean_within(block: np.ndarray, unbiased: bool) -> float:
    size = block.shape[0]
    if not unbiased:
        return float(block.mean())
    if size < 2:
        return 0.0
    return float(block.sum() / (size * (size - 1)))


def energy_from_distances(distances: np.ndarray, labels: np.ndarray, unbiased: bool = True) -> float:
    """Energy statistic of the split given by ``labels`` over a pooled distance matrix."""
    first = np.asarray(labels) == 1
    second = ~first
    cross = distances[np.ix_(first, second)].mean()
    within1 = _mean_within(distances[np.ix_(first, first)], unbiased)
    within2 = _mean_within(distances[np.ix_(second, second)], unbiased)
    return float(2.0 * cross - within1 - within2)


def energy_statistic(x1: PointSample, x2: PointSample, unbiased: bool = True) -> float:
    """Energy statistic 2 E||x - y|| - E||x - x'|| - E||y - y'||.

    Args:
        x1: First sample
        x2: Second sample
        unbiased: Within-sample means over ordered distinct pairs (default);
            ``False`` averages over all ordered pairs, diagonal included

    Returns:
        Statistic value
    """
    if x1.n < 1 or x2.n < 1:
        raise SampleSizeError("energy_statistic needs non-empty samples")
    pooled = np.vstack([x1.points, x2.points])
    labels = np.concatenate([np.ones(x1.n, dtype=int), np.full(x2.n, 2)])
    return energy_from_distances(cdist(pooled, pooled), labels, unbiased=unbiased)


def lower_median(values: np.ndarray) -> float:
    """Median of the values; for an even count the lower of the two middle values."""
    ordered = np.sort(np.asarray(values, dtype=float).ravel())
    if ordered.size == 0:
        raise SampleSizeError("lower_median of an empty set")
    return float(ordered[(ordered.size - 1) // 2])


def median_heuristic(pooled: PooledData) -> KernelConfig:
    """Bandwidth equal to the (lower) median pooled pairwise distance.

    Raises:
        SampleSizeError: If fewer than two points are pooled
        DegenerateBandwidthError: If the median distance is zero
    """
    if pooled.n < 2:
        raise SampleSizeError("median_heuristic needs at least 2 points")
    median = lower_median(pdist(pooled.points))
    if median <= 0.0:
        raise DegenerateBandwidthError("Median pairwise distance is zero; points are (mostly) identical")
    logger.debug(f"Median heuristic bandwidth {median:.6g}")
    return KernelConfig(bandwidth=median)
