"""Permutation Module

Permutation-null sampling and the add-one permutation p-value.
Labellings are drawn in fixed-size chunks, each from its own derived
generator, so the result does not depend on how many workers evaluate them.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Callable

import numpy as np

from ..exceptions import ParameterError
from ..geometry import PooledData

logger = logging.getLogger(__name__)

Statistic = Callable[[np.ndarray], float]

DEFAULT_CHUNK_SIZE = 250


class Alternative(str, Enum):
    """Which tail of the permutation null rejects H0."""
    LESS = "less"
    GREATER = "greater"


def sample_labellings(labels: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` uniform relabellings (one per row) with the same class counts."""
    return rng.permuted(np.tile(np.asarray(labels), (count, 1)), axis=1)


def _chunk_statistics(stat: Statistic, labels: np.ndarray, seed: int, chunk: int, size: int) -> np.ndarray:
    rng = np.random.default_rng([seed, chunk])
    return np.array([stat(row) for row in sample_labellings(labels, size, rng)], dtype=float)


def permutation_null(stat: Statistic, data: PooledData, n_perms: int, seed: int,
                     chunk_size: int = DEFAULT_CHUNK_SIZE, workers: int = 1) -> np.ndarray:
    """Evaluate a statistic on ``n_perms`` random labellings.

    Args:
        stat: Function of a label vector
        data: Pooled data providing the class counts
        n_perms: Number of labellings
        seed: Base seed; chunk c uses ``default_rng([seed, c])``
        chunk_size: Labellings per chunk
        workers: Threads evaluating chunks

    Returns:
        Permuted statistic values in chunk order
    """
    if n_perms < 1:
        raise ParameterError(f"n_perms must be positive, got {n_perms}")
    sizes = [min(chunk_size, n_perms - start) for start in range(0, n_perms, chunk_size)]
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda args: _chunk_statistics(stat, data.labels, seed, *args),
                                  enumerate(sizes)))
    else:
        parts = [_chunk_statistics(stat, data.labels, seed, chunk, size) for chunk, size in enumerate(sizes)]
    return np.concatenate(parts)


def pvalue_from_null(observed: float, null: np.ndarray, alternative: Alternative = Alternative.LESS) -> float:
    """Add-one p-value of an observed statistic against permuted values."""
    null = np.asarray(null, dtype=float)
    if Alternative(alternative) is Alternative.LESS:
        extreme = np.count_nonzero(null <= observed)
    else:
        extreme = np.count_nonzero(null >= observed)
    return (1.0 + extreme) / (len(null) + 1.0)


def permutation_pvalue(stat: Statistic, data: PooledData, n_perms: int, seed: int,
                       alternative: Alternative = Alternative.LESS,
                       chunk_size: int = DEFAULT_CHUNK_SIZE, workers: int = 1) -> float:
    """Permutation p-value of the canonical labelling.

    With the default ``LESS`` alternative this is
    (1 + #{pi : stat(pi*) >= stat(pi)}) / (n_perms + 1), so small observed
    statistics give small p-values. ``GREATER`` mirrors the inequality.

    Args:
        stat: Function of a label vector
        data: Pooled data; ``data.labels`` is the observed labelling
        n_perms: Number of random labellings
        seed: Base seed
        alternative: Rejecting tail
        chunk_size: Labellings per chunk
        workers: Threads evaluating chunks

    Returns:
        p-value in (0, 1]
    """
    observed = stat(data.labels)
    null = permutation_null(stat, data, n_perms, seed, chunk_size=chunk_size, workers=workers)
    p_value = pvalue_from_null(observed, null, alternative)
    logger.debug(f"Permutation p-value {p_value:.4f} from {n_perms} labellings (observed {observed:.6g})")
    return p_value
