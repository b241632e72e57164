"""Samples Module

Point containers, pooling of two samples and CSV input.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from ..exceptions import DataFileError, InvalidInputError, SampleSizeError

logger = logging.getLogger(__name__)


def _as_point_matrix(points) -> np.ndarray:
    array = np.asarray(points, dtype=float)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2:
        raise InvalidInputError(f"Expected a 2-D point matrix, got shape {array.shape}")
    if array.shape[1] < 1:
        raise InvalidInputError("Points must have dimension d >= 1")
    if not np.all(np.isfinite(array)):
        raise InvalidInputError("Point coordinates must be finite")
    array.setflags(write=False)
    return array


class PointSample(BaseModel):
    """An n x d matrix of points, one point per row."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray

    @classmethod
    def from_array(cls, points) -> "PointSample":
        """Validate and wrap a point matrix (1-D input is read as d = 1)."""
        return cls(points=_as_point_matrix(points))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


class PooledData(BaseModel):
    """Two samples stacked in canonical order with their labelling.

    Labels are 1 for the first ``n1`` rows and 2 for the remaining ``n2``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray
    n1: int
    n2: int
    labels: np.ndarray

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def sample(self) -> PointSample:
        return PointSample(points=self.points)

    def first(self) -> np.ndarray:
        return self.points[: self.n1]

    def second(self) -> np.ndarray:
        return self.points[self.n1:]


def canonical_labels(n1: int, n2: int) -> np.ndarray:
    """Return the labelling (1, ..., 1, 2, ..., 2) with n1 ones."""
    labels = np.concatenate([np.ones(n1, dtype=np.int8), np.full(n2, 2, dtype=np.int8)])
    labels.setflags(write=False)
    return labels


def pool_samples(x1: PointSample, x2: PointSample) -> PooledData:
    """Pool two samples, first-sample rows first.

    Args:
        x1: Sample from P
        x2: Sample from Q

    Returns:
        Pooled data with the canonical labelling

    Raises:
        InvalidInputError: If the dimensions differ
        SampleSizeError: If either sample is empty
    """
    if x1.d != x2.d:
        raise InvalidInputError(f"Dimension mismatch: {x1.d} vs {x2.d}")
    if x1.n < 1 or x2.n < 1:
        raise SampleSizeError(f"Both samples need at least one point (got {x1.n}, {x2.n})")
    points = np.vstack([x1.points, x2.points])
    points.setflags(write=False)
    return PooledData(points=points, n1=x1.n, n2=x2.n, labels=canonical_labels(x1.n, x2.n))


def load_points_csv(path: Union[str, Path]) -> PointSample:
    """Read a header-less, comma-separated point file.

    Args:
        path: CSV path, one point per row

    Returns:
        Parsed sample

    Raises:
        DataFileError: If the file does not exist or cannot be read
        InvalidInputError: If the content does not parse as finite floats
    """
    path = Path(path)
    if not path.is_file():
        raise DataFileError(str(path))
    try:
        frame = pd.read_csv(path, header=None, sep=",", dtype=float)
    except pd.errors.EmptyDataError:
        raise InvalidInputError(f"{path}: no points found")
    except (ValueError, pd.errors.ParserError) as exc:
        raise InvalidInputError(f"{path}: cannot parse points ({exc})") from exc
    except OSError as exc:
        raise DataFileError(str(path), str(exc)) from exc
    logger.debug(f"Read {frame.shape[0]} points of dimension {frame.shape[1]} from {path}")
    return PointSample.from_array(frame.to_numpy())


def write_points_csv(points: np.ndarray, path: Union[str, Path]) -> None:
    """Write points in the same header-less CSV format."""
    pd.DataFrame(np.asarray(points, dtype=float)).to_csv(path, header=False, index=False)
