"""Datasets Module

Synthetic two-sample data: the Gaussian location/scale alternative of the
power studies and the two-moons distribution.
"""

import numpy as np
from sklearn.datasets import make_moons

from ..exceptions import ParameterError
from ..geometry import PointSample

MAX_SEED = 2 ** 31 - 1


def gaussian_alternative(n1: int, n2: int, dim: int, mu_shift: float, sigma_scale: float,
                         rng: np.random.Generator) -> tuple:
    """Draw X1 ~ N(0, I) and X2 ~ N((mu, 0, ..., 0), diag(sigma^2, 1, ..., 1)).

    Returns:
        (x1, x2) point samples
    """
    if dim < 1 or n1 < 1 or n2 < 1:
        raise ParameterError(f"Need n1, n2, dim >= 1, got {n1}, {n2}, {dim}")
    if sigma_scale <= 0:
        raise ParameterError(f"sigma_scale must be positive, got {sigma_scale}")
    x1 = rng.standard_normal((n1, dim))
    x2 = rng.standard_normal((n2, dim))
    x2[:, 0] = mu_shift + sigma_scale * x2[:, 0]
    return PointSample.from_array(x1), PointSample.from_array(x2)


def two_moons(n: int, noise: float, rng: np.random.Generator) -> PointSample:
    """Two interleaving half circles with Gaussian noise of standard deviation ``noise``."""
    if n < 2:
        raise ParameterError(f"two_moons needs n >= 2, got {n}")
    points, _ = make_moons(n_samples=n, noise=noise, random_state=int(rng.integers(MAX_SEED)))
    return PointSample.from_array(points)
