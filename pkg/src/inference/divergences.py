"""Divergences Module

Large-sample limits of the classical graph statistics and the f-divergence
generators they correspond to.

For n1 / n -> alpha, the Friedman-Rafsky count satisfies
T / n -> 2 alpha (1 - alpha) int p q / (alpha p + (1 - alpha) q), and for the
k-NN count 1 - T / (n k) -> int (alpha^2 p^2 + (1 - alpha)^2 q^2) / (alpha p + (1 - alpha) q).
"""

import logging
from enum import Enum
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import quad

from ..exceptions import ParameterError, QuadratureError

logger = logging.getLogger(__name__)

Density = Callable[[float], float]

DEFAULT_INTERVAL = (-12.0, 12.0)
QUAD_TOLERANCE = 1e-8


class DivergenceKind(str, Enum):
    """Which classical test the divergence belongs to."""
    FR = "fr"
    NN = "nn"


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")


def f_generator(x, alpha: float, kind: DivergenceKind):
    """Generator f of the limiting f-divergence, shifted so that f(1) = 0.

    Args:
        x: Non-negative likelihood ratio (scalar or array)
        alpha: Limiting proportion of the first sample
        kind: ``fr`` or ``nn``

    Returns:
        f(x) with the same shape as ``x``
    """
    _check_alpha(alpha)
    kind = DivergenceKind(kind)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ParameterError("f_generator is defined for x >= 0")
    beta = 1.0 - alpha
    denominator = alpha * x + beta
    if kind is DivergenceKind.FR:
        value = (alpha * x - beta) ** 2 / (4.0 * alpha * beta * denominator)
        shift = (alpha - beta) ** 2 / (4.0 * alpha * beta)
    else:
        value = (alpha ** 2 * x ** 2 + beta ** 2) / denominator
        shift = alpha ** 2 + beta ** 2
    result = value - shift
    return float(result) if result.ndim == 0 else result


def _integrand(p: Density, q: Density, alpha: float, kind: DivergenceKind) -> Callable[[float], float]:
    beta = 1.0 - alpha

    def limit_density(x: float) -> float:
        px, qx = p(x), q(x)
        mixture = alpha * px + beta * qx
        if mixture <= 0.0:
            return 0.0
        if kind is DivergenceKind.FR:
            return 2.0 * alpha * beta * px * qx / mixture
        return (alpha ** 2 * px ** 2 + beta ** 2 * qx ** 2) / mixture

    return limit_density


def _integrate(func: Callable[[float], float], interval: Tuple[float, float]) -> float:
    result = quad(func, interval[0], interval[1], epsabs=QUAD_TOLERANCE, limit=200, full_output=1)
    if len(result) > 3:
        logger.error(f"Quadrature failed on {interval}: {result[3]}")
        raise QuadratureError(f"Quadrature did not converge on {interval}: {result[3]}")
    value, error = result[0], result[1]
    logger.debug(f"Quadrature value {value:.10g} (error estimate {error:.2g})")
    return float(value)


def divergence_limit_1d(p: Density, q: Density, alpha: float, kind: DivergenceKind,
                        interval: Tuple[float, float] = DEFAULT_INTERVAL) -> float:
    """Limit of T / n (``fr``) or 1 - T / (n k) (``nn``) for 1-D densities.

    Args:
        p: Density of the first sample
        q: Density of the second sample
        alpha: Limiting proportion n1 / n
        kind: ``fr`` or ``nn``
        interval: Integration range

    Returns:
        Value of the limiting integral

    Raises:
        QuadratureError: If the adaptive quadrature does not converge
    """
    _check_alpha(alpha)
    return _integrate(_integrand(p, q, alpha, DivergenceKind(kind)), interval)


def f_divergence_1d(p: Density, q: Density, alpha: float, kind: DivergenceKind,
                    interval: Tuple[float, float] = DEFAULT_INTERVAL) -> float:
    """int q f(p / q) with the shifted generator; equals 1 - T n / (2 n1 n2) in the FR limit."""
    kind = DivergenceKind(kind)

    def weighted(x: float) -> float:
        qx = q(x)
        if qx <= 0.0:
            return 0.0
        return qx * f_generator(p(x) / qx, alpha, kind)

    return _integrate(weighted, interval)
