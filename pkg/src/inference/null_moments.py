"""Null Moments Module

Closed-form moments of the smoothed statistic under the permutation null,
the smooth t-statistic and the normality diagnostics of the null distribution.

With chi1 = n1 n2 / (n (n - 1)) and chi2 = 4 (n1 - 1)(n2 - 1) / ((n - 2)(n - 3)),
the null variance of T = sum_e Delta(e) mu_e is

    chi1 (1 - chi2) sum_v (sum_{e in delta(v)} mu_e)^2
    + chi1 chi2 sum_{e || e'} mu_e mu_e' + chi1 (chi2 - 4 chi1) m^2,

where the parallel-edge sum pairs every edge with itself and with its reverse.
"""

import logging
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import norm

from ..exceptions import DegenerateNullError, ParameterError
from ..geometry import EdgeSystem
from .marginals import MarginalVector

logger = logging.getLogger(__name__)

SMALLEST_PVALUE = float(np.finfo(float).tiny)


class NullMoments(BaseModel):
    """Mean and variance of T under uniformly random relabelling."""

    model_config = ConfigDict(frozen=True)

    mean: float
    variance: float = Field(ge=0)
    m: float
    chi1: float
    chi2: float

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


class NormalityTerms(BaseModel):
    """Configuration counts entering the normal-approximation bound."""

    model_config = ConfigDict(frozen=True)

    s2: float
    s3: float
    l4: float
    k: float
    bound_order: float

    def relative_bound(self, sigma: float) -> float:
        """Bound numerator divided by sigma^3."""
        return self.bound_order / sigma ** 3


def _require_null_size(n1: int, n2: int) -> int:
    n = n1 + n2
    if n < 4:
        raise ParameterError(f"Null variance needs n = n1 + n2 >= 4, got {n}")
    return n


def chi_terms(n1: int, n2: int) -> Tuple[float, float]:
    """Return (chi1, chi2) for the class sizes."""
    n = _require_null_size(n1, n2)
    chi1 = n1 * n2 / (n * (n - 1))
    chi2 = 4.0 * (n1 - 1) * (n2 - 1) / ((n - 2) * (n - 3))
    return chi1, chi2


def _values(mu) -> np.ndarray:
    return np.asarray(mu.values if isinstance(mu, MarginalVector) else mu, dtype=float)


def _endpoints(edge) -> frozenset:
    return frozenset(int(v) for v in edge)


def pi_entry(e: Tuple[int, int], f: Tuple[int, int], n1: int, n2: int) -> float:
    """Second moment E[Delta(e) Delta(f)] under the permutation null.

    Args:
        e: Endpoints of the first edge
        f: Endpoints of the second edge
        n1: First class size
        n2: Second class size

    Returns:
        2 chi1 for the same endpoints, chi1 for one shared vertex,
        chi1 chi2 for disjoint edges
    """
    chi1, chi2 = chi_terms(n1, n2)
    shared = len(_endpoints(e) & _endpoints(f))
    if shared == 2:
        return 2.0 * chi1
    if shared == 1:
        return chi1
    return chi1 * chi2


def null_mean(m: float, n1: int, n2: int) -> float:
    """E[T] = 2 m n1 n2 / (n (n - 1))."""
    n = n1 + n2
    if n < 2:
        raise ParameterError(f"null_mean needs n >= 2, got {n}")
    return 2.0 * m * n1 * n2 / (n * (n - 1))


def _vertex_sums(mu: np.ndarray, es: EdgeSystem) -> np.ndarray:
    return np.bincount(es.sources, weights=mu, minlength=es.n) + np.bincount(es.targets, weights=mu, minlength=es.n)


def _parallel_sum(mu: np.ndarray, es: EdgeSystem) -> float:
    total = float(mu @ mu)
    if es.directed:
        total += float(mu @ mu[es.reverse])
    return total


def _check_budget(mu: np.ndarray, m: float) -> None:
    if abs(mu.sum() - m) > 1e-6 * max(1.0, abs(m)):
        logger.warning(f"Marginals sum to {mu.sum():.12g}, not to the edge budget m={m}; null moments assume equality")


def null_variance_fast(mu, es: EdgeSystem, n1: int, n2: int, m: float) -> float:
    """Linear-time null variance of T.

    Args:
        mu: Marginal vector (or raw array) aligned with ``es``
        es: Edge system
        n1: First class size
        n2: Second class size
        m: Edge budget (n - 1 for FR, k n for k-NN)

    Returns:
        Variance of T under random relabelling
    """
    chi1, chi2 = chi_terms(n1, n2)
    mu = _values(mu)
    _check_budget(mu, m)
    vertex = _vertex_sums(mu, es)
    variance = (chi1 * (1.0 - chi2) * float(vertex @ vertex)
                + chi1 * chi2 * _parallel_sum(mu, es)
                + chi1 * (chi2 - 4.0 * chi1) * m ** 2)
    return max(variance, 0.0)


def null_variance_quadratic(mu, es: EdgeSystem, n1: int, n2: int, m: float) -> float:
    """Null variance mu^T Pi mu - E[T]^2 by a direct double loop (for small graphs)."""
    _require_null_size(n1, n2)
    mu = _values(mu)
    edges = es.edges
    total = 0.0
    for a, e in enumerate(edges):
        if mu[a] == 0.0:
            continue
        for b, f in enumerate(edges):
            total += mu[a] * mu[b] * pi_entry(e, f, n1, n2)
    return total - null_mean(m, n1, n2) ** 2


def null_moments(mu, es: EdgeSystem, n1: int, n2: int, m: float) -> NullMoments:
    """Assemble mean, variance and chi terms."""
    chi1, chi2 = chi_terms(n1, n2)
    return NullMoments(mean=null_mean(m, n1, n2), variance=null_variance_fast(mu, es, n1, n2, m),
                       m=m, chi1=chi1, chi2=chi2)


def null_variance_gradient(mu, es: EdgeSystem, n1: int, n2: int) -> np.ndarray:
    """Derivative of the linear-time variance with respect to each mu_e."""
    chi1, chi2 = chi_terms(n1, n2)
    mu = _values(mu)
    vertex = _vertex_sums(mu, es)
    parallel = 2.0 * mu
    if es.directed:
        parallel = parallel + 2.0 * mu[es.reverse]
    return (chi1 * (1.0 - chi2) * 2.0 * (vertex[es.sources] + vertex[es.targets])
            + chi1 * chi2 * parallel)


def t_statistic(T: float, moments: NullMoments) -> float:
    """Standardised statistic (T - mean) / std.

    Raises:
        DegenerateNullError: If the null variance is not positive
    """
    if moments.variance <= 0.0:
        raise DegenerateNullError(f"Null variance is {moments.variance}; the t-statistic is undefined")
    return (T - moments.mean) / moments.std


def t_statistic_cotangent(T: float, moments: NullMoments, crossing: np.ndarray, mu,
                          es: EdgeSystem, n1: int, n2: int) -> np.ndarray:
    """Gradient of the t-statistic with respect to the marginals mu."""
    if moments.variance <= 0.0:
        raise DegenerateNullError("Null variance is zero; the t-statistic has no gradient")
    sigma = moments.std
    dvar = null_variance_gradient(mu, es, n1, n2)
    return crossing / sigma - (T - moments.mean) / (2.0 * sigma ** 3) * dvar


def normal_pvalue(t: float) -> float:
    """One-sided normal-approximation p-value Phi(t); small t rejects.

    Evaluated through log Phi and floored at the smallest normal double, so the
    result stays in (0, 1] far in the lower tail.
    """
    return float(max(np.exp(norm.logcdf(t)), SMALLEST_PVALUE))


def symmetrized_weights(mu, es: EdgeSystem) -> np.ndarray:
    """Matrix mu_bar_ij = (mu_{i->j} + mu_{j->i}) / 2 with zero diagonal.

    Undirected systems carry a single orientation per pair, so each pair gets
    half its marginal.
    """
    mu = _values(mu)
    weights = np.zeros((es.n, es.n))
    np.add.at(weights, (es.sources, es.targets), mu / 2.0)
    np.add.at(weights, (es.targets, es.sources), mu / 2.0)
    return weights


def normality_terms(mu_bar: np.ndarray) -> NormalityTerms:
    """Sums over distinct-index tuples used by the normal-approximation bound.

    S2 counts pairs of edges sharing a vertex, S3 three-stars and L4 paths on
    four vertices, each weighted by mu_bar.

    Args:
        mu_bar: Symmetric n x n matrix of symmetrised marginals

    Returns:
        S2, S3, L4, effective neighbourhood size k = sum(mu_bar) / n and the
        bound numerator n k^3 + k S2 + S3 + L4
    """
    A = np.array(mu_bar, dtype=float)
    np.fill_diagonal(A, 0.0)
    n = A.shape[0]
    p1 = A.sum(axis=1)
    p2 = (A ** 2).sum(axis=1)
    p3 = (A ** 3).sum(axis=1)
    s2 = float((p1 ** 2 - p2).sum())
    s3 = float((p1 ** 3 - 3.0 * p1 * p2 + 2.0 * p3).sum())
    # path k - i - j - m: choose k next to i and m next to j, all four distinct
    left = p1[:, None] - A
    right = p1[None, :] - A
    l4 = float((A * (left * right - A @ A)).sum())
    k = float(A.sum() / n) if n else 0.0
    return NormalityTerms(s2=s2, s3=s3, l4=l4, k=k, bound_order=n * k ** 3 + k * s2 + s3 + l4)
