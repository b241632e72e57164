"""Cardinality Inference Module

Exact marginals of the per-node k-subset Gibbs model behind the smoothed
k-NN test. Each vertex independently picks exactly k incoming edges with
probability proportional to exp(-sum of their distances / lambda); this is a
cardinality potential, solved by forward-backward over a chain whose state is
the number of items chosen so far.

Derivatives are exact: tangent messages are pushed through the same log-domain
recursion. The marginal Jacobian of an exponential family is the (symmetric)
covariance of the edge indicators, so a tangent in the direction of a
cotangent vector is the vector-Jacobian product.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..exceptions import ParameterError
from ..geometry import EdgeMode, EdgeSystem, PooledData, directed_index, pullback_to_points
from .marginals import MarginalVector, make_marginals, require_temperature

logger = logging.getLogger(__name__)

# Above this gap between the k-th and (k+1)-th largest logit the model is
# treated as deterministic top-k selection.
HARD_SELECTION_GAP = 700.0


class CardinalityModel(BaseModel):
    """k-subset model over the candidate sources of one vertex."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    node: int
    candidate_logits: np.ndarray
    k: int

    def __init__(self, **data):
        super().__init__(**data)
        _check_k(self.k, len(self.candidate_logits))


def _check_k(k: int, m: int) -> None:
    if not 1 <= k <= m:
        raise ParameterError(f"k must lie in [1, {m}], got {k}")


def _hard_rows(theta: np.ndarray, k: int) -> np.ndarray:
    """Rows whose top-k set is separated from the rest by more than the hard gap."""
    m = theta.shape[1]
    if k == m:
        return np.ones(theta.shape[0], dtype=bool)
    ordered = -np.sort(-theta, axis=1)
    return (ordered[:, k - 1] - ordered[:, k]) > HARD_SELECTION_GAP


def _top_k(theta: np.ndarray, k: int) -> np.ndarray:
    # stable on -theta keeps lower candidate positions first on ties
    order = np.argsort(-theta, axis=1, kind="stable")[:, :k]
    selected = np.zeros_like(theta)
    np.put_along_axis(selected, order, 1.0, axis=1)
    return selected


def _lse_step(prev: np.ndarray, prev_dot: np.ndarray, logit: np.ndarray,
              logit_dot: Optional[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """One chain step: either skip the item or take it (count + 1)."""
    take = np.full_like(prev, -np.inf)
    take[:, 1:] = prev[:, :-1] + logit[:, None]
    out = np.logaddexp(prev, take)
    if logit_dot is None:
        return out, prev_dot
    take_dot = np.zeros_like(prev_dot)
    take_dot[:, 1:] = prev_dot[:, :-1] + logit_dot[:, None]
    safe = np.where(np.isfinite(out), out, 0.0)
    out_dot = np.exp(prev - safe) * prev_dot + np.exp(take - safe) * take_dot
    return out, out_dot


def _soft_marginals(theta: np.ndarray, k: int,
                    direction: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Forward-backward marginals for a batch of rows, optionally with tangents.

    Args:
        theta: B x m logits (already max-shifted per row)
        k: Subset size
        direction: Optional B x m tangent of the logits

    Returns:
        (marginals, tangent of marginals or None)
    """
    rows, m = theta.shape
    with_tangent = direction is not None
    alpha = np.full((m + 1, rows, k + 1), -np.inf)
    beta = np.full((m + 1, rows, k + 1), -np.inf)
    alpha[0, :, 0] = 0.0
    beta[m, :, 0] = 0.0
    alpha_dot = np.zeros_like(alpha)
    beta_dot = np.zeros_like(beta)

    for i in range(m):
        alpha[i + 1], alpha_dot[i + 1] = _lse_step(
            alpha[i], alpha_dot[i], theta[:, i], direction[:, i] if with_tangent else None)
    for i in range(m - 1, -1, -1):
        beta[i], beta_dot[i] = _lse_step(
            beta[i + 1], beta_dot[i + 1], theta[:, i], direction[:, i] if with_tangent else None)

    log_z = alpha[m, :, k]
    # item i taken as the (c+1)-th choice: c chosen before it, k-1-c after it
    before = alpha[:m, :, :k]
    after = beta[1:, :, k - 1::-1]
    log_terms = before + theta.T[:, :, None] + after - log_z[None, :, None]
    weights = np.exp(log_terms)
    marginals = weights.sum(axis=2).T
    if not with_tangent:
        return marginals, None

    z_dot = alpha_dot[m, :, k]
    term_dot = (alpha_dot[:m, :, :k] + direction.T[:, :, None]
                + beta_dot[1:, :, k - 1::-1] - z_dot[None, :, None])
    tangent = (weights * term_dot).sum(axis=2).T
    return marginals, tangent


def batch_cardinality_marginals(theta: np.ndarray, k: int,
                                direction: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Marginals (and optional tangents) for many independent k-subset models.

    Rows in the hard-selection regime get exact 0/1 marginals and zero tangent.

    Args:
        theta: B x m logits
        k: Subset size, 1 <= k <= m
        direction: Optional B x m logit tangent

    Returns:
        (B x m marginals, B x m tangents or None)
    """
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    _check_k(k, theta.shape[1])
    if not np.all(np.isfinite(theta)):
        raise ParameterError("Candidate logits must be finite")
    theta = theta - theta.max(axis=1, keepdims=True)

    marginals = np.empty_like(theta)
    tangent = np.zeros_like(theta) if direction is not None else None
    hard = _hard_rows(theta, k)
    if hard.any():
        marginals[hard] = _top_k(theta[hard], k)
        logger.debug(f"{int(hard.sum())} of {len(hard)} vertices in the hard-selection regime")
    soft = ~hard
    if soft.any():
        soft_direction = None if direction is None else np.atleast_2d(direction)[soft]
        marginals[soft], soft_tangent = _soft_marginals(theta[soft], k, soft_direction)
        if tangent is not None:
            tangent[soft] = soft_tangent
    return marginals, tangent


def cardinality_marginals(model: CardinalityModel) -> np.ndarray:
    """Exact inclusion probabilities P(j in U_node) of the k-subset model.

    Args:
        model: Candidate logits theta_j = -d(x_j, x_node) / lambda and k

    Returns:
        Vector of marginals summing to k

    Raises:
        ParameterError: If k is out of range
    """
    marginals, _ = batch_cardinality_marginals(model.candidate_logits[None, :], model.k)
    return marginals[0]


def _candidate_layout(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """For each target j: its candidate sources (ascending) and the edge indices i -> j."""
    others = np.nonzero(~np.eye(n, dtype=bool))[1].reshape(n, n - 1)
    targets = np.repeat(np.arange(n)[:, None], n - 1, axis=1)
    return others, directed_index(n, others, targets)


def knn_models(es: EdgeSystem, lam: float, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per-vertex logit matrix and the matching edge-index matrix."""
    es.require(EdgeMode.DIRECTED, "smoothed k-NN")
    lam = require_temperature(lam)
    _check_k(k, es.n - 1)
    _, edge_index = _candidate_layout(es.n)
    return -es.distances[edge_index] / lam, edge_index


def knn_marginals(es: EdgeSystem, lam: float, k: int) -> MarginalVector:
    """Edge marginals of the smoothed k-NN model over a directed edge system."""
    theta, edge_index = knn_models(es, lam, k)
    marginals, _ = batch_cardinality_marginals(theta, k)
    values = np.zeros(es.num_edges)
    values[edge_index] = marginals
    return make_marginals(values, lam, EdgeMode.DIRECTED, budget=k * es.n)


def knn_marginals_vjp(es: EdgeSystem, lam: float, k: int, cotangent: np.ndarray) -> np.ndarray:
    """Gradient of <cotangent, mu(d / lambda)> with respect to the distances d."""
    theta, edge_index = knn_models(es, lam, k)
    cotangent = np.asarray(cotangent, dtype=float)
    _, tangent = batch_cardinality_marginals(theta, k, direction=cotangent[edge_index])
    grad_d = np.zeros(es.num_edges)
    grad_d[edge_index] = -tangent / lam
    return grad_d


def smooth_knn_statistic(es: EdgeSystem, data: PooledData, lam: float, k: int) -> Tuple[float, MarginalVector]:
    """Smoothed k-NN statistic T = sum_e Delta(e) mu_e.

    Args:
        es: Directed edge system built from ``data.points``
        data: Pooled data with the observed labelling
        lam: Temperature
        k: Neighbours per vertex

    Returns:
        (T, marginals)
    """
    mu = knn_marginals(es, lam, k)
    return float(es.crossing(data.labels) @ mu.values), mu


def smooth_knn_backward(es: EdgeSystem, data: PooledData, lam: float, k: int,
                        upstream: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients of ``upstream * T`` with respect to distances and points.

    Returns:
        (grad_d over edges, n x d grad over ``data.points``)
    """
    grad_d = knn_marginals_vjp(es, lam, k, upstream * es.crossing(data.labels))
    return grad_d, pullback_to_points(data.points, es, grad_d)
