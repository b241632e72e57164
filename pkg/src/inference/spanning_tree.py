"""Spanning Tree Inference Module

Exact inference in the Gibbs measure over spanning trees of the complete
graph, P(U) proportional to exp(-sum_{e in U} d(e) / lambda). The measure is a
determinantal point process whose kernel is built from the grounded
Laplacian L of the graph weighted by w_e = exp(-d(e) / lambda):

    mu_e        = w_e (u_i - u_j)^T L^-1 (u_i - u_j)    (effective resistance)
    P(e, f in U) = mu_e mu_f - w_e w_f ((u_i - u_j)^T L^-1 (u_k - u_l))^2

Weights are rescaled by exp(d_min / lambda) before exponentiation; every tree
has n - 1 edges, so the measure does not change.
"""

import logging
import math
from collections import deque
from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.linalg.lapack import dpocon

from ..exceptions import ConditioningError, ParameterError
from ..geometry import EdgeMode, EdgeSystem, PooledData, pullback_to_points
from .cardinality import HARD_SELECTION_GAP
from .classical import mst_kruskal
from .marginals import BUDGET_TOLERANCE, MarginalVector, make_marginals, require_temperature

logger = logging.getLogger(__name__)

JL_CONSTANT = 24.0


class GroundedLaplacian(BaseModel):
    """Weighted Laplacian with the last vertex's row and column removed."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray
    grounded_vertex: int
    edge_weights: np.ndarray
    lam: float

    @classmethod
    def from_edges(cls, es: EdgeSystem, lam: float) -> "GroundedLaplacian":
        """Assemble the grounded Laplacian of the complete graph.

        Raises:
            ConditioningError: If any rescaled weight underflows to zero
        """
        es.require(EdgeMode.UNDIRECTED, "spanning-tree inference")
        lam = require_temperature(lam)
        weights = np.exp(-(es.distances - es.distances.min()) / lam)
        if np.any(weights == 0.0):
            underflowed = int(np.count_nonzero(weights == 0.0))
            raise ConditioningError(lam, f"{underflowed} edge weights underflowed to zero")
        full = laplacian(es, weights)
        matrix = full[:-1, :-1]
        return cls(matrix=matrix, grounded_vertex=es.n - 1, edge_weights=weights, lam=lam)

    def factor(self):
        """Cholesky factor of the grounded Laplacian."""
        try:
            return cho_factor(self.matrix, lower=True, check_finite=False)
        except LinAlgError as exc:
            raise ConditioningError(self.lam, str(exc)) from exc

    def reciprocal_condition(self, factor) -> float:
        """LAPACK estimate of 1 / cond_1 of the grounded Laplacian from its Cholesky factor."""
        chol, lower = factor
        rcond, info = dpocon(chol, np.linalg.norm(self.matrix, 1), uplo="L" if lower else "U")
        if info != 0:
            raise ConditioningError(self.lam, f"condition estimate failed (info={info})")
        return float(rcond)

    def padded_inverse(self) -> np.ndarray:
        """L^-1 embedded in an n x n matrix with zeros on the grounded vertex."""
        size = self.matrix.shape[0]
        inverse = cho_solve(self.factor(), np.eye(size), check_finite=False)
        padded = np.zeros((size + 1, size + 1))
        padded[:size, :size] = inverse
        return padded


def laplacian(es: EdgeSystem, weights: np.ndarray) -> np.ndarray:
    """Full n x n Laplacian of the graph with the given edge weights."""
    full = np.zeros((es.n, es.n))
    full[es.sources, es.targets] = -weights
    full[es.targets, es.sources] = -weights
    full[np.diag_indices(es.n)] = -full.sum(axis=1)
    return full


def _pair_quadratic(matrix: np.ndarray, es: EdgeSystem) -> np.ndarray:
    """(u_i - u_j)^T M (u_i - u_j) for every edge (i, j)."""
    i, j = es.sources, es.targets
    return matrix[i, i] + matrix[j, j] - 2.0 * matrix[i, j]


def minimum_swap_gap(es: EdgeSystem) -> float:
    """Smallest cost increase of any spanning tree over the minimum spanning tree.

    Equals the minimum over non-tree edges f of d(f) minus the largest tree
    distance on the tree path between the endpoints of f; zero when the
    minimum spanning tree is not unique.
    """
    tree = mst_kruskal(es)
    n = es.n
    adjacency = [[] for _ in range(n)]
    for index, i, j in zip(tree.edge_indices.tolist(), tree.sources.tolist(), tree.targets.tolist()):
        weight = float(es.distances[index])
        adjacency[i].append((j, weight))
        adjacency[j].append((i, weight))
    bottleneck = np.zeros((n, n))
    for root in range(n):
        seen = [False] * n
        seen[root] = True
        queue = deque([root])
        while queue:
            vertex = queue.popleft()
            for other, weight in adjacency[vertex]:
                if not seen[other]:
                    seen[other] = True
                    bottleneck[root, other] = max(bottleneck[root, vertex], weight)
                    queue.append(other)
    in_tree = tree.indicator().astype(bool)
    if in_tree.all():
        return math.inf
    gaps = es.distances - bottleneck[es.sources, es.targets]
    return float(gaps[~in_tree].min())


def is_hard_regime(es: EdgeSystem, lam: float) -> bool:
    """Whether every non-minimal tree carries less than exp(-700) of the mass."""
    threshold = HARD_SELECTION_GAP + max(es.n - 2, 0) * math.log(es.n)
    if np.ptp(es.distances) / lam <= threshold:
        return False
    return minimum_swap_gap(es) / lam > threshold


def _check_tree_mass(mu: np.ndarray, n: int, lam: float) -> None:
    """Raise ``ConditioningError`` unless the exact marginals sum to n - 1."""
    total = float(mu.sum())
    if not abs(total - (n - 1)) <= BUDGET_TOLERANCE * max(1, n - 1):
        logger.error(f"Spanning-tree marginals sum to {total:.12g} instead of {n - 1} at lambda={lam:.3g}")
        raise ConditioningError(lam, f"marginals sum to {total:.12g} instead of n - 1 = {n - 1}")


class _TreeModel:
    """Factorised spanning-tree model shared by marginals, pair moments and gradients."""

    def __init__(self, es: EdgeSystem, lam: float):
        es.require(EdgeMode.UNDIRECTED, "spanning-tree inference")
        self.es = es
        self.lam = require_temperature(lam)
        self.hard = is_hard_regime(es, self.lam)
        if self.hard:
            logger.debug(f"Spanning-tree model at lambda={self.lam:.3g} is in the hard-selection regime")
            self.weights = None
            self.inverse = None
            self.mu = mst_kruskal(es).indicator()
        else:
            grounded = GroundedLaplacian.from_edges(es, self.lam)
            self.weights = grounded.edge_weights
            self.inverse = grounded.padded_inverse()
            self.mu = self.weights * _pair_quadratic(self.inverse, es)
            _check_tree_mass(self.mu, es.n, self.lam)

    def transfer(self, e: int, f: int) -> float:
        """(u_i - u_j)^T L^-1 (u_k - u_l) for edges e = (i, j), f = (k, l)."""
        i, j = self.es.sources[e], self.es.targets[e]
        k, l = self.es.sources[f], self.es.targets[f]
        P = self.inverse
        return P[i, k] - P[i, l] - P[j, k] + P[j, l]

    def kernel_matrix(self) -> np.ndarray:
        """Dense |E| x |E| DPP kernel K with K_ee = mu_e."""
        if self.hard:
            return np.diag(self.mu)
        incidence = np.zeros((self.es.n, self.es.num_edges))
        columns = np.arange(self.es.num_edges)
        incidence[self.es.sources, columns] = 1.0
        incidence[self.es.targets, columns] = -1.0
        scaled = incidence * np.sqrt(self.weights)[None, :]
        return scaled.T @ self.inverse @ scaled

    def vjp(self, cotangent: np.ndarray) -> np.ndarray:
        """Gradient of <cotangent, mu> with respect to the distances."""
        if self.hard:
            return np.zeros(self.es.num_edges)
        cotangent = np.asarray(cotangent, dtype=float)
        # sum_e c_e K_ef^2 = w_f (u_k - u_l)^T L^-1 L_c L^-1 (u_k - u_l), L_c weighted by c * w
        sandwiched = self.inverse @ laplacian(self.es, cotangent * self.weights) @ self.inverse
        grad_theta = cotangent * self.mu - self.weights * _pair_quadratic(sandwiched, self.es)
        return -grad_theta / self.lam


def st_marginals(es: EdgeSystem, lam: float) -> MarginalVector:
    """Exact spanning-tree edge marginals under the Gibbs measure.

    Args:
        es: Undirected edge system
        lam: Temperature

    Returns:
        Marginals summing to n - 1

    Raises:
        ConditioningError: If the grounded Laplacian is numerically singular, detected by
            a failed factorization or by marginals that do not sum to n - 1
    """
    model = _TreeModel(es, lam)
    return make_marginals(model.mu, model.lam, EdgeMode.UNDIRECTED, budget=es.n - 1)


def _edge_index(es: EdgeSystem, edge: Union[int, Tuple[int, int]]) -> int:
    if isinstance(edge, tuple):
        return es.index_of(*edge)
    edge = int(edge)
    if not 0 <= edge < es.num_edges:
        raise ParameterError(f"Edge index {edge} out of range for {es.num_edges} edges")
    return edge


def st_pair_moment(es: EdgeSystem, lam: float, e: Union[int, Tuple[int, int]],
                   f: Union[int, Tuple[int, int]]) -> float:
    """Probability that both edges belong to the random spanning tree.

    Args:
        es: Undirected edge system
        lam: Temperature
        e: First edge (canonical index or endpoint pair)
        f: Second edge, distinct from ``e``

    Returns:
        P(e in U, f in U), the determinant of the 2 x 2 kernel minor
    """
    e, f = _edge_index(es, e), _edge_index(es, f)
    if e == f:
        raise ParameterError("st_pair_moment needs two distinct edges")
    model = _TreeModel(es, lam)
    if model.hard:
        return float(model.mu[e] * model.mu[f])
    cross = model.weights[e] * model.weights[f] * model.transfer(e, f) ** 2
    return float(min(max(model.mu[e] * model.mu[f] - cross, 0.0), 1.0))


def st_pair_moment_matrix(es: EdgeSystem, lam: float) -> np.ndarray:
    """All pairwise inclusion probabilities (diagonal holds the marginals); dense, for small graphs."""
    model = _TreeModel(es, lam)
    kernel = model.kernel_matrix()
    moments = np.outer(model.mu, model.mu) - kernel ** 2
    moments[np.diag_indices_from(moments)] = model.mu
    return moments


def st_marginals_vjp(es: EdgeSystem, lam: float, cotangent: np.ndarray) -> np.ndarray:
    """Gradient of <cotangent, mu(d / lambda)> with respect to d.

    Uses d mu_e / d theta_f = Cov(1_e, 1_f) with theta = -d / lambda, evaluated
    in O(n^3) without forming the edge-by-edge kernel.
    """
    return _TreeModel(es, lam).vjp(cotangent)


def smooth_fr_statistic(es: EdgeSystem, data: PooledData, lam: float) -> Tuple[float, MarginalVector]:
    """Smoothed Friedman-Rafsky statistic T = sum_e Delta(e) mu_e, with 0 <= T <= n - 1."""
    mu = st_marginals(es, lam)
    return float(es.crossing(data.labels) @ mu.values), mu


def smooth_fr_backward(es: EdgeSystem, data: PooledData, lam: float,
                       upstream: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients of ``upstream * T`` with respect to distances and points.

    Returns:
        (grad_d over edges, n x d grad over ``data.points``)
    """
    grad_d = st_marginals_vjp(es, lam, upstream * es.crossing(data.labels))
    return grad_d, pullback_to_points(data.points, es, grad_d)


def jl_projection_dim(n: int, epsilon: float) -> int:
    """Projection dimension ceil(24 ln n / epsilon^2)."""
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    return int(math.ceil(JL_CONSTANT * math.log(max(n, 2)) / epsilon ** 2))


def approx_marginals_jl(es: EdgeSystem, lam: float, epsilon: float, seed: int) -> MarginalVector:
    """Randomised effective-resistance marginals.

    Solves L Z^T = A diag(sqrt(w)) R for a random sign matrix R with entries
    +-1/sqrt(p) and returns mu_e ~ w_e ||Z (u_i - u_j)||^2. Linear systems are
    solved with the dense Cholesky factor.

    Args:
        es: Undirected edge system
        lam: Temperature
        epsilon: Target relative accuracy in (0, 1)
        seed: Seed of the projection

    Returns:
        Approximate marginals

    Raises:
        ConditioningError: If the solve error bound eps / rcond exceeds ``epsilon``
    """
    p = jl_projection_dim(es.n, epsilon)
    lam = require_temperature(lam)
    if is_hard_regime(es, lam):
        return st_marginals(es, lam)
    grounded = GroundedLaplacian.from_edges(es, lam)
    rng = np.random.default_rng(seed)
    logger.debug(f"JL projection with p={p} for n={es.n}, epsilon={epsilon}")
    signs = rng.choice(np.array([-1.0, 1.0]), size=(es.num_edges, p)) / math.sqrt(p)
    scaled = signs * np.sqrt(grounded.edge_weights)[:, None]
    projected = np.zeros((es.n, p))
    np.add.at(projected, es.sources, scaled)
    np.add.at(projected, es.targets, -scaled)
    sketch = np.zeros((es.n, p))
    factor = grounded.factor()
    rcond = grounded.reciprocal_condition(factor)
    if rcond < np.finfo(float).eps / epsilon:
        raise ConditioningError(lam, f"reciprocal condition number {rcond:.3g} is too small for epsilon={epsilon}")
    sketch[:-1] = cho_solve(factor, projected[:-1], check_finite=False)
    diff = sketch[es.sources] - sketch[es.targets]
    values = grounded.edge_weights * np.einsum("ep,ep->e", diff, diff)
    return make_marginals(values, lam, EdgeMode.UNDIRECTED, budget=es.n - 1, check_budget=False)
