"""Shared fixtures and exact oracles for the test suite."""

import functools
import itertools
import math

import networkx as nx
import numpy as np
import pytest

from src.geometry import EdgeMode, EdgeSystem, PointSample, PooledData, pairwise_distances, pool_samples


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_pooled(rng: np.random.Generator, n1: int, n2: int, dim: int = 2, shift: float = 0.0) -> PooledData:
    x1 = rng.standard_normal((n1, dim))
    x2 = rng.standard_normal((n2, dim)) + shift
    return pool_samples(PointSample.from_array(x1), PointSample.from_array(x2))


def edge_system(data: PooledData, mode: EdgeMode) -> EdgeSystem:
    return pairwise_distances(data.sample, mode=mode)


def central_difference(func, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Centered finite-difference gradient of a scalar function of a vector."""
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    flat = x.ravel()
    out = grad.ravel()
    for j in range(flat.size):
        original = flat[j]
        flat[j] = original + h
        fplus = func(x)
        flat[j] = original - h
        fminus = func(x)
        flat[j] = original
        out[j] = (fplus - fminus) / (2 * h)
    return grad


def spanning_trees(es: EdgeSystem):
    """All spanning trees of the complete undirected graph, as tuples of edge indices."""
    edges = es.edges
    for subset in itertools.combinations(range(es.num_edges), es.n - 1):
        graph = nx.Graph()
        graph.add_nodes_from(range(es.n))
        graph.add_edges_from(edges[e] for e in subset)
        if nx.is_tree(graph):
            yield subset


@functools.lru_cache(maxsize=None)
def complete_graph_trees(n: int):
    """Spanning trees of K_n in canonical edge order, enumerated once per n."""
    return tuple(spanning_trees(EdgeSystem.from_distance_matrix(np.ones((n, n)) - np.eye(n))))


def tree_gibbs_moments(es: EdgeSystem, lam: float):
    """Exact edge marginals and pair-inclusion matrix by enumerating all spanning trees."""
    trees = complete_graph_trees(es.n)
    costs = np.array([es.distances[list(tree)].sum() for tree in trees])
    weights = np.exp(-(costs - costs.min()) / lam)
    weights /= weights.sum()
    marginals = np.zeros(es.num_edges)
    pairs = np.zeros((es.num_edges, es.num_edges))
    for weight, tree in zip(weights, trees):
        indicator = np.zeros(es.num_edges)
        indicator[list(tree)] = 1.0
        marginals += weight * indicator
        pairs += weight * np.outer(indicator, indicator)
    return marginals, pairs, len(trees)


def subset_marginals(theta: np.ndarray, k: int) -> np.ndarray:
    """Exact k-subset marginals of exp(sum theta) by enumerating all subsets."""
    m = len(theta)
    subsets = list(itertools.combinations(range(m), k))
    scores = np.array([theta[list(s)].sum() for s in subsets])
    weights = np.exp(scores - scores.max())
    weights /= weights.sum()
    marginals = np.zeros(m)
    for weight, subset in zip(weights, subsets):
        marginals[list(subset)] += weight
    return marginals


def cayley(n: int) -> int:
    return int(math.pow(n, n - 2))
