import numpy as np
import pytest
from scipy.stats import norm

from src.exceptions import ParameterError
from src.geometry import PointSample, pairwise_distances, pool_samples
from src.inference import DivergenceKind, cross_count, divergence_limit_1d, f_divergence_1d, f_generator, mst_kruskal

STANDARD = norm(0.0, 1.0).pdf
SHIFTED = norm(1.0, 1.0).pdf


def test_generators_vanish_at_one():
    assert f_generator(1.0, 0.5, DivergenceKind.FR) == pytest.approx(0.0)
    assert f_generator(1.0, 0.5, DivergenceKind.NN) == pytest.approx(0.0)
    assert f_generator(1.0, 0.3, "fr") == pytest.approx(0.0)


def test_fr_generator_at_zero():
    assert f_generator(0.0, 0.5, DivergenceKind.FR) == pytest.approx(0.5)


def test_generator_accepts_arrays():
    values = f_generator(np.array([0.0, 1.0, 2.0]), 0.5, DivergenceKind.NN)
    assert values.shape == (3,)
    assert values[1] == pytest.approx(0.0)


def test_generator_domain():
    with pytest.raises(ParameterError):
        f_generator(-1.0, 0.5, DivergenceKind.FR)
    with pytest.raises(ParameterError):
        f_generator(1.0, 1.0, DivergenceKind.FR)


@pytest.mark.parametrize("alpha", [0.3, 0.5])
def test_fr_limit_of_identical_densities(alpha):
    value = divergence_limit_1d(STANDARD, STANDARD, alpha, DivergenceKind.FR)
    assert value == pytest.approx(2 * alpha * (1 - alpha), abs=1e-7)


def test_nn_limit_of_identical_densities():
    assert divergence_limit_1d(STANDARD, STANDARD, 0.5, DivergenceKind.NN) == pytest.approx(0.5, abs=1e-7)


def test_fr_limit_matches_monte_carlo():
    value = divergence_limit_1d(STANDARD, SHIFTED, 0.5, DivergenceKind.FR)
    x = np.random.default_rng(0).standard_normal(4_000_000)
    # E_p[2 a b q / (a p + b q)] with a = b = 1/2
    estimate = np.mean(0.5 * SHIFTED(x) / (0.5 * STANDARD(x) + 0.5 * SHIFTED(x)))
    assert value == pytest.approx(estimate, rel=2e-3)


@pytest.mark.parametrize("alpha", [0.3, 0.5])
def test_divergence_form_of_the_limits(alpha):
    beta = 1.0 - alpha
    fr = divergence_limit_1d(STANDARD, SHIFTED, alpha, DivergenceKind.FR)
    nn = divergence_limit_1d(STANDARD, SHIFTED, alpha, DivergenceKind.NN)
    assert f_divergence_1d(STANDARD, SHIFTED, alpha, DivergenceKind.FR) == pytest.approx(
        1.0 - fr / (2 * alpha * beta), abs=1e-6)
    assert f_divergence_1d(STANDARD, SHIFTED, alpha, DivergenceKind.NN) == pytest.approx(
        nn - (alpha ** 2 + beta ** 2), abs=1e-6)


def _chain_cross_count(data):
    # in one dimension the minimum spanning tree joins consecutive sorted points
    order = np.argsort(data.points[:, 0], kind="stable")
    return int(np.count_nonzero(np.diff(data.labels[order]) != 0))


def test_chain_count_matches_spanning_tree():
    rng = np.random.default_rng(12)
    data = pool_samples(PointSample.from_array(rng.standard_normal(150)),
                        PointSample.from_array(rng.standard_normal(150) + 1.0))
    assert _chain_cross_count(data) == cross_count(mst_kruskal(pairwise_distances(data.sample)), data)


@pytest.mark.slow
def test_fr_count_approaches_limit():
    limit = divergence_limit_1d(STANDARD, SHIFTED, 0.5, DivergenceKind.FR)
    ratios = []
    for rep in range(20):
        rng = np.random.default_rng([13, rep])
        data = pool_samples(PointSample.from_array(rng.standard_normal(4000)),
                            PointSample.from_array(rng.standard_normal(4000) + 1.0))
        ratios.append(_chain_cross_count(data) / data.n)
    assert np.mean(np.abs(np.array(ratios) - limit)) <= 0.05
