import numpy as np
import pytest
from scipy.stats import kstest

from src.exceptions import ParameterError
from src.geometry import EdgeMode, PointSample, pool_samples
from src.inference import (
    Alternative,
    cross_count,
    mst_kruskal,
    permutation_null,
    permutation_pvalue,
    pvalue_from_null,
)
from src.inference.permutation import sample_labellings

from .conftest import edge_system, random_pooled


def test_constant_statistic_gives_one(rng):
    data = random_pooled(rng, 5, 5)
    assert permutation_pvalue(lambda labels: 3.0, data, n_perms=99, seed=1) == 1.0


def test_most_extreme_observation():
    assert pvalue_from_null(0.0, np.arange(1, 100)) == pytest.approx(1 / 100)
    assert pvalue_from_null(200.0, np.arange(1, 100), Alternative.GREATER) == pytest.approx(1 / 100)


def test_canonical_labelling_singled_out(rng):
    data = random_pooled(rng, 20, 20)
    canonical = data.labels.copy()

    def stat(labels):
        return 0.0 if np.array_equal(labels, canonical) else 1.0

    assert permutation_pvalue(stat, data, n_perms=199, seed=3) == pytest.approx(1 / 200)


def test_labellings_keep_class_counts(rng):
    labels = np.array([1, 1, 1, 2, 2])
    drawn = sample_labellings(labels, 50, rng)
    assert drawn.shape == (50, 5)
    np.testing.assert_array_equal((drawn == 1).sum(axis=1), np.full(50, 3))


def test_null_independent_of_workers(rng):
    data = random_pooled(rng, 6, 6)
    weights = rng.standard_normal(data.n)

    def stat(labels):
        return float(weights @ (labels == 1))

    serial = permutation_null(stat, data, n_perms=50, seed=11, chunk_size=7, workers=1)
    threaded = permutation_null(stat, data, n_perms=50, seed=11, chunk_size=7, workers=4)
    assert len(serial) == 50
    np.testing.assert_array_equal(serial, threaded)


def test_nonpositive_permutations_rejected(rng):
    with pytest.raises(ParameterError):
        permutation_null(lambda labels: 0.0, random_pooled(rng, 3, 3), n_perms=0, seed=0)


@pytest.mark.slow
def test_fr_pvalues_uniform_under_null():
    p_values = []
    for rep in range(500):
        rng = np.random.default_rng([7, rep])
        data = pool_samples(PointSample.from_array(rng.standard_normal((64, 2))),
                            PointSample.from_array(rng.standard_normal((64, 2))))
        tree = mst_kruskal(edge_system(data, EdgeMode.UNDIRECTED))
        p_values.append(permutation_pvalue(lambda labels: cross_count(tree, data, labels), data,
                                           n_perms=199, seed=rep))
    # integer ties make the add-one p-value slightly conservative
    assert kstest(p_values, "uniform").statistic < 0.1
