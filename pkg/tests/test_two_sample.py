import numpy as np
import pytest

from src.exceptions import SampleSizeError
from src.geometry import EdgeMode, PointSample, pool_samples
from src.inference import cross_count, knn_edges, mst_kruskal, null_moments, st_marginals
from src.test_management import TestFeature, TestKind, TestOptions
from src.two_sample import (
    BUILTIN_TESTS,
    EnergyTest,
    FriedmanRafskyTest,
    KNearestNeighbourTest,
    MedianMMDTest,
    MMDTest,
    SmoothFriedmanRafskyTest,
    SmoothKNearestNeighbourTest,
    default_registry,
)

from .conftest import edge_system, random_pooled


def test_default_registry_has_every_kind():
    registry = default_registry()
    assert set(registry.list_kinds()) == set(TestKind)
    smoothed = {cls.kind for cls in registry.get_tests_by_feature(TestFeature.SMOOTHED)}
    assert smoothed == {TestKind.FR_SMOOTH, TestKind.KNN_SMOOTH}
    assert len(BUILTIN_TESTS) == len(TestKind)


def test_fr_statistic_is_mst_cross_count(rng):
    data = random_pooled(rng, 8, 8)
    report = FriedmanRafskyTest(TestOptions(kind=TestKind.FR, permutations=50)).evaluate(data)
    assert report.statistic == cross_count(mst_kruskal(edge_system(data, EdgeMode.UNDIRECTED)), data)
    assert report.t_stat is None
    assert report.lam is None


def test_knn_statistic_and_echo(rng):
    data = random_pooled(rng, 8, 8)
    report = KNearestNeighbourTest(TestOptions(kind=TestKind.KNN, k=2, permutations=50)).evaluate(data)
    assert report.statistic == cross_count(knn_edges(edge_system(data, EdgeMode.DIRECTED), 2), data)
    assert report.k == 2


def test_knn_needs_enough_points(rng):
    with pytest.raises(SampleSizeError):
        KNearestNeighbourTest(TestOptions(kind=TestKind.KNN, k=5)).evaluate(random_pooled(rng, 2, 2))


def test_smooth_fr_report(rng):
    data = random_pooled(rng, 6, 7)
    report = SmoothFriedmanRafskyTest(TestOptions(kind=TestKind.FR_SMOOTH, lam=0.5, permutations=50)).evaluate(data)
    es = edge_system(data, EdgeMode.UNDIRECTED)
    mu = st_marginals(es, 0.5)
    moments = null_moments(mu, es, 6, 7, 12)
    assert report.statistic == pytest.approx(es.crossing(data.labels) @ mu.values)
    assert report.t_stat == pytest.approx((report.statistic - moments.mean) / moments.std)
    assert 0.0 < report.p_normal < 1.0
    assert report.lam == 0.5


def test_smooth_fr_lambda_from_gamma(rng):
    data = random_pooled(rng, 4, 4, dim=9)
    test = SmoothFriedmanRafskyTest(TestOptions(kind=TestKind.FR_SMOOTH, gamma=0.5, permutations=20))
    assert test.evaluate(data).lam == pytest.approx(3.0)


def test_smooth_knn_report(rng):
    data = random_pooled(rng, 6, 6)
    options = TestOptions(kind=TestKind.KNN_SMOOTH, k=2, lam=1.0, permutations=50)
    report = SmoothKNearestNeighbourTest(options).evaluate(data)
    assert (report.k, report.lam) == (2, 1.0)
    assert report.t_stat is not None
    assert 0.0 <= report.statistic <= 2 * 12


def test_smooth_tests_detect_separated_samples(rng):
    data = random_pooled(rng, 15, 15, shift=6.0)
    for test in (SmoothFriedmanRafskyTest(TestOptions(kind=TestKind.FR_SMOOTH, lam=1.0, permutations=99)),
                 SmoothKNearestNeighbourTest(TestOptions(kind=TestKind.KNN_SMOOTH, lam=1.0, permutations=99))):
        report = test.evaluate(data)
        assert report.rejected
        assert report.t_stat < -3.0


def test_baselines_reject_in_upper_tail(rng):
    data = random_pooled(rng, 15, 15, shift=4.0)
    for test in (MMDTest(TestOptions(kind=TestKind.MMD, bandwidth=1.0, permutations=99)),
                 MedianMMDTest(TestOptions(kind=TestKind.MMD_MEDIAN, permutations=99)),
                 EnergyTest(TestOptions(kind=TestKind.ENERGY, permutations=99))):
        report = test.evaluate(data)
        assert report.rejected
        assert report.statistic > 0


def test_mmd_bandwidth_echo(rng):
    data = random_pooled(rng, 5, 5, dim=4)
    assert MMDTest(TestOptions(kind=TestKind.MMD, gamma=0.5, permutations=10)).evaluate(data).bandwidth == 2.0
    median = MedianMMDTest(TestOptions(kind=TestKind.MMD_MEDIAN, permutations=10)).evaluate(data)
    assert median.bandwidth > 0


def test_identical_samples_do_not_reject_smooth_fr():
    rejections = 0
    for seed in range(20):
        points = np.random.default_rng([3, seed]).standard_normal((20, 2))
        data = pool_samples(PointSample.from_array(points), PointSample.from_array(points))
        options = TestOptions(kind=TestKind.FR_SMOOTH, lam=1.0, permutations=99, seed=seed)
        rejections += SmoothFriedmanRafskyTest(options).evaluate(data).rejected
    assert rejections <= 1


def test_far_apart_samples_keep_positive_normal_pvalue(rng):
    data = random_pooled(rng, 100, 100, shift=50.0)
    options = TestOptions(kind=TestKind.KNN_SMOOTH, k=3, lam=1.0, permutations=99)
    report = SmoothKNearestNeighbourTest(options).evaluate(data)
    assert report.t_stat < -38.0
    assert 0.0 < report.p_normal < 1e-300
