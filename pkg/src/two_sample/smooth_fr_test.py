"""Smoothed Friedman-Rafsky Test

Expected cross-count under the Gibbs measure over spanning trees, with its
closed-form permutation moments and normal approximation.
"""

import logging

from ..geometry import EdgeMode, PooledData, pairwise_distances
from ..inference import Alternative, null_moments, st_marginals
from ..test_management import PreparedStatistic, TestFeature, TestKind, TwoSampleTest

logger = logging.getLogger(__name__)


class SmoothFriedmanRafskyTest(TwoSampleTest):
    """Smoothed FR statistic T = sum_e Delta(e) mu_e over spanning-tree marginals."""

    kind = TestKind.FR_SMOOTH
    description = "Spanning-tree marginals at temperature lambda"
    features = [TestFeature.GRAPH, TestFeature.SMOOTHED, TestFeature.NORMAL_APPROXIMATION,
                TestFeature.TEMPERATURE]
    min_sample_size = 2

    def prepare(self, data: PooledData) -> PreparedStatistic:
        lam = self.options.temperature(data.d)
        es = pairwise_distances(data.sample, mode=EdgeMode.UNDIRECTED)
        mu = st_marginals(es, lam)
        moments = null_moments(mu, es, data.n1, data.n2, m=data.n - 1)
        logger.debug(f"fr-smooth at lambda={lam:.4g}: null mean {moments.mean:.6g}, std {moments.std:.6g}")
        return PreparedStatistic(
            statistic=lambda labels: float(es.crossing(labels) @ mu.values),
            alternative=Alternative.LESS,
            moments=moments,
            lam=lam,
        )
