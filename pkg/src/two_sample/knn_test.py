"""k-Nearest-Neighbour Test

Classical directed k-NN cross-count test.
"""

import logging

from ..exceptions import SampleSizeError
from ..geometry import EdgeMode, PooledData, pairwise_distances
from ..inference import Alternative, cross_count, knn_edges
from ..test_management import PreparedStatistic, TestFeature, TestKind, TwoSampleTest

logger = logging.getLogger(__name__)


class KNearestNeighbourTest(TwoSampleTest):
    """Counts edges i -> j, i among the k nearest neighbours of j, joining the two samples."""

    kind = TestKind.KNN
    description = "Cross-count of the directed k-nearest-neighbour graph"
    features = [TestFeature.GRAPH, TestFeature.NEIGHBOURS]

    def validate_input(self, data: PooledData) -> None:
        super().validate_input(data)
        if self.options.k > data.n - 1:
            raise SampleSizeError(f"k={self.options.k} needs at least {self.options.k + 1} pooled points")

    def prepare(self, data: PooledData) -> PreparedStatistic:
        es = pairwise_distances(data.sample, mode=EdgeMode.DIRECTED)
        neighbours = knn_edges(es, self.options.k)
        return PreparedStatistic(
            statistic=lambda labels: cross_count(neighbours, data, labels),
            alternative=Alternative.LESS,
            k=self.options.k,
        )
