"""MMD Tests

Unbiased maximum mean discrepancy with a squared-exponential kernel, at a
fixed bandwidth or at the median-heuristic bandwidth.
"""

import logging

from scipy.spatial.distance import cdist

from ..geometry import PooledData
from ..inference import Alternative, KernelConfig, median_heuristic, mmd_from_kernel
from ..inference.baselines import gaussian_kernel
from ..test_management import PreparedStatistic, TestFeature, TestKind, TwoSampleTest

logger = logging.getLogger(__name__)


class MMDTest(TwoSampleTest):
    """Unbiased MMD^2 with bandwidth from the options (sigma or d^gamma)."""

    kind = TestKind.MMD
    description = "Unbiased MMD with a squared-exponential kernel"
    features = [TestFeature.KERNEL]
    min_sample_size = 2

    def bandwidth(self, data: PooledData) -> KernelConfig:
        return self.options.kernel(data.d)

    def prepare(self, data: PooledData) -> PreparedStatistic:
        cfg = self.bandwidth(data)
        kernel = gaussian_kernel(cdist(data.points, data.points, "sqeuclidean"), cfg)
        return PreparedStatistic(
            statistic=lambda labels: mmd_from_kernel(kernel, labels),
            alternative=Alternative.GREATER,
            bandwidth=cfg.bandwidth,
        )


class MedianMMDTest(MMDTest):
    """Unbiased MMD^2 at the median pairwise pooled distance."""

    kind = TestKind.MMD_MEDIAN
    description = "Unbiased MMD with the median-heuristic bandwidth"

    def bandwidth(self, data: PooledData) -> KernelConfig:
        return median_heuristic(data)
