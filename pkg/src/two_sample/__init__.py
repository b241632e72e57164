"""Two-Sample Tests Module

Contains the graph, kernel and energy tests and the default registry.
"""

from ..test_management import TestRegistry
from .fr_test import FriedmanRafskyTest
from .knn_test import KNearestNeighbourTest
from .smooth_fr_test import SmoothFriedmanRafskyTest
from .smooth_knn_test import SmoothKNearestNeighbourTest
from .mmd_test import MedianMMDTest, MMDTest
from .energy_test import EnergyTest

BUILTIN_TESTS = [
    FriedmanRafskyTest,
    KNearestNeighbourTest,
    SmoothFriedmanRafskyTest,
    SmoothKNearestNeighbourTest,
    MMDTest,
    MedianMMDTest,
    EnergyTest,
]


def default_registry() -> TestRegistry:
    """Registry with every built-in test."""
    registry = TestRegistry()
    for test_cls in BUILTIN_TESTS:
        registry.register(test_cls)
    return registry


__all__ = [
    'FriedmanRafskyTest',
    'KNearestNeighbourTest',
    'SmoothFriedmanRafskyTest',
    'SmoothKNearestNeighbourTest',
    'MMDTest',
    'MedianMMDTest',
    'EnergyTest',
    'BUILTIN_TESTS',
    'default_registry',
]
