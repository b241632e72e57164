"""
Test Management Module

Provides the two-sample test abstraction: options, reports, the evaluation
template shared by every test and the registry used by the orchestrator.
"""

from .test_base import (
    PreparedStatistic,
    TestFeature,
    TestKind,
    TestOptions,
    TestReport,
    TwoSampleTest,
)
from .test_registry import TestRegistry

__version__ = "0.1.0"
__all__ = [
    "PreparedStatistic",
    "TestFeature",
    "TestKind",
    "TestOptions",
    "TestReport",
    "TwoSampleTest",
    "TestRegistry",
]
