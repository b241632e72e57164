"""Experiment Orchestrator Module

Core orchestrator that owns the worker pool, the test registry and the
dispatch of independent experiment units.
"""

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import Settings
from .exceptions import GraphTestError
from .geometry import PooledData
from .test_management import TestOptions, TestRegistry, TestReport
from .two_sample import default_registry

logger = logging.getLogger(__name__)

UnitIndex = Tuple[int, ...]
UnitTask = Callable[[np.random.Generator, UnitIndex], Any]


def unit_rng(seed: int, unit: UnitIndex) -> np.random.Generator:
    """Generator of one experiment unit, derived from the base seed and the unit index."""
    return np.random.default_rng([seed, *unit])


class ExperimentOrchestrator:
    """Runs tests and experiment units on a shared thread pool."""

    def __init__(self, settings: Optional[Settings] = None, registry: Optional[TestRegistry] = None,
                 name: str = "Orchestrator"):
        """Initialize the orchestrator.

        Args:
            settings: Runtime settings; defaults to ``Settings()``
            registry: Test registry; defaults to all built-in tests
            name: Orchestrator name
        """
        self.name = name
        self.settings = settings or Settings()
        self.registry = registry or default_registry()
        self.running = False
        self.completed_units = 0
        self._executor: Optional[ThreadPoolExecutor] = None

    async def start(self) -> None:
        """Start the orchestrator and its worker pool."""
        self._executor = ThreadPoolExecutor(max_workers=self.settings.workers,
                                            thread_name_prefix="graphtest")
        self.running = True
        logger.info(f"{self.name} started with {self.settings.workers} workers")

    async def stop(self) -> None:
        """Stop the orchestrator, waiting for running units."""
        self.running = False
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None
        logger.info(f"{self.name} stopped")
        logger.debug(f"{self.name} status: {self.get_status()}")

    async def __aenter__(self) -> "ExperimentOrchestrator":
        await self.start()
        return self

    async def __aexit__(self, *exc_info) -> None:
        await self.stop()

    def _require_running(self) -> ThreadPoolExecutor:
        if not self.running or self._executor is None:
            raise GraphTestError(f"{self.name} is not running")
        return self._executor

    async def run_test(self, data: PooledData, options: TestOptions) -> TestReport:
        """Run one test, spreading its permutations over the worker pool.

        Args:
            data: Pooled samples
            options: Test options (kind, parameters, permutations, seed)

        Returns:
            Test report
        """
        executor = self._require_running()
        test = self.registry.create(options)
        logger.info(f"Running {test.name} on n1={data.n1}, n2={data.n2}")
        loop = asyncio.get_running_loop()
        task = partial(test.evaluate, data, workers=self.settings.workers,
                       chunk_size=self.settings.chunk_size)
        try:
            report = await loop.run_in_executor(executor, task)
        except GraphTestError as exc:
            logger.error(f"{test.name} failed: {exc}")
            raise
        self.completed_units += 1
        return report

    async def run_units(self, task: UnitTask, units: Sequence[UnitIndex], seed: int) -> List[Any]:
        """Run independent units concurrently.

        Each unit receives ``default_rng([seed, *unit])`` and its index, so the
        results do not depend on the number of workers or on completion order.

        Args:
            task: Function of (generator, unit index)
            units: Unit indices
            seed: Base seed

        Returns:
            Results in the order of ``units``
        """
        executor = self._require_running()
        loop = asyncio.get_running_loop()
        futures = [loop.run_in_executor(executor, task, unit_rng(seed, tuple(unit)), tuple(unit))
                   for unit in units]
        results = await asyncio.gather(*futures)
        self.completed_units += len(results)
        logger.debug(f"Completed {len(results)} units")
        return list(results)

    def get_status(self) -> Dict[str, Any]:
        """Get orchestrator status."""
        return {
            "orchestrator": self.name,
            "running": self.running,
            "workers": self.settings.workers,
            "completed_units": self.completed_units,
            "registry": self.registry.get_registry_status(),
        }
