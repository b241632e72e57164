"""Power Experiment Module

Rejection rates of the tests on the Gaussian alternative as a function of the
dimension and of the smoothing exponent gamma (lambda = d^gamma, and
sigma = d^gamma for the fixed-bandwidth MMD).
"""

import asyncio
import logging
import math
from functools import partial
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator
from scipy.stats import norm

from ..config import Settings
from ..exceptions import ParameterError
from ..geometry import pool_samples
from ..orchestrator import ExperimentOrchestrator, UnitIndex
from ..test_management import TestKind, TestOptions, TestRegistry
from .datasets import MAX_SEED, gaussian_alternative

logger = logging.getLogger(__name__)

GAMMA_TESTS = frozenset({TestKind.FR_SMOOTH, TestKind.KNN_SMOOTH, TestKind.MMD})

POWER_COLUMNS = ["dim", "test", "gamma", "trials", "rejections", "power", "ci_low", "ci_high"]

Cell = Tuple[TestKind, Optional[float]]


class PowerConfig(BaseModel):
    """Grid and sample sizes of a power study (n1 = n2 = n)."""

    dims: List[int] = Field(min_length=1)
    n: int = Field(default=128, ge=2)
    trials: int = Field(default=200, ge=1)
    alpha_level: float = Field(default=0.05, gt=0, lt=1)
    mu_shift: float = 0.0
    sigma_scale: float = Field(default=1.0, gt=0)
    gammas: List[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    k: int = Field(default=3, ge=1)
    tests: List[TestKind] = Field(default_factory=lambda: [
        TestKind.FR, TestKind.FR_SMOOTH, TestKind.KNN, TestKind.KNN_SMOOTH, TestKind.MMD, TestKind.MMD_MEDIAN])
    permutations: int = Field(default=1000, ge=1)
    seed: int = 0

    @field_validator("dims")
    @classmethod
    def _positive_dims(cls, value: List[int]) -> List[int]:
        if any(dim < 1 for dim in value):
            raise ValueError("dims must be positive")
        return value

    @field_validator("gammas")
    @classmethod
    def _unit_gammas(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("gammas must be non-empty")
        if any(not 0.0 <= gamma <= 1.0 for gamma in value):
            raise ValueError("gammas must lie in [0, 1]")
        return value

    def cells(self) -> List[Cell]:
        """(test, gamma) combinations evaluated for every dimension."""
        cells: List[Cell] = []
        for test in self.tests:
            if test in GAMMA_TESTS:
                cells.extend((test, gamma) for gamma in self.gammas)
            else:
                cells.append((test, None))
        return cells


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Args:
        successes: Number of successes
        trials: Number of trials
        level: Confidence level

    Returns:
        (lower, upper) bounds
    """
    if trials < 1 or not 0 <= successes <= trials:
        raise ParameterError(f"Invalid counts: {successes} of {trials}")
    z = norm.ppf(0.5 + level / 2.0)
    p = successes / trials
    denominator = 1.0 + z ** 2 / trials
    center = (p + z ** 2 / (2 * trials)) / denominator
    half = z / denominator * math.sqrt(p * (1.0 - p) / trials + z ** 2 / (4 * trials ** 2))
    return max(0.0, center - half), min(1.0, center + half)


def _trial(cfg: PowerConfig, registry: TestRegistry, rng: np.random.Generator, unit: UnitIndex) -> List[bool]:
    dim = cfg.dims[unit[0]]
    x1, x2 = gaussian_alternative(cfg.n, cfg.n, dim, cfg.mu_shift, cfg.sigma_scale, rng)
    data = pool_samples(x1, x2)
    permutation_seed = int(rng.integers(MAX_SEED))
    rejected = []
    for test, gamma in cfg.cells():
        options = TestOptions(kind=test, k=cfg.k, gamma=gamma, permutations=cfg.permutations,
                              seed=permutation_seed, alpha=cfg.alpha_level)
        rejected.append(registry.create(options).evaluate(data).rejected)
    return rejected


async def run_power_experiment(cfg: PowerConfig, orchestrator: ExperimentOrchestrator) -> pd.DataFrame:
    """Run a power study on a started orchestrator.

    Every trial is one unit (dimension index, trial index) drawing its data and
    permutation seed from its own generator; all cells of a trial share the data.

    Returns:
        One row per (dim, test, gamma) with power and Wilson 95% interval
    """
    cells = cfg.cells()
    units = [(d, t) for d in range(len(cfg.dims)) for t in range(cfg.trials)]
    logger.info(f"Power study: {len(cfg.dims)} dims x {len(cells)} cells x {cfg.trials} trials")
    outcomes = await orchestrator.run_units(partial(_trial, cfg, orchestrator.registry), units, cfg.seed)
    rejections = np.array(outcomes, dtype=int).reshape(len(cfg.dims), cfg.trials, len(cells)).sum(axis=1)

    rows = []
    for d, dim in enumerate(cfg.dims):
        for c, (test, gamma) in enumerate(cells):
            count = int(rejections[d, c])
            low, high = wilson_interval(count, cfg.trials)
            rows.append({
                "dim": dim,
                "test": test.value,
                "gamma": np.nan if gamma is None else gamma,
                "trials": cfg.trials,
                "rejections": count,
                "power": count / cfg.trials,
                "ci_low": low,
                "ci_high": high,
            })
    return pd.DataFrame(rows, columns=POWER_COLUMNS)


def power_experiment(cfg: PowerConfig, settings: Optional[Settings] = None) -> pd.DataFrame:
    """Blocking wrapper that runs the study on a temporary orchestrator."""

    async def _run() -> pd.DataFrame:
        async with ExperimentOrchestrator(settings, name="PowerStudy") as orchestrator:
            return await run_power_experiment(cfg, orchestrator)

    return asyncio.run(_run())
