"""Diagnostics Module

Normality of the standardized permutation null of the smoothed statistics as
a function of the temperature, and agreement of the normal-approximation
p-value with the permutation p-value.
"""

import asyncio
import logging
from functools import partial
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator
from scipy.stats import kstest, spearmanr

from ..config import Settings
from ..exceptions import ParameterError
from ..geometry import EdgeMode, pairwise_distances, pool_samples
from ..inference import (
    knn_marginals,
    normal_pvalue,
    normality_terms,
    null_moments,
    permutation_null,
    pvalue_from_null,
    st_marginals,
    symmetrized_weights,
    t_statistic,
)
from ..orchestrator import ExperimentOrchestrator, UnitIndex
from ..test_management import TestKind
from .datasets import MAX_SEED, two_moons

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["lambda", "replicates", "ks_distance", "null_mean", "null_variance", "spearman_rho",
                   "relative_bound"]
PAIR_COLUMNS = ["lambda", "replicate", "t_stat", "p_normal", "p_permutation", "ks_distance"]


class DiagnosticsConfig(BaseModel):
    """Two-moons null diagnostics: X1 at ``noise``, X2 at ``alternative_noise``."""

    n: int = Field(default=256, ge=8)
    lambdas: List[float] = Field(default_factory=lambda: [10.0, 1.0, 0.05])
    test: TestKind = TestKind.FR_SMOOTH
    k: int = Field(default=3, ge=1)
    noise: float = Field(default=0.05, ge=0)
    alternative_noise: float = Field(default=0.05, ge=0)
    replicates: int = Field(default=20, ge=1)
    permutations: int = Field(default=1000, ge=1)
    seed: int = 0

    @field_validator("lambdas")
    @classmethod
    def _positive(cls, value: List[float]) -> List[float]:
        if not value or any(lam <= 0 for lam in value):
            raise ValueError("lambdas must be a non-empty list of positive temperatures")
        if len(set(value)) != len(value):
            raise ValueError("lambdas must be distinct")
        return value

    @field_validator("test")
    @classmethod
    def _smoothed(cls, value: TestKind) -> TestKind:
        if value not in (TestKind.FR_SMOOTH, TestKind.KNN_SMOOTH):
            raise ValueError(f"diagnostics need a smoothed test, got {value.value}")
        return value


def _replicate(cfg: DiagnosticsConfig, rng: np.random.Generator, unit: UnitIndex) -> List[dict]:
    n1 = cfg.n // 2
    n2 = cfg.n - n1
    data = pool_samples(two_moons(n1, cfg.noise, rng), two_moons(n2, cfg.alternative_noise, rng))
    permutation_seed = int(rng.integers(MAX_SEED))
    smooth_fr = cfg.test is TestKind.FR_SMOOTH
    es = pairwise_distances(data.sample, mode=EdgeMode.UNDIRECTED if smooth_fr else EdgeMode.DIRECTED)

    records = []
    for lam in cfg.lambdas:
        if smooth_fr:
            mu, m = st_marginals(es, lam), data.n - 1
        else:
            mu, m = knn_marginals(es, lam, cfg.k), cfg.k * data.n
        moments = null_moments(mu, es, data.n1, data.n2, m)

        def statistic(labels: np.ndarray) -> float:
            return float(es.crossing(labels) @ mu.values)

        observed = statistic(data.labels)
        null = permutation_null(statistic, data, cfg.permutations, permutation_seed)
        t = t_statistic(observed, moments)
        standardized = (null - moments.mean) / moments.std
        bound = normality_terms(symmetrized_weights(mu, es)).relative_bound(moments.std)
        records.append({
            "lambda": lam,
            "replicate": unit[0],
            "t_stat": t,
            "p_normal": normal_pvalue(t),
            "p_permutation": pvalue_from_null(observed, null),
            "ks_distance": float(kstest(standardized, "norm").statistic),
            "standardized_mean": float(standardized.mean()),
            "standardized_variance": float(standardized.var()),
            "relative_bound": bound,
        })
    return records


def _summarize(frame: pd.DataFrame, lambdas: List[float]) -> pd.DataFrame:
    rows = []
    for lam in lambdas:
        group = frame[frame["lambda"] == lam]
        rho = np.nan
        if len(group) > 1:
            rho = float(spearmanr(group["p_normal"], group["p_permutation"])[0])
        rows.append({
            "lambda": lam,
            "replicates": len(group),
            "ks_distance": float(group["ks_distance"].mean()),
            "null_mean": float(group["standardized_mean"].mean()),
            "null_variance": float(group["standardized_variance"].mean()),
            "spearman_rho": rho,
            "relative_bound": float(group["relative_bound"].mean()),
        })
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


async def run_null_diagnostics(cfg: DiagnosticsConfig,
                               orchestrator: ExperimentOrchestrator) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Run the diagnostics on a started orchestrator, one unit per replicate dataset.

    Returns:
        (summary table per lambda, per-replicate p-value pairs)
    """
    logger.info(f"Null diagnostics: {cfg.test.value}, {len(cfg.lambdas)} temperatures, "
                f"{cfg.replicates} replicates")
    units = [(r,) for r in range(cfg.replicates)]
    results = await orchestrator.run_units(partial(_replicate, cfg), units, cfg.seed)
    frame = pd.DataFrame([record for records in results for record in records])
    pairs = pd.concat([frame[frame["lambda"] == lam] for lam in cfg.lambdas])[PAIR_COLUMNS]
    return _summarize(frame, cfg.lambdas), pairs.reset_index(drop=True)


def null_diagnostics(cfg: DiagnosticsConfig,
                     settings: Optional[Settings] = None) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Blocking wrapper that runs the diagnostics on a temporary orchestrator."""
    if cfg.permutations < 2:
        raise ParameterError("diagnostics need at least 2 permutations")

    async def _run() -> Tuple[pd.DataFrame, pd.DataFrame]:
        async with ExperimentOrchestrator(settings, name="NullDiagnostics") as orchestrator:
            return await run_null_diagnostics(cfg, orchestrator)

    return asyncio.run(_run())
