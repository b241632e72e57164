"""Marginals Module

Edge-marginal vectors shared by the smoothed k-NN and Friedman-Rafsky models.
"""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..exceptions import ParameterError
from ..geometry import EdgeMode

logger = logging.getLogger(__name__)

BUDGET_TOLERANCE = 1e-6


class MarginalVector(BaseModel):
    """Per-edge inclusion probabilities mu(d / lambda), aligned with an edge system."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    lam: float = Field(gt=0)
    mode: EdgeMode
    budget: float

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def budget_error(self) -> float:
        """Absolute difference between the total mass and the edge budget m."""
        return abs(self.total - self.budget)


def require_temperature(lam: float) -> float:
    """Validate a temperature and return it as a float."""
    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0:
        raise ParameterError(f"Temperature lambda must be a positive finite number, got {lam}")
    return lam


def make_marginals(values: np.ndarray, lam: float, mode: EdgeMode, budget: float,
                   check_budget: bool = True) -> MarginalVector:
    """Clip round-off outside [0, 1], freeze and wrap a marginal vector."""
    values = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    values.setflags(write=False)
    marginals = MarginalVector(values=values, lam=lam, mode=mode, budget=float(budget))
    error = marginals.budget_error()
    if check_budget and error > BUDGET_TOLERANCE * max(1.0, budget):
        logger.warning(f"Marginal mass {marginals.total:.12g} differs from budget {budget} by {error:.3g}")
    return marginals
