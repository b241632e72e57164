"""Exceptions Module

Exception hierarchy shared by the geometry, inference and experiment layers.
The CLI maps these classes onto exit codes.
"""

from typing import Optional


class GraphTestError(Exception):
    """Base class for all errors raised by the library."""


class InvalidInputError(GraphTestError, ValueError):
    """Input data is malformed: non-finite values, mismatched dimensions."""


class SampleSizeError(InvalidInputError):
    """Too few points for the requested operation."""


class ParameterError(GraphTestError, ValueError):
    """A numerical parameter (k, lambda, epsilon, ...) is out of range."""


class GraphModeError(ParameterError):
    """An operation received a directed edge system where an undirected one is required, or vice versa."""


class NumericalError(GraphTestError, ArithmeticError):
    """A computation failed numerically."""


class ConditioningError(NumericalError):
    """The grounded Laplacian is numerically singular at the given temperature."""

    def __init__(self, lam: float, detail: str = ""):
        self.lam = lam
        message = f"Grounded Laplacian is singular at lambda={lam!r}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class DegenerateNullError(NumericalError):
    """The permutation null has zero variance."""


class DegenerateBandwidthError(NumericalError):
    """The median heuristic produced a zero bandwidth."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge."""


class TrainingDivergedError(NumericalError):
    """The training loss became non-finite."""

    def __init__(self, step: int, value: Optional[float] = None):
        self.step = step
        self.value = value
        super().__init__(f"Loss became non-finite at step {step} (value={value!r})")


class DataFileError(GraphTestError, OSError):
    """A data file is missing or unreadable."""

    def __init__(self, path: str, reason: str = "file not found"):
        self.path = path
        super().__init__(f"{path}: {reason}")
