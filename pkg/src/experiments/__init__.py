"""
Experiments Module

Power studies, null-normality diagnostics, the two-moons learning demo and
their figures.
"""

from .datasets import gaussian_alternative, two_moons
from .power import PowerConfig, power_experiment, run_power_experiment, wilson_interval
from .diagnostics import DiagnosticsConfig, null_diagnostics, run_null_diagnostics
from .learning import (
    AdamConfig,
    AdamOptimizer,
    Architecture,
    Generator,
    GeneratorParams,
    LearnConfig,
    LearnResult,
    learn_toy,
    mean_t_statistic,
    objective_and_gradient,
)
from .plotting import save_line_svg, save_power_svg, save_scatter_svg

__all__ = [
    "gaussian_alternative",
    "two_moons",
    "PowerConfig",
    "power_experiment",
    "run_power_experiment",
    "wilson_interval",
    "DiagnosticsConfig",
    "null_diagnostics",
    "run_null_diagnostics",
    "AdamConfig",
    "AdamOptimizer",
    "Architecture",
    "Generator",
    "GeneratorParams",
    "LearnConfig",
    "LearnResult",
    "learn_toy",
    "mean_t_statistic",
    "objective_and_gradient",
    "save_line_svg",
    "save_power_svg",
    "save_scatter_svg",
]
