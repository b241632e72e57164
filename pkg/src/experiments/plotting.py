"""Plotting Module

SVG figures of the experiment outputs. The Agg backend and a fixed SVG hash
salt with no date metadata keep the written bytes reproducible.
"""

import logging
from pathlib import Path
from typing import Dict, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

logger = logging.getLogger(__name__)

SVG_HASH_SALT = "graphtest"


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"Wrote {path}")
    return path


def save_scatter_svg(path: Union[str, Path], data: np.ndarray, generated: np.ndarray,
                     title: str = "") -> Path:
    """Scatter of data points against generated points (first two coordinates)."""
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(data[:, 0], data[:, 1], s=6, label="data")
    ax.scatter(generated[:, 0], generated[:, 1], s=6, label="generated")
    ax.set_title(title)
    ax.legend(loc="best")
    return _save(fig, path)


def save_line_svg(path: Union[str, Path], x: Sequence[float], series: Dict[str, Sequence[float]],
                  xlabel: str = "", ylabel: str = "") -> Path:
    """One polyline per named series over a shared x axis."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, values in series.items():
        ax.plot(x, values, marker="o" if len(x) < 20 else None, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(series) > 1:
        ax.legend(loc="best", fontsize="small")
    return _save(fig, path)


def save_power_svg(path: Union[str, Path], table: pd.DataFrame) -> Path:
    """Power against dimension, one line per (test, gamma) cell."""
    dims = sorted(table["dim"].unique())
    series = {}
    for (test, gamma), group in table.groupby(["test", "gamma"], dropna=False, sort=False):
        label = test if pd.isna(gamma) else f"{test} gamma={gamma:g}"
        series[label] = group.set_index("dim").loc[dims, "power"].to_numpy()
    return save_line_svg(path, dims, series, xlabel="dimension", ylabel="power")
