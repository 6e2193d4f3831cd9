"""Figure rendering for the benchmark report.

Renders alongside the CSV output: a convergence plot of median errors by
truncation order and a win-rate heatmap over (rank, order) cells. Uses the
Agg backend so rendering works headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import SummaryRow

__all__ = ["render_figures"]


def _convergence_figure(rows: Sequence[SummaryRow], path: Path) -> None:
    orders = sorted({r.order for r in rows})
    approx_med = [np.median([r.approx_error_median for r in rows if r.order == m]) for m in orders]
    taylor_med = [np.median([r.taylor_error_median for r in rows if r.order == m]) for m in orders]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(orders, approx_med, "o-", label="truncated-determinant approximation")
    ax.plot(orders, taylor_med, "s--", label="Taylor truncation")
    ax.set_yscale("log")
    ax.set_xlabel("truncation order m")
    ax.set_ylabel("median relative error")
    ax.set_title("Convergence by truncation order (median over cells)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def _win_rate_figure(rows: Sequence[SummaryRow], path: Path) -> None:
    ranks = sorted({r.rank for r in rows})
    orders = sorted({r.order for r in rows})
    grid = np.full((len(ranks), len(orders)), np.nan)
    for i, k in enumerate(ranks):
        for j, m in enumerate(orders):
            cell = [r.win_rate for r in rows if r.rank == k and r.order == m]
            if cell:
                grid[i, j] = float(np.mean(cell))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    image = ax.imshow(
        grid, origin="lower", aspect="auto", vmin=0.0, vmax=1.0, cmap="viridis"
    )
    ax.set_xticks(range(len(orders)), [str(m) for m in orders])
    ax.set_yticks(range(len(ranks)), [str(k) for k in ranks])
    ax.set_xlabel("truncation order m")
    ax.set_ylabel("perturbation rank k")
    ax.set_title("Win rate of the approximation vs Taylor (mean over dims)")
    fig.colorbar(image, ax=ax, label="win rate")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_figures(
    rows: Sequence[SummaryRow], directory: Path | str, stem: str
) -> list[Path]:
    """Write the report figures next to the delimited output; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    convergence = directory / f"{stem}_convergence.png"
    win_rate = directory / f"{stem}_win_rate.png"
    _convergence_figure(rows, convergence)
    _win_rate_figure(rows, win_rate)
    return [convergence, win_rate]
