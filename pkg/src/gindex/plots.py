"""Figure rendering for the report-emitting command paths."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .benchmark import GIndexReport, SweepPoint

_SWEEP_LABELS = {
    "samples": "training samples",
    "compute": "compute power (teraFLOPS)",
    "theta": "performance",
}


def save_sweep_figure(points: Sequence[SweepPoint], sweep: str, path: str) -> None:
    """Sweep curve with the uneven-split band shaded around it."""
    xs = [p.sweep_value for p in points]
    fig, ax = plt.subplots(figsize=(7.0, 4.4))
    ax.fill_between(
        xs,
        [p.band_low for p in points],
        [p.band_high for p in points],
        alpha=0.25,
        color="tab:blue",
        linewidth=0,
        label="uneven-split range",
    )
    ax.plot(xs, [p.g_index for p in points], color="tab:blue", label="even split")
    ax.set_xlabel(_SWEEP_LABELS.get(sweep, sweep))
    ax.set_ylabel("g-index")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_divergence_heatmap(
    matrix: np.ndarray, path: str, labels: Sequence[str] | None = None
) -> None:
    """Pairwise-divergence heatmap; near-zero blocks mark task domains."""
    fig, ax = plt.subplots(figsize=(6.4, 5.6))
    image = ax.imshow(matrix, vmin=0.0, vmax=1.0, cmap="viridis")
    fig.colorbar(image, ax=ax, label="divergence")
    if labels is not None and len(labels) <= 40:
        ax.set_xticks(range(len(labels)))
        ax.set_yticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=90, fontsize=6)
        ax.set_yticklabels(labels, fontsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_report_figure(report: GIndexReport, path: str) -> None:
    """Per-task contribution against performance, shaded by domain distance."""
    thetas = [t.theta for t in report.per_task]
    tcs = [t.tc for t in report.per_task]
    omegas = [t.omega for t in report.per_task]
    fig, ax = plt.subplots(figsize=(7.0, 4.4))
    scatter = ax.scatter(thetas, tcs, c=omegas, vmin=0.0, vmax=1.0, cmap="plasma")
    fig.colorbar(scatter, ax=ax, label="domain distance")
    ax.axhline(report.g_index, color="gray", linestyle="--", linewidth=1,
               label=f"g-index = {report.g_index:.3f}")
    ax.set_xlabel("performance")
    ax.set_ylabel("task contribution")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
