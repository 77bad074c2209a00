"""File-output figure rendering for the reporting commands.

Everything here draws to files through the Agg backend; nothing opens
a window. Each helper takes the already-computed results, so plotting
stays a pure presentation layer.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .estimator import ErrorScalingPoint, EstimationResult


def save_error_curve(points: list[ErrorScalingPoint], path: str | Path) -> Path:
    """Mean relative error versus data length, with one-sigma bars."""
    path = Path(path)
    n = np.array([p.n_samples for p in points])
    mean = np.array([p.mean_rel_error for p in points])
    std = np.array([p.std_rel_error for p in points])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(n, mean, yerr=std, marker="o", capsize=3)
    ax.set_yscale("log")
    ax.set_xlabel("data length N")
    ax.set_ylabel("relative identification error")
    ax.grid(True, which="both", alpha=0.3)
    if points:
        ax.set_title(f"{points[0].repeats} repeats, seed {points[0].seed}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_estimate_chart(
    result: EstimationResult,
    truth: tuple[float, ...] | None,
    path: str | Path,
) -> Path:
    """Estimated parameters next to the true values when those are known."""
    path = Path(path)
    idx = np.arange(1, len(result.theta_hat) + 1)
    width = 0.38
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.bar(idx - width / 2, result.theta_hat, width, label="estimate")
    if truth is not None:
        ax.bar(idx + width / 2, truth, width, label="true")
    ax.set_xticks(idx)
    ax.set_xticklabels([f"$\\theta_{{{i}}}$" for i in idx])
    ax.set_ylabel("parameter value")
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.legend()
    ax.set_title(f"relative error {result.relative_error:.3e}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
