"""Headless matplotlib renderers for the report paths.

Figures are drawn on standalone Figure objects (no pyplot state) and written
straight to files next to the delimited outputs.
"""

from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

__all__ = [
    "save_signal_comparison",
    "save_image_panel",
    "save_residual_trace",
    "save_heatmap",
    "save_curve",
]


def save_signal_comparison(path, original=None, degraded=None, reconstruction=None) -> None:
    """Step plots of the 1D pipeline stages that are present."""
    fig = Figure(figsize=(8, 4))
    ax = fig.add_subplot(111)
    if original is not None:
        ax.step(np.arange(1, original.values.size + 1), original.values, where="mid",
                label="original", lw=1.5)
    if degraded is not None:
        ax.plot(np.arange(1, degraded.values.size + 1), degraded.values,
                label="input", alpha=0.7, lw=1.0)
    if reconstruction is not None:
        ax.step(np.arange(1, reconstruction.values.size + 1), reconstruction.values,
                where="mid", label="reconstruction", ls="--", lw=1.2)
    ax.set_xlabel("index")
    ax.set_ylabel("value")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)


def save_image_panel(path, images: dict) -> None:
    """Grayscale panels side by side; ``images`` maps title -> signal."""
    fig = Figure(figsize=(3.2 * len(images), 3.4))
    for i, (title, sig) in enumerate(images.items()):
        ax = fig.add_subplot(1, len(images), i + 1)
        ax.imshow(sig.values, cmap="gray", vmin=0, vmax=1, interpolation="nearest")
        ax.set_title(title, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(path, dpi=130)


def save_residual_trace(path, trace) -> None:
    fig = Figure(figsize=(6, 3.5))
    ax = fig.add_subplot(111)
    ax.semilogy(np.arange(1, len(trace) + 1), np.maximum(trace, 1e-300))
    ax.set_xlabel("iteration")
    ax.set_ylabel("data misfit")
    fig.tight_layout()
    fig.savefig(path, dpi=130)


def save_heatmap(path, col_values, row_values, grid, xlabel, ylabel, title="") -> None:
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot(111)
    im = ax.imshow(np.asarray(grid), aspect="auto", origin="lower", cmap="viridis")
    ax.set_xticks(range(len(col_values)), [f"{v:g}" for v in col_values], fontsize=8)
    ax.set_yticks(range(len(row_values)), [f"{v:g}" for v in row_values], fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title, fontsize=10)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=130)


def save_curve(path, x, y, xlabel, ylabel, logy=False) -> None:
    fig = Figure(figsize=(6, 3.5))
    ax = fig.add_subplot(111)
    if logy:
        ax.semilogy(x, y, marker="o")
    else:
        ax.plot(x, y, marker="o")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
