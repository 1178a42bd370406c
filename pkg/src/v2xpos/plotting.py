"""Static SVG figures for command-line results."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed ids and no timestamp, so identical data gives identical bytes
matplotlib.rcParams["svg.hashsalt"] = "v2xpos"


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def line_plot(path, series: dict, xlabel: str, ylabel: str, logy: bool = False):
    """``series`` maps a legend label to (xs, ys)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (xs, ys) in series.items():
        pts = [(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend(fontsize=8)
    _save(fig, path)


def scatter_plot(path, groups: dict, segments=()):
    """``groups`` maps a label to a list of (x, y) points."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for a, b in segments:
        ax.plot([a[0], b[0]], [a[1], b[1]], color="0.4", lw=2)
    for label, pts in groups.items():
        if pts:
            xs, ys = zip(*pts)
            ax.scatter(xs, ys, label=label)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.legend(fontsize=8)
    _save(fig, path)
