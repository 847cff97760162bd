"""Figure rendering for training and sweep reports.

Every figure is written next to its TSV so reports are self-contained.
Rendering is deterministic (fixed size, dpi and metadata), which keeps
repeated runs byte-identical.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_SAVE_OPTS = {"dpi": 150, "metadata": {"Software": "ultradense"}}


def plot_cost_curve(cost_history, path, title: str = "training cost") -> None:
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(range(len(cost_history)), cost_history, lw=1.0)
    ax.set_xlabel("iteration")
    ax.set_ylabel("sampled cost")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(str(path), **_SAVE_OPTS)
    plt.close(fig)


def plot_sweep_curve(curve, path, xlabel: str, title: str = "") -> None:
    sizes = [s for s, _ in curve]
    taus = [t for _, t in curve]
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(sizes, taus, marker="o", lw=1.0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("Kendall tau")
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(str(path), **_SAVE_OPTS)
    plt.close(fig)
