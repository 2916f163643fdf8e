"""Matplotlib figure builders. Deterministic: Agg backend, fixed dpi, and a
style seed that only permutes the color cycle."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 110
BASE_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def palette(style_seed: int) -> list[str]:
    order = np.random.default_rng(style_seed).permutation(len(BASE_COLORS))
    return [BASE_COLORS[i] for i in order]


def _new_fig(width=7.0, height=4.2):
    return plt.subplots(
        figsize=(width, height), dpi=DPI, constrained_layout=True
    )


def save(fig, path):
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def check_series_figure(check_id: str, series: dict, style_seed: int = 0):
    """Both sides and the ratio of one monitored inequality against time."""
    colors = palette(style_seed)
    fig, (ax1, ax2) = plt.subplots(
        2, 1, figsize=(7.0, 5.4), dpi=DPI, sharex=True, constrained_layout=True
    )
    t = series["t"]
    ax1.plot(t, series["lhs"], color=colors[0], label="measured side")
    ax1.plot(t, series["rhs"], color=colors[1], linestyle="--", label="bound side")
    ax1.set_ylabel("value")
    ax1.legend(loc="best", fontsize=8)
    ax1.set_title(f"{check_id}  (grid {series['meta'].get('grid_n', '?')}, "
                  f"kappa {series['meta'].get('kappa', '?')})", fontsize=10)
    ax2.plot(t, series["ratio"], color=colors[2])
    ax2.set_ylabel("ratio")
    ax2.set_xlabel("t")
    sup = float(np.max(series["ratio"])) if len(series["ratio"]) else 0.0
    ax2.axhline(sup, color=colors[2], alpha=0.3, linestyle=":")
    ax2.text(0.99, 0.95, f"sup ratio = {sup:.4g}", ha="right", va="top",
             transform=ax2.transAxes, fontsize=8)
    return fig


def osgood_overlay_figure(doc: dict, style_seed: int = 0):
    """Twin-run difference growth F(t) under its fitted comparison envelope."""
    colors = palette(style_seed)
    fig, ax = _new_fig()
    t = np.asarray(doc["times"])
    ax.plot(t, doc["F"], color=colors[0], label="F(t)")
    if "eta" in doc:
        ax.plot(doc["eta_times"], doc["eta"], color=colors[1], linestyle="--",
                label=f"envelope (C = {doc.get('fitted_constant'):.3g})")
    if "tail_bound" in doc:
        ax.plot(t, doc["tail_bound"], color=colors[3], linestyle=":",
                label="band-truncation tail")
    pert = doc.get("perturbation")
    title = "twin-run difference growth"
    if pert:
        title += (f"  [{pert['target']} band {pert['band']}, "
                  f"delta {pert['delta']:.1e}]")
    ax.set_title(title, fontsize=10)
    ax.set_xlabel("t")
    ax.set_yscale("symlog", linthresh=1e-16)
    ax.legend(loc="best", fontsize=8)
    return fig


def decay_fit_figure(doc: dict, style_seed: int = 0):
    """Initial-gap decay against the cutoff with a least-squares refit.

    Returns (figure, refit_slope); the refit cross-checks the slope stored
    by the harness.
    """
    colors = palette(style_seed)
    fig, ax = _new_fig()
    cutoffs = np.asarray(doc["cutoffs"], dtype=float)
    iota = np.asarray(doc["iota"], dtype=float)
    logs = np.log2(iota)
    refit = float(np.polyfit(cutoffs, logs, 1)[0])
    ax.plot(cutoffs, logs, "o", color=colors[0], label="log2 initial gap")
    line = np.polyval(np.polyfit(cutoffs, logs, 1), cutoffs)
    ax.plot(cutoffs, line, color=colors[1],
            label=f"refit slope {refit:.3f} (harness {doc['slope']:.3f})")
    ax.plot(cutoffs, np.log2(np.asarray(doc["sup_gap"])), "s--", color=colors[2],
            label="log2 sup gap over run")
    ax.set_xlabel("truncation cutoff")
    ax.set_ylabel("log2 gap")
    ax.set_title("truncation-approximation decay", fontsize=10)
    ax.legend(loc="best", fontsize=8)
    return fig, refit


def normalized_field_matrix(values: np.ndarray) -> np.ndarray:
    """Image matrix shown by the heatmap: axis 1 of the data runs along the
    image x-axis (transposed, origin lower)."""
    return np.asarray(values).T


def field_heatmap_figure(values: np.ndarray, meta: dict, style_seed: int = 0):
    fig, ax = _new_fig(6.2, 5.2)
    vmax = float(np.abs(values).max())
    if vmax == 0.0:
        vmax = 1.0  # uniform zero field keeps a symmetric range
    period = float(meta.get("period", 2.0 * math.pi))
    im = ax.imshow(
        normalized_field_matrix(values), origin="lower",
        extent=[0.0, period, 0.0, period], vmin=-vmax, vmax=vmax, cmap="RdBu_r",
    )
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_title(f"{meta.get('field', 'field')}  t = {meta.get('time', 0.0):.4g}",
                 fontsize=10)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    return fig
