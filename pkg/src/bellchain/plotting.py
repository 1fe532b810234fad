"""Render curve and sweep figures to files next to the delimited output.

Figures are non-interactive by design: the Agg backend writes PNGs and
nothing ever opens a window, so the CLI stays usable over ssh and in CI.
The same data is always available in the CSV/JSON output for external
plotting tools.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .inequality import CHCurve, ViolationReport

_BOUND_BAND = dict(color="0.85", zorder=0)


def render_curve_figure(curve: CHCurve, report: ViolationReport, path: str | Path) -> Path:
    """Two stacked panels: the functional against tJ with the classical
    band shaded, and the two propagator channels feeding it."""
    path = Path(path)
    j = curve.params.coupling_j
    tj = curve.t * j

    fig, (ax_top, ax_bot) = plt.subplots(
        2, 1, figsize=(7.0, 5.6), sharex=True, height_ratios=[3, 2]
    )
    ax_top.axhspan(0.0, 1.0, **_BOUND_BAND)
    ax_top.axhline(1.0, color="0.4", lw=0.8, ls="--")
    ax_top.axhline(0.0, color="0.4", lw=0.8, ls="--")
    ax_top.plot(tj, curve.i_ch, lw=1.2, color="C0")
    for start, end in report.violation_intervals:
        ax_top.axvspan(start * j, end * j, color="C3", alpha=0.15, lw=0)
    if report.t_star_numeric is not None:
        ax_top.axvline(report.t_star_numeric * j, color="C3", lw=0.8, ls=":")
    ax_top.set_ylabel("temporal CH functional")
    ax_top.set_title(
        f"N = {curve.params.n_sites},  mu/J = {curve.params.mu / j:g},"
        f"  convention = {curve.convention.value}"
    )

    ax_bot.plot(tj, curve.gnn_abs2, lw=1.0, color="C1", label=r"$|G_{NN}|^2$")
    ax_bot.plot(tj, curve.g1n_abs2, lw=1.0, color="C2", label=r"$|G_{1N}|^2$")
    ax_bot.set_xlabel("tJ")
    ax_bot.set_ylabel("channel weight")
    ax_bot.legend(loc="upper right", frameon=False)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_sweep_figure(cells: list[dict], path: str | Path) -> Path:
    """Overlay the functional for every (N, mu/J) cell of a sweep.

    ``cells`` entries carry ``n_sites``, ``mu_over_j``, ``tj`` and
    ``i_ch`` arrays, as produced by the sweep command.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.5, 4.6))
    ax.axhspan(0.0, 1.0, **_BOUND_BAND)
    ax.axhline(1.0, color="0.4", lw=0.8, ls="--")
    for cell in cells:
        label = f"N={cell['n_sites']}, mu/J={cell['mu_over_j']:g}"
        ax.plot(np.asarray(cell["tj"]), np.asarray(cell["i_ch"]), lw=1.0, label=label)
    ax.set_xlabel("tJ")
    ax.set_ylabel("temporal CH functional")
    ncol = 2 if len(cells) > 6 else 1
    ax.legend(loc="upper right", frameon=False, fontsize=8, ncol=ncol)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
