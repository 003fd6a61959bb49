"""Static SVG figures: P-delta overlays with EPAC areas, and trajectories.

Output is byte-for-byte reproducible: the SVG hash salt is fixed and the
date stamp is dropped.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .epac import EpacScenario  # noqa: E402
from .sim import Trajectory  # noqa: E402

STYLE = {
    "svg.hashsalt": "vsg-cl",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "legend.fontsize": 8,
    "legend.frameon": False,
}

COLORS = {
    "none": "0.45",
    "angle-priority": "tab:orange",
    "d-priority": "tab:green",
    "q-priority": "tab:blue",
    "adaptive": "tab:red",
}


def _color(name: str) -> str:
    return COLORS.get(name.split(":")[0], "tab:purple")


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_trajectories(trajs: Mapping[str, Trajectory], path) -> Path:
    """Power angle, current magnitude and grid voltage against time."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(3, 1, figsize=(6.4, 6.0), sharex=True)
        for name, tr in trajs.items():
            c = _color(name)
            axes[0].plot(tr["t"], tr["delta"], color=c, label=name)
            axes[1].plot(tr["t"], tr["imag"], color=c, label=name)
            axes[2].plot(tr["t"], tr["vg"], color=c, label=name)
        axes[0].set_ylabel("delta (rad)")
        axes[1].set_ylabel("|i| (pu)")
        axes[2].set_ylabel("v_grid (pu)")
        axes[2].set_xlabel("t (s)")
        axes[0].legend(loc="best")
        fig.tight_layout()
        return _save(fig, path)


def plot_pdelta(
    scenarios: Mapping[str, EpacScenario],
    path,
    delta_c: Mapping[str, float] | None = None,
    upper: float = math.pi,
    n: int = 721,
) -> Path:
    """Pre/post and during-fault curves per strategy, areas shaded at ``delta_c``."""
    grid = np.linspace(0.0, upper, n)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        p_m = None
        for name, sc in scenarios.items():
            c = _color(name)
            post = np.array([sc.curve_post(d) for d in grid])
            fault = np.array([sc.curve_fault(d) for d in grid])
            ax.plot(grid, post, color=c, label=f"{name}")
            ax.plot(grid, fault, color=c, linestyle="--", linewidth=0.9)
            p_m = sc.p_m
            if delta_c and name in delta_c:
                dc = delta_c[name]
                acc = (grid >= sc.delta_0) & (grid <= dc)
                dec = (grid >= dc) & (grid <= min(sc.delta_u, upper))
                ax.fill_between(grid, fault, p_m, where=acc, color=c, alpha=0.18, linewidth=0)
                ax.fill_between(grid, p_m, post, where=dec, color=c, alpha=0.08, linewidth=0)
        if p_m is not None:
            ax.axhline(p_m, color="k", linewidth=0.8, linestyle=":")
        ax.set_xlabel("delta (rad)")
        ax.set_ylabel("P_e (pu)")
        ax.set_xlim(0.0, upper)
        ax.legend(loc="best")
        fig.tight_layout()
        return _save(fig, path)


def plot_curves(rows_by_strategy: Mapping[str, list], path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for name, rows in rows_by_strategy.items():
            ax.plot([r.delta for r in rows], [r.pe for r in rows], color=_color(name), label=name)
        ax.set_xlabel("delta (rad)")
        ax.set_ylabel("P_e (pu)")
        ax.legend(loc="best")
        fig.tight_layout()
        return _save(fig, path)
