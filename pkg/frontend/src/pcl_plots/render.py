"""Figure rendering: time series, Bloch-sphere trajectories, sweeps.

Every renderer is a pure function of CSV content.  Output is written in
both raster (.png) and vector (.svg) form next to the requested stem.
Time axes are labeled in units of the system splitting.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from pcl_plots.csvio import TrajectoryTable, read_sweep, read_trajectory

__all__ = ["render_timeseries", "render_bloch", "render_sweep"]

BLOCH_NORM_TOL = 1e-6

STYLE = {"pcl": {"color": "tab:blue", "label": "phase-coupled"},
         "cl": {"color": "tab:orange", "label": "linear"},
         "": {"color": "tab:blue", "label": "trajectory"}}


def _write(fig, out_stem) -> list:
    out_stem = Path(out_stem)
    out_stem.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for ext in ("png", "svg"):
        target = out_stem.with_suffix(f".{ext}")
        fig.savefig(target, dpi=150)
        written.append(target)
    plt.close(fig)
    return written


def render_timeseries(csv_paths, out_stem) -> list:
    """Two panels, population difference and Bloch norm, one curve per
    model in each input CSV."""
    tables = [read_trajectory(p) for p in csv_paths]
    fig, (ax_z, ax_n) = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    for table in tables:
        for label in table.labels:
            style = STYLE.get(label, {"color": None, "label": label})
            ax_z.plot(table.t, table.column(label, "sz"),
                      color=style["color"], label=style["label"])
            ax_n.plot(table.t, table.column(label, "bloch_norm"),
                      color=style["color"], label=style["label"])
    ax_z.set_ylabel(r"$\bar\sigma_z$")
    ax_n.set_ylabel(r"$|\bar\sigma|$")
    ax_n.set_xlabel(r"$\epsilon_S t$")
    ax_z.legend(loc="best")
    fig.tight_layout()
    return _write(fig, out_stem)


def render_bloch(csv_path, out_stem) -> list:
    """3D trajectory inside the unit sphere with start and end markers.

    Every row must satisfy the physicality bound on the Bloch norm; a
    violating file is rejected rather than silently drawn.
    """
    table = read_trajectory(csv_path)
    fig = plt.figure(figsize=(6.0, 6.0))
    ax = fig.add_subplot(projection="3d")
    u = np.linspace(0.0, 2.0 * np.pi, 24)
    v = np.linspace(0.0, np.pi, 12)
    xs = np.outer(np.cos(u), np.sin(v))
    ys = np.outer(np.sin(u), np.sin(v))
    zs = np.outer(np.ones_like(u), np.cos(v))
    ax.plot_wireframe(xs, ys, zs, color="0.85", linewidth=0.4)
    for label in table.labels:
        sx = table.column(label, "sx")
        sy = table.column(label, "sy")
        sz = table.column(label, "sz")
        norm = np.sqrt(sx**2 + sy**2 + sz**2)
        worst = float(np.max(norm))
        if worst > 1.0 + BLOCH_NORM_TOL:
            raise ValueError(
                f"{table.path}: Bloch norm {worst:.6f} exceeds 1 + "
                f"{BLOCH_NORM_TOL:g}; not a physical trajectory")
        style = STYLE.get(label, {"color": None, "label": label})
        ax.plot(sx, sy, sz, color=style["color"], label=style["label"])
        ax.scatter([sx[0]], [sy[0]], [sz[0]], color="green", marker="o")
        ax.scatter([sx[-1]], [sy[-1]], [sz[-1]], color="red", marker="s")
    ax.set_xlabel(r"$\bar\sigma_x$")
    ax.set_ylabel(r"$\bar\sigma_y$")
    ax.set_zlabel(r"$\bar\sigma_z$")
    ax.set_box_aspect((1, 1, 1))
    ax.legend(loc="upper left")
    return _write(fig, out_stem)


def _member_label(table: TrajectoryTable, index: int) -> str:
    tag = table.meta.get("tag")
    if tag:
        return tag
    for key in ("lambda", "alpha"):
        if key in table.meta:
            return f"{key}={table.meta[key]}"
    return f"member {index + 1}"


def render_sweep(csv_paths, out_stem) -> list:
    """Eigen-populations and entropy vs time, one curve set per member."""
    tables = read_sweep(csv_paths)
    fig, (ax_p, ax_s) = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    cmap = plt.get_cmap("viridis")
    for i, table in enumerate(tables):
        color = cmap(i / max(len(tables) - 1, 1))
        name = _member_label(table, i)
        for label in table.labels:
            ax_p.plot(table.t, table.column(label, "p_plus"),
                      color=color, label=name)
            ax_p.plot(table.t, table.column(label, "p_minus"),
                      color=color, linestyle="--")
            ax_s.plot(table.t, table.column(label, "entropy"),
                      color=color, label=name)
    ax_p.set_ylabel(r"$P_\pm$")
    ax_s.set_ylabel(r"$S_{vN}$")
    ax_s.set_xlabel(r"$\epsilon_S t$")
    ax_s.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _write(fig, out_stem)
