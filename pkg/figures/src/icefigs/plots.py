"""Figure builders. One function per figure kind, all writing to files.

Rendering is deterministic: fixed figure sizes, the Agg backend, no
timestamps in the output (SVG dates are stripped explicitly).
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .reader import RunData

plt.rcParams["svg.hashsalt"] = "icefigs"

FIELDS = (("u_mps", "u (m/s)", 1), ("h_m", "h (m)", 2), ("A", "A", 3))


def _save(fig, path: str):
    meta = {"Date": None} if path.endswith(".svg") else None
    fig.savefig(path, metadata=meta)
    plt.close(fig)
    return path


def three_panel(data: RunData, t: float, out_dir: str, fmt: str) -> str:
    """Stacked u, h, A line plots at the snapshot nearest to time t."""
    t_snap, table = data.nearest_snapshot(t)
    x_km = table[:, 0] / 1.0e3
    fig, axes = plt.subplots(3, 1, figsize=(6.4, 7.2), sharex=True)
    for ax, (_, label, col) in zip(axes, FIELDS):
        ax.plot(x_km, table[:, col], lw=1.2)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    axes[-1].set_xlabel("x (km)")
    axes[0].set_title(f"t = {t_snap:g} s")
    fig.tight_layout()
    return _save(fig, os.path.join(out_dir, f"panels_{int(round(t_snap)):07d}s.{fmt}"))


def space_time(data: RunData, out_dir: str, fmt: str) -> str:
    """Heatmaps of u, h, A over x and t, one panel per field."""
    times = np.array([t for t, _ in data.snapshots])
    stacks = [np.array([table[:, col] for _, table in data.snapshots])
              for _, _, col in FIELDS]
    x_km = data.snapshots[0][1][:, 0] / 1.0e3
    fig, axes = plt.subplots(1, 3, figsize=(12.0, 3.6))
    for ax, (field_label, stack) in zip(axes, zip([f[1] for f in FIELDS], stacks)):
        im = ax.pcolormesh(x_km, times / 86400.0, stack, shading="nearest")
        ax.set_xlabel("x (km)")
        ax.set_title(field_label)
        fig.colorbar(im, ax=ax)
    axes[0].set_ylabel("t (days)")
    fig.tight_layout()
    return _save(fig, os.path.join(out_dir, f"spacetime.{fmt}"))


def subcycle_trace(data: RunData, out_dir: str, fmt: str) -> str:
    """Velocity minima against the subcycle counter, one line per step."""
    rows = data.subcycle_minima
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for t in np.unique(rows[:, 0]):
        sel = rows[rows[:, 0] == t]
        ax.plot(sel[:, 1], sel[:, 2], lw=1.0, label=f"t = {t:g} s")
    ax.set_xlabel("subcycle")
    ax.set_ylabel("min u (m/s)")
    ax.axhline(0.0, color="k", lw=0.6)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save(fig, os.path.join(out_dir, f"subcycle_trace.{fmt}"))


def subcycle_fields(data: RunData, out_dir: str, fmt: str) -> str:
    """Velocity profiles through the subcycles of the traced steps."""
    rows = data.subcycle_fields
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    steps = np.unique(rows[:, 0])
    for t in steps:
        per_step = rows[rows[:, 0] == t]
        subs = np.unique(per_step[:, 1])
        for i, s in enumerate(subs):
            sel = per_step[per_step[:, 1] == s]
            ax.plot(sel[:, 2] / 1.0e3, sel[:, 3], lw=0.8,
                    alpha=0.3 + 0.7 * i / max(1, len(subs) - 1))
    ax.set_xlabel("x (km)")
    ax.set_ylabel("u (m/s)")
    ax.set_title(f"subcycle sweep, {len(steps)} step(s)")
    fig.tight_layout()
    return _save(fig, os.path.join(out_dir, f"subcycle_fields.{fmt}"))


def convergence_table(scheme: str, table: np.ndarray, out_dir: str, fmt: str) -> str:
    """Log-log error curves plus the printed rate table."""
    fig, (ax, tax) = plt.subplots(
        1, 2, figsize=(9.6, 3.8), gridspec_kw={"width_ratios": [1.1, 1.0]})
    dx_km = table[:, 1] / 1.0e3
    for label, err_col in (("u", 2), ("h", 4), ("A", 6)):
        ax.loglog(dx_km, table[:, err_col], marker="o", label=label)
    ax.invert_xaxis()
    ax.set_xlabel("dx (km)")
    ax.set_ylabel("relative L2 error")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)

    tax.axis("off")
    col_labels = ["cells", "err u", "rate", "err h", "rate", "err A", "rate"]
    cells = []
    for row in table:
        def rate(v):
            return "" if np.isnan(v) else f"{v:.4f}"

        cells.append([f"{int(row[0])}", f"{row[2]:.3e}", rate(row[3]),
                      f"{row[4]:.3e}", rate(row[5]), f"{row[6]:.3e}", rate(row[7])])
    tbl = tax.table(cellText=cells, colLabels=col_labels, loc="center")
    tbl.auto_set_font_size(False)
    tbl.set_fontsize(8)
    tax.set_title(scheme, fontsize=10)
    fig.tight_layout()
    return _save(fig, os.path.join(out_dir, f"convergence_{scheme}.{fmt}"))


def render_run(data: RunData, out_dir: str, fmt: str = "png",
               times: list | None = None) -> list:
    """Produce every figure the directory's contents support."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if data.snapshots:
        if times is None:
            times = [data.snapshots[-1][0]]
        seen = set()
        for t in times:
            path = three_panel(data, t, out_dir, fmt)
            if path not in seen:       # distinct requests may hit one snapshot
                seen.add(path)
                written.append(path)
        if len(data.snapshots) >= 10:
            written.append(space_time(data, out_dir, fmt))
    if data.subcycle_minima is not None and data.subcycle_minima.size:
        written.append(subcycle_trace(data, out_dir, fmt))
    if data.subcycle_fields is not None and data.subcycle_fields.size:
        written.append(subcycle_fields(data, out_dir, fmt))
    for scheme, table in data.convergence:
        written.append(convergence_table(scheme, table, out_dir, fmt))
    return written
