"""CSV output of runs: snapshots, summary, logs.

Every float is written with repr-faithful precision (17 significant digits)
so that reading a snapshot back reproduces the stored state bitwise.  File
contents are fully determined by the run; no timestamps or environment
details leak in.
"""
from __future__ import annotations

import os

import numpy as np

from .model import Grid, Layout, State
from .runloop import RunResult

SNAPSHOT_HEADER = "x_m,u_mps,h_m,A"


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{value:.17g}"
    return str(value)


def snapshot_rows(state: State, grid: Grid) -> np.ndarray:
    """Cell-centered (x, u, h, A) columns; staggered u averaged to centers."""
    if grid.layout is Layout.STAGGERED_C:
        u_c = 0.5 * (state.u[:-1] + state.u[1:])
    else:
        u_c = state.u
    return np.column_stack([grid.x_centers, u_c, state.h, state.a])


def write_snapshot(state: State, grid: Grid, path: str):
    rows = snapshot_rows(state, grid)
    with open(path, "w", newline="") as fh:
        fh.write(SNAPSHOT_HEADER + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_csv(path: str, header: list[str], rows: list):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_run_dir(result: RunResult, spec, grid: Grid, out_dir: str) -> None:
    """Write the complete run directory: snapshots + index, summary, logs."""
    os.makedirs(out_dir, exist_ok=True)

    index_rows = []
    for i, (t, state) in enumerate(result.snapshots):
        name = f"snapshot_{i:05d}.csv"
        write_snapshot(state, grid, os.path.join(out_dir, name))
        index_rows.append((name, t))
    write_csv(os.path.join(out_dir, "snapshots.csv"), ["file", "time_s"], index_rows)

    summary = {
        "scenario": spec.scenario,
        "scheme": spec.scheme.value,
        "integrator": spec.integrator,
        "boundary": spec.boundary.value,
        "cells": grid.n_cells,
        "dx_m": grid.dx,
        "dt_s": spec.dt,
        "horizon_s": spec.horizon,
        "wind_mps": spec.wind,
        "potential": "on" if spec.potential_on else "off",
        "status": result.status,
        "n_steps_done": result.n_steps_done,
        "end_time_s": result.state.time,
        "blowup_time_s": "" if result.blowup_time is None else result.blowup_time,
        **result.extrema,
    }
    write_csv(os.path.join(out_dir, "summary.csv"), ["key", "value"],
              list(summary.items()))

    if result.events:
        keys = ["time", "event", "branch", "lower", "upper", "gamma", "infeasible", "detail"]
        rows = [tuple(ev.get(k, "") for k in keys) for ev in result.events]
        write_csv(os.path.join(out_dir, "events.csv"), keys, rows)

    if result.newton_rows:
        write_csv(
            os.path.join(out_dir, "newton_log.csv"),
            ["step", "time_s", "k", "residual", "lambda"],
            result.newton_rows,
        )

    if result.subcycle_minima:
        write_csv(
            os.path.join(out_dir, "subcycle_trace.csv"),
            ["time_s", "sub", "u_min_mps"],
            result.subcycle_minima,
        )

    if result.subcycle_fields:
        rows = []
        if grid.layout is Layout.STAGGERED_C:
            x = grid.x_u
        else:
            x = grid.x_centers
        for t, s, u in result.subcycle_fields:
            for xi, ui in zip(x, u):
                rows.append((t, s, xi, ui))
        write_csv(
            os.path.join(out_dir, "subcycle_fields.csv"),
            ["time_s", "sub", "x_m", "u_mps"],
            rows,
        )


def write_convergence_csv(rows, path: str):
    """Refinement-study table; rate columns are empty on the coarsest row."""
    out = []
    for r in rows:
        out.append(
            (
                r.n_cells,
                r.dx,
                r.err_u,
                "" if r.rate_u is None else r.rate_u,
                r.err_h,
                "" if r.rate_h is None else r.rate_h,
                r.err_a,
                "" if r.rate_a is None else r.rate_a,
            )
        )
    write_csv(
        path,
        ["cells", "dx_m", "err_u", "rate_u", "err_h", "rate_h", "err_a", "rate_a"],
        out,
    )


def read_snapshot(path: str) -> np.ndarray:
    """Read a snapshot CSV back into an (n, 4) array."""
    return np.loadtxt(path, delimiter=",", skiprows=1)
