"""Synthetic run directories in the solver's documented CSV formats.

Built by hand on purpose: these tests must run without the solver
installed.
"""
import numpy as np


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def make_run_dir(root, n_snap=3, n_cells=8, extras=False, shuffle_index=False):
    x = (np.arange(n_cells) + 0.5) * 10.0e3
    index = []
    for i in range(n_snap):
        t = 60.0 * i
        name = f"snapshot_{i:05d}.csv"
        u = 1e-3 * np.sin(x / 5e4 + i)
        h = 1.0 + 0.1 * np.cos(x / 8e4 - i)
        a = np.clip(0.9 + 0.05 * np.sin(x / 3e4 + 2 * i), 0.0, 1.0)
        _write(root / name, "x_m,u_mps,h_m,A",
               [(float(xi), float(ui), float(hi), float(ai))
                for xi, ui, hi, ai in zip(x, u, h, a)])
        index.append((name, t))
    if shuffle_index:
        index = index[::-1]
    _write(root / "snapshots.csv", "file,time_s", index)
    _write(root / "summary.csv", "key,value", [
        ("scenario", "custom"), ("scheme", "cd"), ("integrator", "tvrk3"),
        ("status", "completed"), ("n_steps_done", n_snap - 1),
        ("end_time_s", 60.0 * (n_snap - 1)), ("blowup_time_s", ""),
        ("min_h", 0.9), ("max_h", 1.1), ("min_a", 0.85), ("max_a", 0.95),
    ])
    if extras:
        _write(root / "events.csv",
               "time,event,branch,lower,upper,gamma,infeasible,detail",
               [(60.0, "potential_activation", "a_high", 0.0075, 273.12,
                 0.01, "False", "")])
        _write(root / "subcycle_trace.csv", "time_s,sub,u_min_mps",
               [(60.0, s, -1e-4 * s) for s in (1, 2)] +
               [(120.0, s, -2e-4 * s) for s in (1, 2)])
        rows = []
        for s in (1, 2):
            for xi in x[:4]:
                rows.append((60.0, s, float(xi), 1e-3 * s))
        _write(root / "subcycle_fields.csv", "time_s,sub,x_m,u_mps", rows)


def make_convergence_csv(path):
    _write(path, "cells,dx_m,err_u,rate_u,err_h,rate_h,err_a,rate_a", [
        ("50", 40000.0, 5.24e-07, "", 1.35e-11, "", 8.8e-12, ""),
        ("100", 20000.0, 2.18e-08, 4.59, 5.68e-13, 4.56, 4.27e-13, 4.36),
        ("200", 10000.0, 8.33e-10, 4.71, 3.40e-14, 4.06, 2.94e-14, 3.86),
    ])
