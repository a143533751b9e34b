"""Read an icefloe run directory into plain arrays.

Expected layout (all optional pieces may be absent):
    snapshots.csv                 index: file,time_s
    snapshot_XXXXX.csv            x_m,u_mps,h_m,A
    summary.csv                   key,value
    events.csv                    potential activations
    subcycle_trace.csv            time_s,sub,u_min_mps
    subcycle_fields.csv           time_s,sub,x_m,u_mps
    convergence_<scheme>.csv      refinement table

A directory holding only a convergence table is a valid input (the
verification study writes no snapshots).
"""
from __future__ import annotations

import csv
import glob
import os
from dataclasses import dataclass, field

import numpy as np


class ReaderError(Exception):
    """Missing or malformed run-directory contents."""


@dataclass
class RunData:
    directory: str
    snapshots: list              # [(time_s, (n,4) array), ...] sorted by time
    summary: dict
    events: list = field(default_factory=list)
    subcycle_minima: np.ndarray | None = None      # (m, 3) time, sub, u_min
    subcycle_fields: np.ndarray | None = None      # (m, 4) time, sub, x, u
    convergence: list = field(default_factory=list)  # [(scheme, (m,8) array)]

    def nearest_snapshot(self, t: float):
        if not self.snapshots:
            raise ReaderError(f"{self.directory}: no snapshots to select from")
        return min(self.snapshots, key=lambda item: abs(item[0] - t))


def _load_table(path: str, columns: int) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise ReaderError(f"malformed CSV {path}: {exc}") from exc
    if data.size and data.shape[1] != columns:
        raise ReaderError(
            f"malformed CSV {path}: expected {columns} columns, found {data.shape[1]}")
    return data


def _load_summary(path: str) -> dict:
    summary = {}
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["key", "value"]:
        raise ReaderError(f"malformed CSV {path}: expected a key,value table")
    for row in rows[1:]:
        if len(row) != 2:
            raise ReaderError(f"malformed CSV {path}: bad row {row!r}")
        summary[row[0]] = row[1]
    return summary


def _load_events(path: str) -> list:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def read_run(directory: str) -> RunData:
    """Load everything the directory offers; raise if it offers nothing."""
    if not os.path.isdir(directory):
        raise ReaderError(f"{directory}: not a directory")

    index_path = os.path.join(directory, "snapshots.csv")
    summary_path = os.path.join(directory, "summary.csv")
    conv_paths = sorted(glob.glob(os.path.join(directory, "convergence_*.csv")))

    if not os.path.exists(index_path) and not conv_paths:
        raise ReaderError(
            f"{directory}: no run output found (expected snapshots.csv and "
            f"summary.csv, or a convergence_<scheme>.csv table)")

    snapshots = []
    if os.path.exists(index_path):
        with open(index_path, newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        for name, t in rows:
            snap_path = os.path.join(directory, name)
            if not os.path.exists(snap_path):
                raise ReaderError(f"{index_path} lists missing file {name}")
            snapshots.append((float(t), _load_table(snap_path, 4)))
        snapshots.sort(key=lambda item: item[0])

    summary = {}
    if os.path.exists(summary_path):
        summary = _load_summary(summary_path)
    elif snapshots:
        raise ReaderError(f"{directory}: snapshots present but summary.csv missing")

    data = RunData(directory=directory, snapshots=snapshots, summary=summary)

    events_path = os.path.join(directory, "events.csv")
    if os.path.exists(events_path):
        data.events = _load_events(events_path)

    trace_path = os.path.join(directory, "subcycle_trace.csv")
    if os.path.exists(trace_path):
        data.subcycle_minima = _load_table(trace_path, 3)

    fields_path = os.path.join(directory, "subcycle_fields.csv")
    if os.path.exists(fields_path):
        data.subcycle_fields = _load_table(fields_path, 4)

    for path in conv_paths:
        scheme = os.path.basename(path)[len("convergence_"):-len(".csv")]
        data.convergence.append((scheme, _load_conv_table(path)))
    return data


def _load_conv_table(path: str) -> np.ndarray:
    """Rate columns are blank on the coarsest row; blanks read as NaN."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[0] != "cells":
            raise ReaderError(f"malformed CSV {path}: expected a refinement table")
        for row in reader:
            if len(row) != 8:
                raise ReaderError(f"malformed CSV {path}: bad row {row!r}")
            rows.append([float(v) if v != "" else np.nan for v in row])
    return np.asarray(rows)
