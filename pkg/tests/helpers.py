"""Shared test utilities: high-order numerical differentiation oracle."""
from __future__ import annotations

import numpy as np


def richardson_derivative(f, x, step, levels: int = 4):
    """Richardson-extrapolated central difference of f at x.

    Builds the classic extrapolation tableau over halved steps; with k
    levels the truncation error is O(step^(2k)).  Works elementwise when f
    maps arrays to arrays.
    """
    rows = []
    for k in range(levels):
        hk = step / 2.0 ** k
        row = [(f(x + hk) - f(x - hk)) / (2.0 * hk)]
        for j in range(1, k + 1):
            factor = 4.0 ** j
            row.append((factor * row[j - 1] - rows[k - 1][j - 1]) / (factor - 1.0))
        rows.append(row)
    return rows[-1][-1]


def observed_order(err_coarse: float, err_fine: float, refinement: float = 2.0) -> float:
    """log-ratio convergence rate between two refinement levels."""
    return float(np.log(err_coarse / err_fine) / np.log(refinement))
