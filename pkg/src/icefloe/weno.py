"""Fifth-order WENO reconstruction and derivatives on periodic collocated grids.

Classic smoothness-weighted reconstruction from three quadratic candidate
stencils with optimal linear weights (1/10, 6/10, 3/10).  The Linear mode
freezes the weights at their optimal values, which removes the adaptive
dissipation and exposes the bare fifth-order upstream-central scheme.

Conventions: for a field v of cell values, the Left-biased interface value
at i + 1/2 uses v_{i-2} .. v_{i+2}; the Right-biased one uses
v_{i-1} .. v_{i+3} and is the exact mirror image of Left about the
interface.  Derivatives difference consecutive interface values.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

OPTIMAL_WEIGHTS = (0.1, 0.6, 0.3)
MIN_POINTS = 8


class WenoMode(Enum):
    NONLINEAR = "nonlinear"
    LINEAR = "linear"


class Bias(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class WenoConfig:
    mode: WenoMode = WenoMode.NONLINEAR
    smoothness_eps: float = 1e-6

    def __post_init__(self):
        if not self.smoothness_eps > 0.0:
            raise ValueError(f"smoothness_eps must be positive, got {self.smoothness_eps!r}")


def _reconstruct(v1, v2, v3, v4, v5, config: WenoConfig):
    # Stencil values ordered along the bias direction: v3 is the cell whose
    # downwind interface we reconstruct, v1 the farthest upwind neighbor.
    p0 = (2.0 * v1 - 7.0 * v2 + 11.0 * v3) / 6.0
    p1 = (-v2 + 5.0 * v3 + 2.0 * v4) / 6.0
    p2 = (2.0 * v3 + 5.0 * v4 - v5) / 6.0
    d0, d1, d2 = OPTIMAL_WEIGHTS
    if config.mode is WenoMode.LINEAR:
        return d0 * p0 + d1 * p1 + d2 * p2
    k = 13.0 / 12.0
    b0 = k * (v1 - 2.0 * v2 + v3) ** 2 + 0.25 * (v1 - 4.0 * v2 + 3.0 * v3) ** 2
    b1 = k * (v2 - 2.0 * v3 + v4) ** 2 + 0.25 * (v2 - v4) ** 2
    b2 = k * (v3 - 2.0 * v4 + v5) ** 2 + 0.25 * (3.0 * v3 - 4.0 * v4 + v5) ** 2
    eps = config.smoothness_eps
    a0 = d0 / (eps + b0) ** 2
    a1 = d1 / (eps + b1) ** 2
    a2 = d2 / (eps + b2) ** 2
    return (a0 * p0 + a1 * p1 + a2 * p2) / (a0 + a1 + a2)


def weno5_interface(values, bias: Bias, config: WenoConfig = WenoConfig()) -> float:
    """Reconstruct one interface value from a 5-point stencil.

    values are the five consecutive cell values around the interface:
    (v_{i-2}, .., v_{i+2}) for Left bias, (v_{i-1}, .., v_{i+3}) for Right,
    both targeting the value at i + 1/2.
    """
    v = np.asarray(values, dtype=float)
    if v.shape != (5,):
        raise ValueError(f"expected exactly 5 stencil values, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError("stencil contains non-finite values")
    if bias is Bias.RIGHT:
        v = v[::-1]
    return float(_reconstruct(*v, config))


def _interfaces(v: np.ndarray, bias: Bias, config: WenoConfig) -> np.ndarray:
    """Interface values v̂_{i+1/2} for every i, periodic along the last axis."""
    def sh(k):
        return np.roll(v, -k, axis=-1)

    if bias is Bias.LEFT:
        return _reconstruct(sh(-2), sh(-1), v, sh(1), sh(2), config)
    return _reconstruct(sh(3), sh(2), sh(1), v, sh(-1), config)


def weno_derivative(
    field: np.ndarray, bias: Bias, dx: float, config: WenoConfig = WenoConfig()
) -> np.ndarray:
    """d(field)/dx at cell centers: (v̂_{i+1/2} - v̂_{i-1/2}) / dx, periodic."""
    v = np.asarray(field)
    if v.shape[-1] < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} cells, got {v.shape[-1]}")
    vhat = _interfaces(v, bias, config)
    return (vhat - np.roll(vhat, 1, axis=-1)) / dx


def weno_flux_divergence(
    u: np.ndarray, q: np.ndarray, dx: float, config: WenoConfig = WenoConfig()
) -> np.ndarray:
    """d(u q)/dx at centers via global Lax-Friedrichs splitting, periodic.

    f = u q splits into f± = (f ± alpha q)/2 with alpha = max|u| over the
    grid; f+ reconstructs Left-biased, f- Right-biased.
    """
    u = np.asarray(u)
    q = np.asarray(q)
    if u.shape != q.shape:
        raise ValueError(f"u and q must be collocated, got {u.shape} vs {q.shape}")
    if u.shape[-1] < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} cells, got {u.shape[-1]}")
    f = u * q
    alpha = np.max(np.abs(u))
    fplus = 0.5 * (f + alpha * q)
    fminus = 0.5 * (f - alpha * q)
    fhat = _interfaces(fplus, Bias.LEFT, config) + _interfaces(fminus, Bias.RIGHT, config)
    return (fhat - np.roll(fhat, 1, axis=-1)) / dx
