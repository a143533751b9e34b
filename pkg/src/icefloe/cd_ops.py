"""Second-order centered operators on the staggered C-grid.

Velocity lives on vertices (n + 1 slots), scalars at cell centers (n slots).
Periodic indexing wraps; the extra vertex slot mirrors slot 0 so that
telescoping flux sums cancel bitwise.  Dirichlet runs pin boundary fluxes to
zero and extend center fields one-sidedly.

All operators accept a leading batch dimension on the differenced argument.
"""
from __future__ import annotations

import numpy as np

from .model import Boundary


def _check_sizes(n_last: int, minimum: int = 2):
    if n_last < minimum:
        raise ValueError(f"need at least {minimum} entries along the last axis, got {n_last}")


def vertex_from_center(q_center: np.ndarray, boundary: Boundary) -> np.ndarray:
    """Average a center field onto vertices: n -> n + 1 along the last axis.

    Interior vertex i takes (q_{i-1} + q_i)/2.  Periodic wraps across the
    seam and copies the result to the mirror slot; Dirichlet copies the
    adjacent center one-sidedly.
    """
    q = np.asarray(q_center)
    _check_sizes(q.shape[-1])
    interior = 0.5 * (q[..., :-1] + q[..., 1:])
    if boundary is Boundary.PERIODIC:
        seam = 0.5 * (q[..., -1:] + q[..., :1])
        return np.concatenate([seam, interior, seam], axis=-1)
    return np.concatenate([q[..., :1], interior, q[..., -1:]], axis=-1)


def cd_center_gradient(u_vertex: np.ndarray, dx: float) -> np.ndarray:
    """du/dx at centers from vertex values: (u_{i+1} - u_i)/dx, n + 1 -> n."""
    u = np.asarray(u_vertex)
    _check_sizes(u.shape[-1])
    return (u[..., 1:] - u[..., :-1]) / dx


def cd_vertex_divergence(sigma_center: np.ndarray, dx: float, boundary: Boundary) -> np.ndarray:
    """dsigma/dx at vertices from center values: (s_i - s_{i-1})/dx, n -> n + 1.

    Periodic wraps at the seam and mirrors slot 0 into the last slot;
    Dirichlet leaves zeros at the boundary vertices (the momentum equation
    is replaced by the pinned condition there).
    """
    s = np.asarray(sigma_center)
    _check_sizes(s.shape[-1])
    interior = (s[..., 1:] - s[..., :-1]) / dx
    if boundary is Boundary.PERIODIC:
        seam = (s[..., :1] - s[..., -1:]) / dx
        return np.concatenate([seam, interior, seam], axis=-1)
    zero = np.zeros_like(s[..., :1])
    return np.concatenate([zero, interior, zero], axis=-1)


def cd_transport_divergence(
    u_vertex: np.ndarray, q_center: np.ndarray, dx: float, boundary: Boundary
) -> np.ndarray:
    """d(u q)/dx at centers: vertex fluxes u_i (q at vertex i), differenced.

    The vertex value of q comes from vertex_from_center.  Dirichlet pins the
    boundary fluxes to exactly zero, which makes the first and last cells
    one-sided; periodic telescoping is exact because the mirror slot carries
    a bitwise copy of the seam flux.
    """
    u = np.asarray(u_vertex)
    q = np.asarray(q_center)
    if u.shape[-1] != q.shape[-1] + 1:
        raise ValueError(
            f"staggered sizes disagree: u has {u.shape[-1]} slots for {q.shape[-1]} cells"
        )
    flux = u * vertex_from_center(q, boundary)
    if boundary is Boundary.DIRICHLET:
        flux = flux.copy()
        flux[..., 0] = 0.0
        flux[..., -1] = 0.0
    return (flux[..., 1:] - flux[..., :-1]) / dx
