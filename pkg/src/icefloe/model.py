"""Shared model vocabulary: physical parameters, grids, state fields."""
from __future__ import annotations

from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

MIN_CELLS = 8


class Layout(Enum):
    """Placement of fields on the mesh."""

    COLLOCATED = "collocated"
    STAGGERED_C = "staggered"


class Boundary(Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"


class Scheme(Enum):
    """Spatial discretization family."""

    CD = "cd"
    WENO = "weno"
    WENO_LINEAR = "weno_linear"

    @property
    def layout(self) -> Layout:
        """Grid layout the scheme is defined on."""
        return Layout.STAGGERED_C if self is Scheme.CD else Layout.COLLOCATED


@dataclass(frozen=True)
class PhysParams:
    """Physical constants of the momentum and rheology closures (SI units)."""

    rho_ice: float = 900.0      # kg m^-3
    rho_air: float = 1.3        # kg m^-3
    rho_water: float = 1026.0   # kg m^-3
    c_da: float = 1.2e-3        # air drag coefficient
    c_dw: float = 5.5e-3        # water drag coefficient
    p_star: float = 27.5e3      # N m^-2, strength scale
    conc_c: float = 20.0        # concentration sensitivity
    ellipse_e: float = 2.0      # yield-ellipse aspect ratio
    eps1: float = 1e-10         # m^2 s^-2, water-drag regularizer
    eps2: float = 1e-22         # s^-2, strain-rate regularizer
    delta_min: float = 2e-9     # s^-1, viscosity saturation scale

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0.0:
                raise ValueError(f"{f.name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D mesh of n_cells cells of width dx.

    Centers sit at (i + 1/2) dx.  On the staggered layout velocity lives on
    the n_cells + 1 vertices i dx; under periodic boundaries the last vertex
    mirrors the first.  On the collocated layout everything lives at centers.
    """

    n_cells: int
    dx: float
    layout: Layout
    boundary: Boundary

    @property
    def length(self) -> float:
        return self.n_cells * self.dx

    @property
    def n_u(self) -> int:
        """Number of velocity storage slots."""
        if self.layout is Layout.STAGGERED_C:
            return self.n_cells + 1
        return self.n_cells

    @property
    def x_centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def x_u(self) -> np.ndarray:
        """Coordinates of the velocity slots."""
        if self.layout is Layout.STAGGERED_C:
            return np.arange(self.n_cells + 1) * self.dx
        return self.x_centers


def make_grid(n_cells: int, dx: float, layout: Layout, boundary: Boundary) -> Grid:
    """Validated Grid constructor."""
    if int(n_cells) != n_cells or n_cells < MIN_CELLS:
        raise ValueError(f"n_cells must be an integer >= {MIN_CELLS}, got {n_cells!r}")
    if not dx > 0.0:
        raise ValueError(f"dx must be strictly positive, got {dx!r}")
    if not np.isfinite(dx):
        raise ValueError(f"dx must be finite, got {dx!r}")
    return Grid(int(n_cells), float(dx), layout, boundary)


@dataclass(frozen=True)
class State:
    """Prognostic fields at one time level.

    u has grid.n_u entries, h and a have grid.n_cells.  Arrays are owned by
    the run that created them; steps build new States rather than mutating.
    """

    time: float
    u: np.ndarray
    h: np.ndarray
    a: np.ndarray


@dataclass(frozen=True)
class RheologyFields:
    """Per-cell derived rheology quantities (all arrays of length n_cells)."""

    delta: np.ndarray     # regularized strain measure, s^-1
    zeta: np.ndarray      # bulk viscosity, kg s^-1
    eta: np.ndarray       # shear viscosity, kg s^-1
    pressure: np.ndarray  # ice strength, N m^-2
    sigma: np.ndarray     # stress, N m^-2


@dataclass(frozen=True)
class StateDiagnostic:
    """First problem found by validate_state."""

    field: str
    index: int | None
    reason: str

    def __str__(self):
        where = f" at index {self.index}" if self.index is not None else ""
        return f"{self.field}{where}: {self.reason}"


def validate_state(state: State, grid: Grid) -> StateDiagnostic | None:
    """Check field sizes and finiteness; None when the state is well formed."""
    expected = {"u": grid.n_u, "h": grid.n_cells, "a": grid.n_cells}
    for name, size in expected.items():
        arr = getattr(state, name)
        if arr.ndim != 1 or arr.shape[0] != size:
            return StateDiagnostic(name, None, f"expected shape ({size},), got {arr.shape}")
    for name in ("u", "h", "a"):
        arr = getattr(state, name)
        finite = np.isfinite(arr)
        if not finite.all():
            idx = int(np.argmin(finite))
            return StateDiagnostic(name, idx, f"non-finite value {arr[idx]!r}")
    return None
