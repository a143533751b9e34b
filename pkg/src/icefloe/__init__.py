"""One-dimensional viscous-plastic sea-ice solver.

Centered-difference (staggered) and fifth-order WENO (collocated)
discretizations, explicit TVD-RK3 / implicit Newton / subcycled
elastic-regularized time integration, range-restoring potential forcing,
and a manufactured-solution verification harness.
"""
from .model import (
    Boundary,
    Grid,
    Layout,
    PhysParams,
    RheologyFields,
    Scheme,
    State,
    make_grid,
    validate_state,
)

__all__ = [
    "Boundary",
    "Grid",
    "Layout",
    "PhysParams",
    "RheologyFields",
    "Scheme",
    "State",
    "make_grid",
    "validate_state",
]

__version__ = "0.1.0"
