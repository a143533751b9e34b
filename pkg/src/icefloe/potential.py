"""Range-restoring potential forcing for transported fields.

A potential f(q) rising outside the admissible range adds -f'(q) to the
transport right-hand side: zero while q is in range, a restoring push back
toward the range once it leaves.  Quadratic potentials give a pull
proportional to the excursion; linear ones give a constant pull.

A watchdog monitors the run and switches each branch on exactly once, at the
first step whose completed state violates that branch's bound.  At
activation it also estimates, from the violating state itself, the interval
of strengths that would restore the bound within one step without
overshooting past the opposite bound.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .model import State


class PotentialForm(Enum):
    QUADRATIC = "quadratic"
    LINEAR = "linear"


@dataclass(frozen=True)
class GammaInterval:
    lower: float
    upper: float

    @property
    def feasible(self) -> bool:
        return self.lower < self.upper


class NoViolation(ValueError):
    """Raised when an interval estimate is requested but no cell violates."""


@dataclass(frozen=True)
class Activation:
    """Watchdog record: one branch switched on."""

    time: float
    branch: str               # "a_low" | "a_high" | "h_low"
    interval: GammaInterval | None
    gamma: float
    infeasible: bool


@dataclass
class PotentialConfig:
    """Strengths, form, and activation bookkeeping for the three branches.

    gamma1 guards A >= 0, gamma2 guards A <= 1, gamma_h guards h >= 0.
    Branches start inactive and contribute nothing until the watchdog
    activates them; activation is permanent for the rest of the run.
    """

    gamma1: float = 1e-3
    gamma2: float = 1e-2
    gamma_h: float = 1e-3
    form: PotentialForm = PotentialForm.QUADRATIC
    active_a_low: bool = False
    active_a_high: bool = False
    active_h_low: bool = False
    activations: list = field(default_factory=list)

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "gamma_h"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")

    def concentration_force(self, a: np.ndarray) -> np.ndarray:
        g_lo = self.gamma1 if self.active_a_low else 0.0
        g_hi = self.gamma2 if self.active_a_high else 0.0
        return potential_force(a, 0.0, 1.0, g_lo, g_hi, self.form)

    def thickness_force(self, h: np.ndarray) -> np.ndarray:
        g_lo = self.gamma_h if self.active_h_low else 0.0
        return potential_force(h, 0.0, None, g_lo, 0.0, self.form)

    @property
    def all_active(self) -> bool:
        return self.active_a_low and self.active_a_high and self.active_h_low


def potential_force(q, lower, upper, gamma_lower, gamma_upper, form: PotentialForm):
    """-f'(q): restoring forcing of the range [lower, upper] (upper=None: none).

    Quadratic: -2 gamma (q - bound) outside the range (sign pushes inward).
    Linear: constant +/- gamma outside the range.
    Exactly zero everywhere inside the range.
    """
    q = np.asarray(q, dtype=float)
    below = q < lower
    if form is PotentialForm.QUADRATIC:
        out = np.where(below, -2.0 * gamma_lower * (q - lower), 0.0)
    else:
        out = np.where(below, gamma_lower, 0.0)
    if upper is not None:
        above = q > upper
        if form is PotentialForm.QUADRATIC:
            out = np.where(above, -2.0 * gamma_upper * (q - upper), out)
        else:
            out = np.where(above, -gamma_upper, out)
    return out


def _check_dt(dt: float):
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")


def estimate_gamma1_range(a: np.ndarray, du_dx: np.ndarray, dt: float) -> GammaInterval:
    """Strength interval for the A >= 0 branch from a violating state.

    Lower endpoint: the restoring term must dominate the local convergence
    -u_x/2 wherever the field could be pushed further down, so it maximizes
    over all cells.  Upper endpoint: within one step of size dt the pull must
    not overshoot a violating value B0 past the opposite bound, minimized
    over violating cells.
    """
    _check_dt(dt)
    a = np.asarray(a, dtype=float)
    du_dx = np.asarray(du_dx, dtype=float)
    violating = a < 0.0
    if not violating.any():
        raise NoViolation("no cell has A < 0")
    lower = float(np.max(-0.5 * du_dx))
    b0 = a[violating]
    ux = du_dx[violating]
    upper = float(np.min(-0.5 * ux - (1.0 - b0) / (2.0 * b0 * dt)))
    return GammaInterval(lower, upper)


def estimate_gamma2_range(a: np.ndarray, du_dx: np.ndarray, dt: float) -> GammaInterval:
    """Strength interval for the A <= 1 branch; both endpoints use violating cells."""
    _check_dt(dt)
    a = np.asarray(a, dtype=float)
    du_dx = np.asarray(du_dx, dtype=float)
    violating = a > 1.0
    if not violating.any():
        raise NoViolation("no cell has A > 1")
    b0 = a[violating]
    ux = du_dx[violating]
    per_cell_lower = -ux * b0 / (2.0 * (b0 - 1.0))
    lower = float(np.max(per_cell_lower))
    upper = float(np.min(per_cell_lower + b0 / (2.0 * (b0 - 1.0) * dt)))
    return GammaInterval(lower, upper)


def estimate_gamma_h_range(h: np.ndarray, du_dx: np.ndarray, dt: float) -> GammaInterval:
    """Strength interval for the h >= 0 branch; same construction as gamma1."""
    _check_dt(dt)
    h = np.asarray(h, dtype=float)
    du_dx = np.asarray(du_dx, dtype=float)
    violating = h < 0.0
    if not violating.any():
        raise NoViolation("no cell has h < 0")
    lower = float(np.max(-0.5 * du_dx))
    b0 = h[violating]
    ux = du_dx[violating]
    upper = float(np.min(-0.5 * ux - (1.0 - b0) / (2.0 * b0 * dt)))
    return GammaInterval(lower, upper)


def watchdog_step(
    state: State, config: PotentialConfig, du_dx: np.ndarray, dt: float
) -> list[Activation]:
    """Activate branches whose bound the completed state violates.

    Called once per full time step with du/dx at cell centers.  Each branch
    activates at most once per run; the activation record carries the
    estimated admissible interval (or infeasible marker) while the run keeps
    the configured strength.  Mutates config; returns new activations.
    """
    events = []

    def activate(flag_name, branch, estimator, field_values, gamma):
        try:
            interval = estimator(field_values, du_dx, dt)
        except NoViolation:
            return
        setattr(config, flag_name, True)
        event = Activation(state.time, branch, interval, gamma, not interval.feasible)
        config.activations.append(event)
        events.append(event)
        if interval.feasible and not interval.lower <= gamma <= interval.upper:
            warnings.warn(
                f"{branch} strength {gamma:g} lies outside the estimated "
                f"admissible interval ({interval.lower:g}, {interval.upper:g})",
                RuntimeWarning,
                stacklevel=2,
            )

    if not config.active_a_low and np.any(state.a < 0.0):
        activate("active_a_low", "a_low", estimate_gamma1_range, state.a, config.gamma1)
    if not config.active_a_high and np.any(state.a > 1.0):
        activate("active_a_high", "a_high", estimate_gamma2_range, state.a, config.gamma2)
    if not config.active_h_low and np.any(state.h < 0.0):
        activate("active_h_low", "h_low", estimate_gamma_h_range, state.h, config.gamma_h)
    return events
