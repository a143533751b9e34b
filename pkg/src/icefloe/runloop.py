"""Shared per-step bookkeeping for the three time-integration drivers.

The recorder owns everything that happens *between* steps: finiteness
checking (a non-finite field after a completed step ends the run and the
last fully finite step defines the blow-up time), running extrema, snapshot
cadence, the potential watchdog, and the stability warning.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import cd_ops, rheology
from .model import Grid, Layout, State
from .potential import PotentialConfig, watchdog_step

log = logging.getLogger(__name__)

H_FLOOR = 1e-6  # m; only guards divisions by rho h

STATUS_COMPLETED = "completed"
STATUS_BLOW_UP = "blow_up"
STATUS_NONCONVERGENCE = "nonconvergence"


@dataclass
class RunResult:
    status: str
    state: State                      # last finite state
    n_steps_done: int
    blowup_time: float | None
    extrema: dict
    snapshots: list                   # [(time, State), ...]
    events: list = field(default_factory=list)       # dict rows
    newton_rows: list = field(default_factory=list)  # (step, time, k, residual, lam)
    subcycle_minima: list = field(default_factory=list)   # (time, sub, min u)
    subcycle_fields: list = field(default_factory=list)   # (time, sub, u array)


def center_du_dx(state: State, grid: Grid) -> np.ndarray:
    """du/dx at cell centers by centered differencing, any layout."""
    if grid.layout is Layout.STAGGERED_C:
        return cd_ops.cd_center_gradient(state.u, grid.dx)
    u = state.u
    return (np.roll(u, -1) - np.roll(u, 1)) / (2.0 * grid.dx)


class RunRecorder:
    """Per-step monitor; one instance per run, exclusively owned."""

    def __init__(
        self,
        grid: Grid,
        params,
        dt: float,
        n_steps: int,
        snapshot_every: int = 0,
        potential: PotentialConfig | None = None,
        stability_check_every: int = 100,  # 0 disables; implicit and subcycled
                                           # momentum updates are exempt
    ):
        self.grid = grid
        self.params = params
        self.dt = dt
        self.n_steps = n_steps
        self.snapshot_every = snapshot_every
        self.potential = potential
        self.stability_check_every = stability_check_every
        self._warned_stability = False
        self.snapshots: list = []
        self.events: list = []
        self.extrema: dict = {}
        self.last_state: State | None = None
        self.steps_done = 0
        self.status = STATUS_COMPLETED
        self.blowup_time: float | None = None

    def start(self, state0: State):
        self.last_state = state0
        for name in ("u", "h", "a"):
            arr = getattr(state0, name)
            self.extrema[f"min_{name}"] = float(arr.min())
            self.extrema[f"max_{name}"] = float(arr.max())
        self.snapshots.append((state0.time, state0))

    def after_step(self, state: State, step_index: int) -> bool:
        """Record a completed step; False means stop (blow-up detected)."""
        finite = (
            np.isfinite(state.u).all()
            and np.isfinite(state.h).all()
            and np.isfinite(state.a).all()
        )
        if not finite:
            self.status = STATUS_BLOW_UP
            self.blowup_time = self.last_state.time
            self.events.append(
                {
                    "time": self.last_state.time,
                    "event": "blow_up",
                    "detail": f"non-finite field after step {step_index + 1}",
                }
            )
            log.info("blow-up detected; last finite time %.6g s", self.blowup_time)
            return False
        self.last_state = state
        self.steps_done = step_index + 1
        for name in ("u", "h", "a"):
            arr = getattr(state, name)
            lo, hi = f"min_{name}", f"max_{name}"
            self.extrema[lo] = min(self.extrema[lo], float(arr.min()))
            self.extrema[hi] = max(self.extrema[hi], float(arr.max()))
        if self.snapshot_every and (step_index + 1) % self.snapshot_every == 0:
            self.snapshots.append((state.time, state))
        if self.potential is not None and not self.potential.all_active:
            du = center_du_dx(state, self.grid)
            for act in watchdog_step(state, self.potential, du, self.dt):
                self.events.append(
                    {
                        "time": act.time,
                        "event": "potential_activation",
                        "branch": act.branch,
                        "lower": act.interval.lower if act.interval else "",
                        "upper": act.interval.upper if act.interval else "",
                        "gamma": act.gamma,
                        "infeasible": act.infeasible,
                    }
                )
        if (
            self.stability_check_every
            and not self._warned_stability
            and step_index % self.stability_check_every == 0
        ):
            self._check_stability(state)
        return True

    def _check_stability(self, state: State):
        du = center_du_dx(state, self.grid)
        fields = rheology.derive_fields(du, state.h, state.a, self.params)
        mass = self.params.rho_ice * np.maximum(state.h, H_FLOOR)
        number = (fields.zeta + fields.eta) * self.dt / (mass * self.grid.dx ** 2)
        worst = float(np.max(number))
        if worst > 0.5:
            self._warned_stability = True
            warnings.warn(
                f"explicit viscous stability number {worst:.3g} exceeds 0.5; "
                "the run may blow up",
                RuntimeWarning,
                stacklevel=3,
            )

    def finish(self) -> RunResult:
        final = self.last_state
        if self.status == STATUS_COMPLETED:
            if not self.snapshots or self.snapshots[-1][0] != final.time:
                self.snapshots.append((final.time, final))
        return RunResult(
            status=self.status,
            state=final,
            n_steps_done=self.steps_done,
            blowup_time=self.blowup_time,
            extrema=dict(self.extrema),
            snapshots=self.snapshots,
            events=self.events,
        )
