"""Dispatch a resolved RunSpec to the right driver."""
from __future__ import annotations

import logging

from .config import ConfigError, RunSpec, build_grid, initial_state
from .evp import run_evp
from .explicit import run_explicit
from .jfnk import run_implicit
from .mms import convergence_study, make_forcing
from .runloop import RunResult

log = logging.getLogger(__name__)


def execute(spec: RunSpec) -> RunResult:
    """Run one simulation to its horizon (or abort) and return the record."""
    grid = build_grid(spec)
    state0 = initial_state(spec, grid)
    potential = spec.make_potential()
    snapshot_every = spec.snapshot_every()
    forcing = make_forcing(spec.params, spec.wind) if spec.scenario == "mms" else None
    log.info(
        "run: scenario=%s scheme=%s integrator=%s cells=%d dx=%g dt=%g steps=%d",
        spec.scenario, spec.scheme.value, spec.integrator,
        spec.n_cells, spec.dx, spec.dt, spec.n_steps,
    )

    if spec.integrator == "tvrk3":
        return run_explicit(
            state0, grid, spec.params, spec.scheme, spec.dt, spec.n_steps,
            spec.wind, forcing_fn=forcing, potential=potential,
            snapshot_every=snapshot_every,
        )
    if spec.integrator == "jfnk":
        if forcing is not None:
            raise ConfigError("the verification scenario runs with the explicit integrator")
        return run_implicit(
            state0, grid, spec.params, spec.dt, spec.n_steps, spec.wind,
            newton=spec.newton, potential=potential, snapshot_every=snapshot_every,
        )
    if spec.integrator == "evp":
        if forcing is not None:
            raise ConfigError("the verification scenario runs with the explicit integrator")
        window = None
        if spec.trace_start is not None and spec.trace_stop is not None:
            window = (spec.trace_start, spec.trace_stop)
        return run_evp(
            state0, grid, spec.params, spec.scheme, spec.dt, spec.n_steps,
            spec.wind, config=spec.evp, potential=potential,
            snapshot_every=snapshot_every, trace_window=window,
        )
    raise ConfigError(f"unknown integrator {spec.integrator!r}")


def execute_convergence(spec: RunSpec):
    """Three-resolution refinement study anchored at the configured cell count."""
    resolutions = (spec.n_cells, 2 * spec.n_cells, 4 * spec.n_cells)
    return convergence_study(
        spec.scheme, resolutions=resolutions, dt=spec.dt,
        horizon=spec.horizon, params=spec.params, u_air=spec.wind,
    )
