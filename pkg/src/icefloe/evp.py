"""Elastic-regularized solver: explicit stress/velocity subcycling.

Each outer step of size dt runs n_sub subcycles of size dt/n_sub in which
the stress relaxes toward the constitutive curve on a damping timescale
T = damping_factor * dt and the velocity responds explicitly.  h, A and the
strength P stay bitwise frozen during the subcycles; transport advances
afterwards with the final subcycled velocity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import cd_ops, rheology
from .explicit import transport_tvrk3, weno_config_for
from .model import Boundary, Grid, Layout, PhysParams, Scheme, State
from .potential import PotentialConfig
from .runloop import H_FLOOR, RunRecorder, RunResult
from .weno import Bias, weno_derivative


@dataclass(frozen=True)
class EvpConfig:
    n_sub: int = 100
    damping_factor: float = 0.36

    def __post_init__(self):
        if self.n_sub < 1:
            raise ValueError("n_sub must be at least 1")
        if not self.damping_factor > 0.0:
            raise ValueError("damping_factor must be positive")

    def dt_sub(self, dt: float) -> float:
        return dt / self.n_sub

    def damping_time(self, dt: float) -> float:
        return self.damping_factor * dt


def evp_stress_update(
    sigma_prev: np.ndarray,
    du_prev: np.ndarray,
    zeta_prev: np.ndarray,
    pressure_frozen: np.ndarray,
    dt_sub: float,
    t_damp: float,
    params: PhysParams,
) -> np.ndarray:
    """One linearly implicit stress subcycle (pointwise).

    Solves sigma_s from
      (sigma_s - sigma_{s-1})/dt_sub =
        -(1/T) [ sigma_s/(1+e^-2) + P/(2(1+e^-2)) - zeta_{s-1} du_{s-1} ],
    which damps sigma toward the constitutive value on the timescale T.
    """
    c1 = 1.0 + params.ellipse_e ** -2
    denom = 1.0 / dt_sub + 1.0 / (c1 * t_damp)
    numer = (
        sigma_prev / dt_sub
        - pressure_frozen / (2.0 * c1 * t_damp)
        + (zeta_prev / t_damp) * du_prev
    )
    return numer / denom


def evp_velocity_update(
    u_prev: np.ndarray,
    dsigma: np.ndarray,
    h_at_u: np.ndarray,
    u_air: float,
    dt_sub: float,
    params: PhysParams,
) -> np.ndarray:
    """Explicit velocity subcycle: u + dt_sub (tau_a - tau_w(u) + dsigma)/(rho h)."""
    accel = (
        rheology.wind_stress(u_air, params)
        - rheology.water_stress(u_prev, params)
        + dsigma
    )
    return u_prev + dt_sub * accel / (params.rho_ice * np.maximum(h_at_u, H_FLOOR))


def initial_stress(state: State, grid: Grid, params: PhysParams, scheme: Scheme) -> np.ndarray:
    """Constitutive stress of the initial state (equals -P/2 at rest)."""
    cfg = weno_config_for(scheme)
    if scheme is Scheme.CD:
        du_dx = cd_ops.cd_center_gradient(state.u, grid.dx)
    else:
        du_dx = weno_derivative(state.u, Bias.LEFT, grid.dx, cfg)
    return rheology.derive_fields(du_dx, state.h, state.a, params).sigma


def evp_step(
    state: State,
    sigma: np.ndarray,
    dt: float,
    grid: Grid,
    params: PhysParams,
    scheme: Scheme,
    config: EvpConfig,
    u_air: float,
    potential: PotentialConfig | None = None,
    subcycle_cb=None,
) -> tuple[State, np.ndarray]:
    """One outer step: n_sub stress/velocity subcycles, then transport.

    subcycle_cb(s, u) is invoked after each velocity subcycle (s counts from
    1) for tracing.  Returns the advanced state and the final stress.
    """
    cfg = weno_config_for(scheme)
    dt_sub = config.dt_sub(dt)
    t_damp = config.damping_time(dt)
    pressure = rheology.ice_strength(state.h, state.a, params)
    if scheme is Scheme.CD:
        h_at_u = cd_ops.vertex_from_center(state.h, grid.boundary)
    else:
        h_at_u = state.h

    u = state.u
    for s in range(1, config.n_sub + 1):
        if scheme is Scheme.CD:
            du_dx = cd_ops.cd_center_gradient(u, grid.dx)
        else:
            du_dx = weno_derivative(u, Bias.LEFT, grid.dx, cfg)
        delta = rheology.strain_delta(du_dx, params)
        zeta, _ = rheology.viscosities(pressure, delta, params)
        sigma = evp_stress_update(sigma, du_dx, zeta, pressure, dt_sub, t_damp, params)
        if scheme is Scheme.CD:
            dsig = cd_ops.cd_vertex_divergence(sigma, grid.dx, grid.boundary)
        else:
            dsig = weno_derivative(sigma, Bias.RIGHT, grid.dx, cfg)
        u = evp_velocity_update(u, dsig, h_at_u, u_air, dt_sub, params)
        if grid.layout is Layout.STAGGERED_C and grid.boundary is Boundary.DIRICHLET:
            u[..., 0] = 0.0
            u[..., -1] = 0.0
        if subcycle_cb is not None:
            subcycle_cb(s, u)

    return transport_tvrk3(u, state, dt, grid, scheme, potential), sigma


def run_evp(
    state0: State,
    grid: Grid,
    params: PhysParams,
    scheme: Scheme,
    dt: float,
    n_steps: int,
    u_air: float,
    config: EvpConfig | None = None,
    potential: PotentialConfig | None = None,
    snapshot_every: int = 0,
    trace_window: tuple | None = None,
    trace_stride: int | None = None,
) -> RunResult:
    """Run the subcycled solver for n_steps (or until blow-up).

    A rolling buffer keeps the per-subcycle velocity minimum of the last two
    outer steps so the moments before a blow-up stay inspectable; inside the
    optional trace_window = (t0, t1) full velocity fields are kept every
    trace_stride-th subcycle.
    """
    config = config or EvpConfig()
    recorder = RunRecorder(grid, params, dt, n_steps, snapshot_every, potential,
                           stability_check_every=0)
    recorder.start(state0)
    state = state0
    sigma = initial_stress(state0, grid, params, scheme)
    keep = 2 * config.n_sub
    minima: list = []
    fields: list = []
    stride = trace_stride or max(1, config.n_sub // 8)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for i in range(n_steps):
            t_base = state.time
            in_window = trace_window is not None and (
                trace_window[0] <= t_base < trace_window[1]
            )

            def trace(s, u, _t=t_base, _win=in_window):
                minima.append((_t, s, float(np.min(u))))
                if _win and (s % stride == 0 or s == config.n_sub):
                    fields.append((_t, s, u.copy()))

            state, sigma = evp_step(
                state, sigma, dt, grid, params, scheme, config, u_air,
                potential, subcycle_cb=trace,
            )
            if len(minima) > keep:
                del minima[: len(minima) - keep]
            if not recorder.after_step(state, i):
                break
    result = recorder.finish()
    result.subcycle_minima = minima
    result.subcycle_fields = fields
    return result
