"""Newton-Krylov-style implicit momentum solve with backward-Euler stepping.

Each time step solves F(u) = 0 for the new velocity with h and A frozen at
the previous level.  The Jacobian is never formed analytically: its action
comes from one-sided finite differences of the residual, and the full matrix
is assembled column by column from actions on basis vectors, then solved
directly.  A simple halving line search guards each Newton update.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import cd_ops, rheology
from .explicit import transport_tvrk3
from .model import Boundary, Grid, Layout, PhysParams, Scheme, State
from .potential import PotentialConfig
from .runloop import RunRecorder, RunResult, STATUS_NONCONVERGENCE

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NewtonConfig:
    k_max: int = 150
    gamma_nl: float = 1e-6          # relative residual drop for convergence
    fd_eps: float = 1e-7            # finite-difference perturbation
    lambda_schedule: tuple = (1.0, 0.5, 0.25, 0.125)

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        if not 0.0 < self.gamma_nl < 1.0:
            raise ValueError("gamma_nl must lie in (0, 1)")
        if not self.fd_eps > 0.0:
            raise ValueError("fd_eps must be positive")


@dataclass
class NewtonReport:
    converged: bool
    iterations: int
    residual_norms: list = field(default_factory=list)  # index 0 = initial
    lambdas: list = field(default_factory=list)         # accepted step fractions


class NonConvergenceError(RuntimeError):
    def __init__(self, report: NewtonReport):
        super().__init__(
            f"Newton iteration did not converge in {report.iterations} steps "
            f"(residual {report.residual_norms[-1]:.3e} from {report.residual_norms[0]:.3e})"
        )
        self.report = report


def momentum_residual(
    u_cand: np.ndarray,
    prev: State,
    dt: float,
    grid: Grid,
    params: PhysParams,
    u_air: float,
) -> np.ndarray:
    """Backward-Euler momentum residual on the staggered grid.

    F(u) = rho h (u - u_prev)/dt - tau_a + tau_w(u) - dsigma(u)/dx with the
    rheology evaluated from the candidate velocity and the frozen previous
    h, A.  Boundary rows are replaced: under Dirichlet the pinned conditions
    u_0 = u_N = 0, under periodic the physical equation with wrapped stencil
    at the first vertex and the mirror constraint u_N - u_0 at the last.
    Accepts a leading batch axis on u_cand.
    """
    if grid.layout is not Layout.STAGGERED_C:
        raise ValueError("the implicit momentum solve is defined on the staggered layout")
    u = np.asarray(u_cand)
    h, a = prev.h, prev.a

    du_dx = (u[..., 1:] - u[..., :-1]) / grid.dx
    flds = rheology.derive_fields(du_dx, h, a, params)
    sig = flds.sigma
    h_v = cd_ops.vertex_from_center(h, grid.boundary)
    tau_a = rheology.wind_stress(u_air, params)
    coeff = params.rho_ice * h_v / dt

    out = np.empty_like(u)
    out[..., 1:-1] = (
        coeff[1:-1] * (u[..., 1:-1] - prev.u[1:-1])
        - tau_a
        + rheology.water_stress(u[..., 1:-1], params)
        - (sig[..., 1:] - sig[..., :-1]) / grid.dx
    )
    if grid.boundary is Boundary.DIRICHLET:
        out[..., 0] = u[..., 0]
        out[..., -1] = u[..., -1]
    else:
        out[..., 0] = (
            coeff[0] * (u[..., 0] - prev.u[0])
            - tau_a
            + rheology.water_stress(u[..., 0], params)
            - (sig[..., 0] - sig[..., -1]) / grid.dx
        )
        out[..., -1] = u[..., -1] - u[..., 0]
    return out


def jacobian_action(residual_fn, u: np.ndarray, v: np.ndarray, fd_eps: float) -> np.ndarray:
    """J v by one-sided differencing: (F(u + eps v) - F(u)) / eps."""
    return (residual_fn(u + fd_eps * v) - residual_fn(u)) / fd_eps


def assemble_jacobian(residual_fn, u: np.ndarray, fd_eps: float) -> np.ndarray:
    """Dense Jacobian, one column per basis-vector action.

    residual_fn must accept a leading batch axis; all n columns come from a
    single batched evaluation of F(u + eps e_j).
    """
    n = u.shape[-1]
    base = residual_fn(u)
    perturbed = residual_fn(u[None, :] + fd_eps * np.eye(n))
    return ((perturbed - base[None, :]) / fd_eps).T


def jfnk_solve(
    prev: State,
    dt: float,
    grid: Grid,
    params: PhysParams,
    config: NewtonConfig,
    u_air: float,
) -> tuple[np.ndarray, NewtonReport]:
    """Solve the backward-Euler momentum system for the new velocity.

    Initial iterate is the previous velocity.  Convergence requires the
    residual norm to drop below gamma_nl times its initial value; an already
    negligible initial residual (below 1e-14 n) returns immediately.  Raises
    NonConvergenceError after k_max iterations.
    """

    def residual(u):
        return momentum_residual(u, prev, dt, grid, params, u_air)

    u = prev.u.copy()
    f = residual(u)
    norm0 = float(np.linalg.norm(f))
    report = NewtonReport(converged=False, iterations=0, residual_norms=[norm0])
    if norm0 < 1e-14 * u.size:
        report.converged = True
        return u, report

    target = config.gamma_nl * norm0
    norm = norm0
    for k in range(1, config.k_max + 1):
        jac = assemble_jacobian(residual, u, config.fd_eps)
        delta = np.linalg.solve(jac, -f)
        accepted = None
        for lam in config.lambda_schedule:
            u_try = u + lam * delta
            f_try = residual(u_try)
            norm_try = float(np.linalg.norm(f_try))
            accepted = (u_try, f_try, norm_try, lam)
            if norm_try < norm:
                break
        u, f, norm, lam = accepted
        report.iterations = k
        report.residual_norms.append(norm)
        report.lambdas.append(lam)
        if norm < target:
            report.converged = True
            return u, report
    raise NonConvergenceError(report)


def run_implicit(
    state0: State,
    grid: Grid,
    params: PhysParams,
    dt: float,
    n_steps: int,
    u_air: float,
    newton: NewtonConfig | None = None,
    potential: PotentialConfig | None = None,
    snapshot_every: int = 0,
) -> RunResult:
    """Backward-Euler momentum + explicit TVD-RK3 transport, one level at a time.

    Transport always uses the centered staggered operators here.  On Newton
    non-convergence the run aborts and the result reports the iteration log
    of the failed step.
    """
    newton = newton or NewtonConfig()
    recorder = RunRecorder(grid, params, dt, n_steps, snapshot_every, potential,
                           stability_check_every=0)
    recorder.start(state0)
    state = state0
    newton_rows = []
    result_status = None
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for i in range(n_steps):
            try:
                u_new, rep = jfnk_solve(state, dt, grid, params, newton, u_air)
            except NonConvergenceError as err:
                rep = err.report
                for k, rn in enumerate(rep.residual_norms):
                    lam = rep.lambdas[k - 1] if k >= 1 else ""
                    newton_rows.append((i, state.time, k, rn, lam))
                recorder.events.append(
                    {
                        "time": state.time,
                        "event": "newton_nonconvergence",
                        "detail": f"step {i + 1}: {err}",
                    }
                )
                result_status = STATUS_NONCONVERGENCE
                break
            for k, rn in enumerate(rep.residual_norms):
                lam = rep.lambdas[k - 1] if k >= 1 else ""
                newton_rows.append((i, state.time, k, rn, lam))
            state = transport_tvrk3(u_new, state, dt, grid, Scheme.CD, potential)
            if not recorder.after_step(state, i):
                break
    result = recorder.finish()
    if result_status is not None:
        result.status = result_status
    result.newton_rows = newton_rows
    return result
