import numpy as np
import pytest

from icefloe.jfnk import (
    NewtonConfig,
    NonConvergenceError,
    assemble_jacobian,
    jacobian_action,
    jfnk_solve,
    momentum_residual,
    run_implicit,
)
from icefloe.model import Boundary, PhysParams, Scheme, State, make_grid
from icefloe.runloop import STATUS_COMPLETED, STATUS_NONCONVERGENCE

PARAMS = PhysParams()


def staggered(n, dx, boundary):
    return make_grid(n, dx, Scheme.CD.layout, boundary)


def uniform_state(grid, u=0.0, h=1.0, a=0.9):
    return State(
        0.0,
        np.full(grid.n_u, float(u)),
        np.full(grid.n_cells, float(h)),
        np.full(grid.n_cells, float(a)),
    )


def stalling_setup():
    # thin weak band plus a long time step: the halving line search wanders
    # without ever reaching the convergence target
    grid = staggered(16, 2.0e4, Boundary.DIRICHLET)
    h = np.ones(16)
    h[6:10] = 0.01
    a = np.full(16, 0.95)
    a[6:10] = 0.2
    return grid, State(0.0, np.zeros(grid.n_u), h, a)


def test_residual_reduces_to_drag_imbalance_for_uniform_motion():
    grid = staggered(8, 1.0e4, Boundary.PERIODIC)
    state = uniform_state(grid, u=0.2, h=1.0, a=1.0)
    f = momentum_residual(state.u, state, 90.0, grid, PARAMS, 10.0)
    # mass and stress terms vanish; interior rows are tau_w(0.2) - tau_a(10)
    expected = 0.22572000028215 - 0.156
    np.testing.assert_allclose(f[:-1], expected, rtol=1e-12)
    assert f[-1] == 0.0  # seam row: u_N - u_0


def test_residual_pins_wall_rows_to_candidate_values():
    grid = staggered(8, 1.0e4, Boundary.DIRICHLET)
    state = uniform_state(grid)
    u = state.u.copy()
    u[0], u[-1] = 0.37, -0.11
    f = momentum_residual(u, state, 90.0, grid, PARAMS, 10.0)
    assert f[0] == 0.37
    assert f[-1] == -0.11


def test_residual_requires_staggered_layout():
    grid = make_grid(8, 1.0e4, Scheme.WENO.layout, Boundary.PERIODIC)
    state = State(0.0, np.zeros(8), np.ones(8), np.ones(8))
    with pytest.raises(ValueError, match="staggered"):
        momentum_residual(state.u, state, 90.0, grid, PARAMS, 10.0)


def test_residual_broadcasts_over_leading_axis():
    grid = staggered(8, 1.0e4, Boundary.PERIODIC)
    state = uniform_state(grid)
    rng = np.random.default_rng(3)
    batch = 0.01 * rng.normal(size=(4, grid.n_u))
    batch[:, -1] = batch[:, 0]
    stacked = momentum_residual(batch, state, 90.0, grid, PARAMS, 10.0)
    for row in range(4):
        single = momentum_residual(batch[row], state, 90.0, grid, PARAMS, 10.0)
        np.testing.assert_array_equal(stacked[row], single)


def test_jacobian_utilities_are_exact_on_linear_maps():
    rng = np.random.default_rng(7)
    mat = rng.normal(size=(6, 6))
    offset = rng.normal(size=6)

    def f(u):
        return u @ mat.T + offset

    u0 = rng.normal(size=6)
    v = rng.normal(size=6)
    jv = jacobian_action(f, u0, v, 1e-7)
    np.testing.assert_allclose(jv, mat @ v, rtol=1e-6, atol=1e-8)
    jac = assemble_jacobian(f, u0, 1e-7)
    np.testing.assert_allclose(jac, mat, rtol=1e-5, atol=1e-7)


def test_assembled_jacobian_matches_per_column_actions():
    grid = staggered(10, 2.0e4, Boundary.DIRICHLET)
    state = uniform_state(grid, u=0.05, h=1.2, a=0.85)

    def residual(u):
        return momentum_residual(u, state, 90.0, grid, PARAMS, 10.0)

    jac = assemble_jacobian(residual, state.u, 1e-7)
    n = grid.n_u
    for j in range(n):
        col = jacobian_action(residual, state.u, np.eye(n)[j], 1e-7)
        np.testing.assert_allclose(jac[:, j], col, rtol=1e-9, atol=1e-12)


def test_newton_contract_on_a_stiff_start():
    grid = staggered(16, 2.0e4, Boundary.DIRICHLET)
    state = uniform_state(grid)
    config = NewtonConfig()
    u, rep = jfnk_solve(state, 90.0, grid, PARAMS, config, 10.0)
    assert rep.converged
    assert 1 <= rep.iterations <= config.k_max
    assert set(rep.lambdas) <= set(config.lambda_schedule)
    # any step shorter than the terminal fallback must have improved
    for k, lam in enumerate(rep.lambdas):
        if lam != config.lambda_schedule[-1]:
            assert rep.residual_norms[k + 1] < rep.residual_norms[k]
    assert rep.residual_norms[-1] < config.gamma_nl * rep.residual_norms[0]
    assert u[0] == 0.0 and u[-1] == 0.0
    assert np.isfinite(u).all()


def test_already_balanced_state_returns_immediately():
    grid = staggered(8, 1.0e4, Boundary.DIRICHLET)
    state = uniform_state(grid, u=0.0)
    u, rep = jfnk_solve(state, 90.0, grid, PARAMS, NewtonConfig(), 0.0)
    assert rep.converged
    assert rep.iterations == 0
    assert rep.residual_norms == [0.0]
    np.testing.assert_array_equal(u, state.u)


def test_stalling_problem_raises_with_iteration_log():
    grid, state = stalling_setup()
    config = NewtonConfig(k_max=25)
    with pytest.raises(NonConvergenceError) as exc:
        jfnk_solve(state, 900.0, grid, PARAMS, config, 10.0)
    rep = exc.value.report
    assert not rep.converged
    assert rep.iterations == 25
    assert len(rep.residual_norms) == 26
    assert len(rep.lambdas) == 25


def test_run_completes_and_logs_iteration_rows():
    grid = staggered(16, 2.0e4, Boundary.DIRICHLET)
    state = uniform_state(grid)
    res = run_implicit(state, grid, PARAMS, 90.0, 3, 10.0)
    assert res.status == STATUS_COMPLETED
    assert res.n_steps_done == 3
    assert res.state.time == pytest.approx(270.0)
    steps = {row[0] for row in res.newton_rows}
    assert steps == {0, 1, 2}
    first = res.newton_rows[0]
    assert first[2] == 0 and first[4] == ""  # initial residual row has no step fraction
    # wind pushes the interior while the walls stay pinned
    assert res.state.u[0] == 0.0 and res.state.u[-1] == 0.0
    assert res.extrema["max_u"] > 0.0

    again = run_implicit(state, grid, PARAMS, 90.0, 3, 10.0)
    np.testing.assert_array_equal(res.state.u, again.state.u)
    np.testing.assert_array_equal(res.state.h, again.state.h)


def test_run_reports_nonconvergence_and_stops():
    grid, state = stalling_setup()
    res = run_implicit(state, grid, PARAMS, 900.0, 5, 10.0,
                       newton=NewtonConfig(k_max=10))
    assert res.status == STATUS_NONCONVERGENCE
    assert res.n_steps_done == 0
    assert res.blowup_time is None
    assert any(ev["event"] == "newton_nonconvergence" for ev in res.events)
    assert len(res.newton_rows) == 11
