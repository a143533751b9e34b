import warnings

import numpy as np
import pytest

from icefloe.model import State
from icefloe.potential import (
    Activation,
    GammaInterval,
    NoViolation,
    PotentialConfig,
    PotentialForm,
    estimate_gamma1_range,
    estimate_gamma2_range,
    estimate_gamma_h_range,
    potential_force,
    watchdog_step,
)


def test_force_is_exactly_zero_inside_the_range():
    q = np.array([0.0, 1e-12, 0.3, 0.999, 1.0])
    for form in PotentialForm:
        out = potential_force(q, 0.0, 1.0, 2.0, 3.0, form)
        assert np.all(out == 0.0)


def test_quadratic_force_values():
    q = np.array([-0.5, 0.3, 1.25])
    out = potential_force(q, 0.0, 1.0, 2.0, 3.0, PotentialForm.QUADRATIC)
    # pull is proportional to the excursion and points back into the range
    np.testing.assert_array_equal(out, [2.0, 0.0, -1.5])


def test_linear_force_values():
    q = np.array([-0.5, 0.3, 1.25])
    out = potential_force(q, 0.0, 1.0, 2.0, 3.0, PotentialForm.LINEAR)
    np.testing.assert_array_equal(out, [2.0, 0.0, -3.0])


def test_unbounded_above_when_upper_is_none():
    out = potential_force(np.array([5.0, -1.0]), 0.0, None, 2.0, 9.9,
                          PotentialForm.QUADRATIC)
    np.testing.assert_array_equal(out, [0.0, 4.0])


def test_lower_bound_strength_interval_hand_example():
    a = np.array([-0.1, 0.5])
    du = np.array([-0.4, -0.2])
    got = estimate_gamma1_range(a, du, 90.0)
    # lower endpoint maxes -u_x/2 over all cells; upper endpoint adds the
    # one-step no-overshoot margin on the violating cell
    assert got.lower == pytest.approx(0.2, rel=1e-15)
    assert got.upper == pytest.approx(0.2 + 1.1 / 18.0, rel=1e-14)
    assert got.feasible


def test_lower_bound_strength_interval_can_be_infeasible():
    a = np.array([-0.1, 0.5, -0.02, 0.8])
    du = np.array([0.1, -0.4, 0.2, 0.3])
    got = estimate_gamma1_range(a, du, 90.0)
    assert got.lower == pytest.approx(0.2, rel=1e-15)
    assert got.upper == pytest.approx(-0.05 + 1.1 / 18.0, rel=1e-13)
    assert not got.feasible


def test_upper_bound_strength_interval_hand_example():
    a = np.array([1.2, 0.5])
    du = np.array([-0.3, 0.1])
    got = estimate_gamma2_range(a, du, 60.0)
    assert got.lower == pytest.approx(0.9, rel=1e-14)
    assert got.upper == pytest.approx(0.95, rel=1e-14)


def test_thickness_strength_interval_hand_example():
    h = np.array([-0.05, 1.0, 2.0])
    du = np.array([-0.3, 0.0, 0.1])
    got = estimate_gamma_h_range(h, du, 90.0)
    assert got.lower == pytest.approx(0.15, rel=1e-15)
    assert got.upper == pytest.approx(0.15 + 1.05 / 9.0, rel=1e-14)


@pytest.mark.parametrize("estimator,field", [
    (estimate_gamma1_range, np.array([0.2, 0.8])),
    (estimate_gamma2_range, np.array([0.2, 0.8])),
    (estimate_gamma_h_range, np.array([0.2, 0.8])),
])
def test_estimators_demand_a_violation(estimator, field):
    with pytest.raises(NoViolation):
        estimator(field, np.zeros(2), 90.0)


def test_estimators_validate_dt():
    with pytest.raises(ValueError, match="dt"):
        estimate_gamma1_range(np.array([-0.1]), np.array([0.0]), 0.0)


def test_branches_contribute_nothing_until_activated():
    config = PotentialConfig()
    a = np.array([-0.2, 0.5, 1.3])
    h = np.array([-0.4, 1.0, 2.0])
    assert np.all(config.concentration_force(a) == 0.0)
    assert np.all(config.thickness_force(h) == 0.0)
    config.active_a_low = True
    out = config.concentration_force(a)
    assert out[0] > 0.0
    assert out[1] == 0.0 and out[2] == 0.0  # high branch still off
    config.active_a_high = True
    assert config.concentration_force(a)[2] < 0.0
    assert not config.all_active
    config.active_h_low = True
    assert config.all_active


def test_watchdog_activates_each_branch_once():
    config = PotentialConfig(gamma1=0.25, gamma2=1.0, gamma_h=0.2)
    du = np.array([-0.4, -0.2])
    bad_a = State(100.0, np.zeros(3), np.ones(2), np.array([-0.1, 0.5]))
    events = watchdog_step(bad_a, config, du, 90.0)
    assert [e.branch for e in events] == ["a_low"]
    assert config.active_a_low and not config.active_a_high
    ev = events[0]
    assert isinstance(ev, Activation)
    assert ev.time == 100.0
    assert ev.gamma == 0.25
    assert ev.interval.lower == pytest.approx(0.2, rel=1e-15)
    assert not ev.infeasible
    # same violation later: the branch stays on, no second activation
    again = watchdog_step(bad_a, config, du, 90.0)
    assert again == []
    assert config.activations == [ev]


def test_watchdog_can_activate_several_branches_in_one_step():
    config = PotentialConfig(gamma1=0.25, gamma2=0.92, gamma_h=0.25)
    state = State(50.0, np.zeros(3),
                  np.array([-0.05, 1.0]), np.array([1.2, -0.1]))
    du = np.array([-0.3, -0.4])
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # none of the strengths should warn here
        events = watchdog_step(state, config, du, 60.0)
    assert sorted(e.branch for e in events) == ["a_high", "a_low", "h_low"]
    assert config.all_active


def test_watchdog_warns_when_strength_is_outside_the_estimate():
    config = PotentialConfig(gamma1=1e-6)
    bad_a = State(0.0, np.zeros(3), np.ones(2), np.array([-0.1, 0.5]))
    du = np.array([-0.4, -0.2])
    with pytest.warns(RuntimeWarning, match="outside the estimated"):
        watchdog_step(bad_a, config, du, 90.0)
    assert config.active_a_low  # activation proceeds regardless


def test_infeasible_interval_is_recorded_not_fatal():
    config = PotentialConfig()
    state = State(0.0, np.zeros(5),
                  np.ones(4), np.array([-0.1, 0.5, -0.02, 0.8]))
    du = np.array([0.1, -0.4, 0.2, 0.3])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        events = watchdog_step(state, config, du, 90.0)
    assert len(events) == 1
    assert events[0].infeasible
    assert config.active_a_low


def test_config_rejects_nonpositive_strengths():
    with pytest.raises(ValueError, match="gamma2"):
        PotentialConfig(gamma2=0.0)


def test_interval_feasibility_flag():
    assert GammaInterval(0.1, 0.2).feasible
    assert not GammaInterval(0.3, 0.2).feasible
