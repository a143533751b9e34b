import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icefloe.model import PhysParams
from icefloe.rheology import (
    derive_fields,
    ice_strength,
    strain_delta,
    stress,
    viscosities,
    water_stress,
    wind_stress,
)

P = PhysParams()

finite_floats = st.floats(
    min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False
)


# Expected values below are frozen from hand evaluation of the closures.

def test_ice_strength_frozen_values():
    assert ice_strength(2.0, 0.8, P) == pytest.approx(1007.3601388803808, rel=1e-14)
    assert ice_strength(1.0, 1.0, P) == 27500.0
    assert ice_strength(0.0, 0.5, P) == 0.0


def test_ice_strength_monotone_in_concentration():
    a = np.linspace(0.0, 1.0, 11)
    p = ice_strength(1.0, a, P)
    assert np.all(np.diff(p) > 0)


def test_strain_delta_frozen_values():
    assert strain_delta(0.0, P) == pytest.approx(1.118033988749895e-11, rel=1e-15)
    assert strain_delta(1e-5, P) == pytest.approx(1.1180339887504538e-05, rel=1e-15)
    assert strain_delta(-2e-6, P) == pytest.approx(2.2360679775277408e-06, rel=1e-15)


@given(finite_floats)
@settings(max_examples=100, deadline=None)
def test_strain_delta_positive_and_even(du):
    d = strain_delta(du, P)
    assert d > 0.0
    assert d == strain_delta(-du, P)


def test_viscosity_recovers_plastic_branch_for_large_strain():
    # tanh(x) ~ x for small x, so zeta ~ P / (2 delta) when delta >> delta_min
    pressure = 1007.3601388803808
    zeta, eta = viscosities(pressure, 1e-3, P)
    assert zeta == pytest.approx(pressure / (2.0 * 1e-3), rel=1e-10)
    assert eta == 0.25 * zeta


def test_viscosity_saturates_at_cap_for_tiny_strain():
    pressure = 27500.0
    cap = pressure / (2.0 * P.delta_min)
    zeta, _ = viscosities(pressure, 1e-13, P)
    assert zeta == pytest.approx(cap, rel=1e-12)
    assert zeta <= cap


@given(
    st.floats(min_value=1e-3, max_value=1e6, allow_nan=False),
    st.floats(min_value=1e-14, max_value=1.0, allow_nan=False),
)
@settings(max_examples=200, deadline=None)
def test_viscosity_cap_holds_everywhere(pressure, delta):
    zeta, eta = viscosities(pressure, delta, P)
    assert 0.0 < zeta <= pressure / (2.0 * P.delta_min)
    assert eta == 0.25 * zeta


def test_viscosity_decreasing_in_delta():
    # flat at the cap (tanh saturates), strictly falling once delta passes
    # the transition scale
    deltas = np.logspace(-12, -2, 30)
    zeta, _ = viscosities(1.0e3, deltas, P)
    assert np.all(np.diff(zeta) <= 0)
    past = deltas > P.delta_min
    assert np.all(np.diff(zeta[past]) < 0)


def test_stress_at_rest_is_minus_half_pressure():
    assert stress(5.0, 1.25, 0.0, 27500.0) == -13750.0


def test_wind_stress_frozen_values():
    assert wind_stress(10.0, P) == pytest.approx(0.156, rel=1e-15)
    assert wind_stress(-7.0, P) == pytest.approx(-0.07644, rel=1e-15)
    assert wind_stress(0.0, P) == 0.0


def test_water_stress_frozen_values():
    assert water_stress(0.2, P) == pytest.approx(0.22572000028215, rel=1e-14)
    assert water_stress(1e-6, P) == pytest.approx(5.671144812998518e-11, rel=1e-14)


def test_water_stress_smooth_at_zero():
    assert water_stress(0.0, P) == 0.0
    # regularized drag stays differentiable: slope ~ rho_w c_dw sqrt(eps1)
    slope = water_stress(1e-12, P) / 1e-12
    assert slope == pytest.approx(P.rho_water * P.c_dw * np.sqrt(P.eps1), rel=1e-6)


@given(finite_floats)
@settings(max_examples=100, deadline=None)
def test_water_stress_odd_and_sign_preserving(u):
    tw = water_stress(u, P)
    assert tw == -water_stress(-u, P)
    # sign preservation, except subnormal u where the product underflows
    if u > 1e-300:
        assert tw > 0
    elif u < -1e-300:
        assert tw < 0


def test_derive_fields_bundles_consistently():
    rng = np.random.default_rng(7)
    du = rng.normal(scale=1e-6, size=40)
    h = rng.uniform(0.5, 2.0, size=40)
    a = rng.uniform(0.3, 1.0, size=40)
    f = derive_fields(du, h, a, P)
    np.testing.assert_array_equal(f.pressure, ice_strength(h, a, P))
    np.testing.assert_array_equal(f.delta, strain_delta(du, P))
    np.testing.assert_array_equal(f.eta, 0.25 * f.zeta)
    np.testing.assert_array_equal(f.sigma, (f.eta + f.zeta) * du - 0.5 * f.pressure)
    assert np.all(f.delta >= np.sqrt((1.0 + P.ellipse_e**-2) * P.eps2))
