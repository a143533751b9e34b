"""Pointwise viscous-plastic closures and quadratic drag laws.

Everything here broadcasts over numpy arrays; no grid knowledge.  The
replacement closure caps the viscosities smoothly: zeta saturates at
P / (2 delta_min) for small strain rates instead of diverging.
"""
from __future__ import annotations

import numpy as np

from .model import PhysParams, RheologyFields


def ice_strength(h, a, params: PhysParams):
    """P = P* h exp(-C (1 - A))."""
    return params.p_star * h * np.exp(-params.conc_c * (1.0 - a))


def strain_delta(du_dx, params: PhysParams):
    """Regularized strain measure sqrt((1 + e^-2) (u_x^2 + eps2)), > 0 always."""
    c1 = 1.0 + params.ellipse_e ** -2
    return np.sqrt(c1 * (np.asarray(du_dx) ** 2 + params.eps2))


def viscosities(pressure, delta, params: PhysParams):
    """Capped bulk and shear viscosities (zeta, eta).

    zeta = P / (2 delta_min) * tanh(delta_min / delta); eta = zeta e^-2.
    The tanh recovers P / (2 delta) for delta >> delta_min and saturates at
    P / (2 delta_min) for delta -> 0.
    """
    zeta = pressure / (2.0 * params.delta_min) * np.tanh(params.delta_min / delta)
    return zeta, zeta * params.ellipse_e ** -2


def stress(zeta, eta, du_dx, pressure):
    """sigma = (eta + zeta) u_x - P/2."""
    return (eta + zeta) * du_dx - 0.5 * pressure


def wind_stress(u_air, params: PhysParams):
    """tau_a = rho_a C_da |u_a| u_a."""
    return params.rho_air * params.c_da * np.abs(u_air) * u_air


def water_stress(u, params: PhysParams):
    """tau_w = rho_w C_dw sqrt(u^2 + eps1) u, smooth through u = 0."""
    u = np.asarray(u)
    return params.rho_water * params.c_dw * np.sqrt(u * u + params.eps1) * u


def derive_fields(du_dx, h, a, params: PhysParams) -> RheologyFields:
    """Bundle the per-cell rheology chain for a given strain-rate field."""
    p = ice_strength(h, a, params)
    delta = strain_delta(du_dx, params)
    zeta, eta = viscosities(p, delta, params)
    return RheologyFields(delta, zeta, eta, p, stress(zeta, eta, du_dx, p))
