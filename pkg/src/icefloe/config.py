"""Plain-text run configuration: key=value lines, units at the boundary.

Values are SI internally; lengths accept m/km suffixes, times s/min/h/d,
speeds m/s and km/h.  Scenario presets carry the canonical grids, steps and
initial conditions; explicit keys override presets.  Changing `cells` alone
keeps the preset domain length and rescales dx accordingly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .evp import EvpConfig
from .jfnk import NewtonConfig
from .model import Boundary, Grid, PhysParams, Scheme, State, make_grid
from .potential import PotentialConfig, PotentialForm


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


SCENARIOS = ("mms", "sharp_vp", "sharp_evp", "potential_dirichlet", "custom")
INTEGRATORS = ("tvrk3", "jfnk", "evp")

_SCHEMES = {s.value: s for s in Scheme}
_BOUNDARIES = {b.value: b for b in Boundary}
_FORMS = {f.value: f for f in PotentialForm}

_LENGTH_UNITS = {"m": 1.0, "km": 1.0e3}
_TIME_UNITS = {"s": 1.0, "min": 60.0, "h": 3600.0, "d": 86400.0}
_SPEED_UNITS = {"m/s": 1.0, "km/h": 1.0 / 3.6}


@dataclass
class RunSpec:
    """Fully resolved description of one run."""

    scenario: str
    scheme: Scheme
    integrator: str
    n_cells: int
    dx: float
    boundary: Boundary
    dt: float
    horizon: float
    wind: float
    params: PhysParams = field(default_factory=PhysParams)
    evp: EvpConfig = field(default_factory=EvpConfig)
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    potential_on: bool = False
    gamma1: float = 1e-3
    gamma2: float = 1e-2
    gamma_h: float = 1e-3
    potential_form: PotentialForm = PotentialForm.QUADRATIC
    cadence: float | None = None     # snapshot interval, seconds; None = preset
    h0: float = 1.0                  # custom-scenario uniform initial fields
    a0: float = 0.9
    trace_start: float | None = None
    trace_stop: float | None = None

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def make_potential(self) -> PotentialConfig | None:
        if not self.potential_on:
            return None
        return PotentialConfig(
            gamma1=self.gamma1, gamma2=self.gamma2, gamma_h=self.gamma_h,
            form=self.potential_form,
        )

    def snapshot_every(self) -> int:
        """Snapshot stride in steps from the cadence (>= 1 step)."""
        cadence = self.cadence
        if cadence is None:
            cadence = 60.0 if self.horizon <= 3600.0 else 3600.0
        return max(1, int(round(cadence / self.dt)))


_PRESETS = {
    "mms": dict(scheme=Scheme.CD, integrator="tvrk3", boundary=Boundary.PERIODIC,
                cells=50, dx=40.0e3, dt=1e-4, horizon=5.0, wind=10.0),
    "sharp_vp": dict(scheme=Scheme.WENO, integrator="tvrk3", boundary=Boundary.PERIODIC,
                     cells=200, dx=10.0e3, dt=1.0, horizon=3600.0, wind=10.0),
    "sharp_evp": dict(scheme=Scheme.WENO, integrator="evp", boundary=Boundary.PERIODIC,
                      cells=200, dx=10.0e3, dt=10.0, horizon=3600.0, wind=10.0,
                      n_sub=1000),
    "potential_dirichlet": dict(scheme=Scheme.CD, integrator="jfnk",
                                boundary=Boundary.DIRICHLET, cells=100, dx=20.0e3,
                                dt=90.0, horizon=518400.0, wind=10.0),
    "custom": dict(scheme=None, integrator=None, boundary=Boundary.PERIODIC,
                   cells=None, dx=None, dt=None, horizon=None, wind=10.0),
}


def _parse_unit_value(text: str, units: dict, what: str) -> float:
    m = re.fullmatch(r"\s*([-+0-9.eE]+)\s*([a-zA-Z/]*)\s*", text)
    if not m:
        raise ConfigError(f"cannot parse {what} value {text!r}")
    try:
        value = float(m.group(1))
    except ValueError as exc:
        raise ConfigError(f"cannot parse {what} value {text!r}") from exc
    suffix = m.group(2)
    if suffix == "":
        return value
    if suffix not in units:
        allowed = ", ".join(sorted(units))
        raise ConfigError(f"unknown {what} unit {suffix!r} (allowed: {allowed})")
    return value * units[suffix]


def _parse_float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {what} value {text!r}") from exc


def _parse_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {what} value {text!r}") from exc


def _parse_choice(text: str, choices, what: str):
    key = text.strip().lower()
    if key not in choices:
        allowed = ", ".join(sorted(choices))
        raise ConfigError(f"unknown {what} {text!r} (allowed: {allowed})")
    if isinstance(choices, dict):
        return choices[key]
    return key


def _parse_bool(text: str, what: str) -> bool:
    key = text.strip().lower()
    if key in ("on", "true", "yes", "1"):
        return True
    if key in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"cannot parse {what} value {text!r} (use on/off)")


def parse_pairs(text: str) -> dict:
    """key=value lines -> dict; '#' comments and blank lines are skipped."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


_KNOWN_KEYS = {
    "scenario", "scheme", "integrator", "boundary", "cells", "dx", "dt",
    "horizon", "wind", "n_sub", "damping", "potential", "potential_form",
    "gamma1", "gamma2", "gamma_h", "cadence", "h0", "a0",
    "trace_start", "trace_stop", "newton_kmax", "newton_tol", "newton_fd_eps",
}


def load_config(text: str) -> RunSpec:
    """Parse and cross-validate a configuration into a RunSpec."""
    pairs = parse_pairs(text)
    unknown = set(pairs) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")

    scenario = _parse_choice(pairs.get("scenario", "custom"), SCENARIOS, "scenario")
    preset = _PRESETS[scenario]

    scheme = preset["scheme"]
    if "scheme" in pairs:
        scheme = _parse_choice(pairs["scheme"], _SCHEMES, "scheme")
    integrator = preset["integrator"]
    if "integrator" in pairs:
        integrator = _parse_choice(pairs["integrator"], INTEGRATORS, "integrator")
    boundary = preset["boundary"]
    if "boundary" in pairs:
        boundary = _parse_choice(pairs["boundary"], _BOUNDARIES, "boundary")

    cells = preset["cells"]
    dx = preset["dx"]
    if scenario != "custom" and preset["cells"] is not None:
        domain = preset["cells"] * preset["dx"]
        if "cells" in pairs and "dx" in pairs:
            cells = _parse_int(pairs["cells"], "cells")
            dx = _parse_unit_value(pairs["dx"], _LENGTH_UNITS, "length")
        elif "cells" in pairs:
            cells = _parse_int(pairs["cells"], "cells")
            if cells <= 0:
                raise ConfigError(f"cells must be positive, got {cells}")
            dx = domain / cells
        elif "dx" in pairs:
            dx = _parse_unit_value(pairs["dx"], _LENGTH_UNITS, "length")
            ratio = domain / dx
            if abs(ratio - round(ratio)) > 1e-9:
                raise ConfigError(
                    f"dx {dx} m does not divide the {domain / 1e3:g} km domain evenly"
                )
            cells = int(round(ratio))
    else:
        if "cells" in pairs:
            cells = _parse_int(pairs["cells"], "cells")
        if "dx" in pairs:
            dx = _parse_unit_value(pairs["dx"], _LENGTH_UNITS, "length")

    dt = preset["dt"]
    if "dt" in pairs:
        dt = _parse_unit_value(pairs["dt"], _TIME_UNITS, "time")
    horizon = preset["horizon"]
    if "horizon" in pairs:
        horizon = _parse_unit_value(pairs["horizon"], _TIME_UNITS, "time")
    wind = preset["wind"]
    if "wind" in pairs:
        wind = _parse_unit_value(pairs["wind"], _SPEED_UNITS, "speed")

    for name, value in (("cells", cells), ("dx", dx), ("dt", dt), ("horizon", horizon)):
        if value is None:
            raise ConfigError(f"scenario {scenario!r} requires an explicit {name} key")
    if scheme is None:
        raise ConfigError(f"scenario {scenario!r} requires an explicit scheme key")
    if integrator is None:
        raise ConfigError(f"scenario {scenario!r} requires an explicit integrator key")
    if not dt > 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if not horizon > 0:
        raise ConfigError(f"horizon must be positive, got {horizon}")

    if scheme is not Scheme.CD and boundary is not Boundary.PERIODIC:
        raise ConfigError("WENO schemes require periodic boundaries")
    if integrator == "jfnk" and scheme is not Scheme.CD:
        raise ConfigError("the implicit momentum solver works on the staggered CD layout only")

    evp = EvpConfig(
        n_sub=_parse_int(pairs["n_sub"], "n_sub") if "n_sub" in pairs else preset.get("n_sub", 100),
        damping_factor=_parse_float(pairs["damping"], "damping") if "damping" in pairs else 0.36,
    )
    newton = NewtonConfig(
        k_max=_parse_int(pairs["newton_kmax"], "newton_kmax") if "newton_kmax" in pairs else 150,
        gamma_nl=_parse_float(pairs["newton_tol"], "newton_tol") if "newton_tol" in pairs else 1e-6,
        fd_eps=_parse_float(pairs["newton_fd_eps"], "newton_fd_eps") if "newton_fd_eps" in pairs else 1e-7,
    )

    spec = RunSpec(
        scenario=scenario,
        scheme=scheme,
        integrator=integrator,
        n_cells=cells,
        dx=dx,
        boundary=boundary,
        dt=dt,
        horizon=horizon,
        wind=wind,
        evp=evp,
        newton=newton,
        potential_on=_parse_bool(pairs["potential"], "potential") if "potential" in pairs else False,
        gamma1=_parse_float(pairs["gamma1"], "gamma1") if "gamma1" in pairs else 1e-3,
        gamma2=_parse_float(pairs["gamma2"], "gamma2") if "gamma2" in pairs else 1e-2,
        gamma_h=_parse_float(pairs["gamma_h"], "gamma_h") if "gamma_h" in pairs else 1e-3,
        potential_form=_parse_choice(pairs["potential_form"], _FORMS, "potential form")
        if "potential_form" in pairs else PotentialForm.QUADRATIC,
        cadence=_parse_unit_value(pairs["cadence"], _TIME_UNITS, "time")
        if "cadence" in pairs else None,
        h0=_parse_float(pairs["h0"], "h0") if "h0" in pairs else 1.0,
        a0=_parse_float(pairs["a0"], "a0") if "a0" in pairs else 0.9,
        trace_start=_parse_unit_value(pairs["trace_start"], _TIME_UNITS, "time")
        if "trace_start" in pairs else None,
        trace_stop=_parse_unit_value(pairs["trace_stop"], _TIME_UNITS, "time")
        if "trace_stop" in pairs else None,
    )
    build_grid(spec)  # surface grid problems as config errors
    return spec


def build_grid(spec: RunSpec) -> Grid:
    try:
        return make_grid(spec.n_cells, spec.dx, spec.scheme.layout, spec.boundary)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


SHARP_THIN_START = 400.0e3   # m
SHARP_THIN_STOP = 1600.0e3   # m
SHARP_H = (2.0, 0.01)        # (outside, inside) m
SHARP_A = (0.8, 0.0)


def sharp_profile(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Discontinuous (h, A): thin ice strictly inside (400, 1600] km.

    At the jump coordinates themselves the left-limit value applies, so
    x = 400 km carries thick ice and x = 1600 km thin ice.
    """
    x = np.asarray(x)
    thin = (x > SHARP_THIN_START) & (x <= SHARP_THIN_STOP)
    h = np.where(thin, SHARP_H[1], SHARP_H[0])
    a = np.where(thin, SHARP_A[1], SHARP_A[0])
    return h, a


def initial_state(spec: RunSpec, grid: Grid) -> State:
    """Scenario initial conditions on the grid's native points."""
    if spec.scenario == "mms":
        from .mms import mms_initial_state

        return mms_initial_state(grid)
    if spec.scenario in ("sharp_vp", "sharp_evp"):
        h, a = sharp_profile(grid.x_centers)
        return State(0.0, np.zeros(grid.n_u), h, a)
    # potential_dirichlet and custom: uniform fields at rest
    h0, a0 = (1.0, 0.9) if spec.scenario == "potential_dirichlet" else (spec.h0, spec.a0)
    return State(
        0.0,
        np.zeros(grid.n_u),
        np.full(grid.n_cells, float(h0)),
        np.full(grid.n_cells, float(a0)),
    )


def apply_overrides(spec_text: str, overrides: list[str]) -> str:
    """Append --set key=value pairs to the config text (last wins is an error;
    overrides replace existing lines instead)."""
    pairs = parse_pairs(spec_text)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        pairs[key.strip().lower()] = value.strip()
    return "\n".join(f"{k} = {v}" for k, v in pairs.items())
