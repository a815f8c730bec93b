"""Run configuration: shipped INI defaults overlaid by a user file."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import units
from .boundstates.grid import GridConfig
from .boundstates.states import LevelSearch
from .potentials import ModelParams, _DEFAULT_PROVENANCE
from .scattering import ScatteringConfig


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: ModelParams
    grid: GridConfig
    search: LevelSearch
    scattering: ScatteringConfig
    r_eq_reference: float | None  # None selects the fewest-nodes branch
    collision_energy: float  # Hartree
    polarization: tuple
    intensity: float
    density_cm3: float
    gate_phase: float
    output_format: str
    float_digits: int
    resolved: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Resolved settings, after defaults, for embedding in outputs."""
        out = {s: dict(v) for s, v in self.resolved.items()}
        out["model"]["provenance"] = dict(self.params.provenance)
        return out


def _defaults_text() -> str:
    return resources.files("ybofr").joinpath("defaults.ini").read_text(encoding="utf-8")


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=None, interpolation=None)
    cp.optionxform = str
    return cp


def _float(cp, sec, key, allow_empty=False):
    raw = cp.get(sec, key, fallback="").strip()
    if raw == "":
        if allow_empty:
            return None
        raise ConfigError(f"[{sec}] {key} is required")
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{sec}] {key} = {raw!r} is not a number") from None


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Read defaults, then ``path``, then ``overrides`` {section: {key: value}}."""
    cp = _parser()
    cp.read_string(_defaults_text())
    known = {s: set(cp[s]) for s in cp.sections()}
    user_keys = set()
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        user = _parser()
        try:
            user.read(p, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {p}: {exc}") from None
        for sec in user.sections():
            if sec not in known:
                raise ConfigError(f"unknown section [{sec}]")
            for key, val in user[sec].items():
                if key not in known[sec]:
                    raise ConfigError(f"unknown key [{sec}] {key}")
                cp[sec][key] = val
                user_keys.add((sec, key))
    for sec, kv in (overrides or {}).items():
        for key, val in kv.items():
            if sec not in known or key not in known[sec]:
                raise ConfigError(f"unknown key [{sec}] {key}")
            cp[sec][key] = str(val)
            user_keys.add((sec, key))
    return _resolve(cp, user_keys)


def _resolve(cp, user_keys) -> RunConfig:
    m = "model"
    field_keys = {
        "C6_excited": "C6_excited_au",
        "C12_excited": "C12_excited_au",
        "C3_Omega1": "C3_Omega1_au",
        "C6_ground": "C6_ground_au",
        "C12_ground": "C12_ground_au",
        "hyperfine_splitting_3P1": "hyperfine_splitting_MHz",
        "Gamma_A": "Gamma_A_over_2pi_kHz",
        "wavelength": "wavelength_nm",
        "atomic_mass": "atomic_mass_u",
        "a_bg_target": "a_bg_target_a0",
    }
    prov = dict(_DEFAULT_PROVENANCE)
    for name, key in field_keys.items():
        if (m, key) in user_keys:
            prov[name] = "config"
    if (m, "C3_Omega1_au") in user_keys:
        prov["C3_Omega0"] = "config (-2 x C3_Omega1)"
    c3 = _float(cp, m, "C3_Omega1_au")
    try:
        params = ModelParams(
            C6_excited=_float(cp, m, "C6_excited_au"),
            C12_excited=_float(cp, m, "C12_excited_au"),
            C3_Omega1=c3,
            C3_Omega0=-2 * c3,
            C6_ground=_float(cp, m, "C6_ground_au"),
            C12_ground=_float(cp, m, "C12_ground_au", allow_empty=True),
            hyperfine_splitting_3P1=units.mhz_to_au(_float(cp, m, "hyperfine_splitting_MHz")),
            Gamma_A=units.cyclic_hz_to_angular_au(1e3 * _float(cp, m, "Gamma_A_over_2pi_kHz")),
            wavelength=units.nm_to_bohr(_float(cp, m, "wavelength_nm")),
            atomic_mass=units.amu_to_au(_float(cp, m, "atomic_mass_u")),
            a_bg_target=_float(cp, m, "a_bg_target_a0"),
            provenance=prov,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    g = "grid"
    grid = GridConfig(
        r_min=_float(cp, g, "r_min_a0"),
        r_max=_float(cp, g, "r_max_a0", allow_empty=True),
        beta=_float(cp, g, "beta"),
        envelope_core=_float(cp, g, "envelope_core_a0"),
        energy_margin_mhz=_float(cp, g, "energy_margin_MHz"),
        window_depth_mhz=abs(_float(cp, "search", "window_lo_MHz")),
        min_points_per_wavelength=_float(cp, g, "min_points_per_wavelength"),
    )
    if grid.r_max is not None and grid.r_max <= grid.r_min:
        raise ConfigError("[grid] r_max_a0 must exceed r_min_a0")
    if grid.beta <= 0:
        raise ConfigError("[grid] beta must be positive")
    s = "search"
    try:
        scales = tuple(float(x) for x in cp.get(s, "box_scales").split(","))
    except ValueError:
        raise ConfigError("[search] box_scales must be a comma-separated list of numbers") from None
    lo, hi = _float(cp, s, "window_lo_MHz"), _float(cp, s, "window_hi_MHz")
    if not lo < hi <= 0:
        raise ConfigError("[search] window must satisfy window_lo_MHz < window_hi_MHz <= 0")
    search = LevelSearch(
        window_mhz=(lo, hi),
        target_Emin_mhz=_float(cp, g, "target_Emin_MHz"),
        box_scales=scales,
        r_cut=_float(cp, s, "r_cut_a0"),
        closed_threshold=_float(cp, s, "closed_threshold"),
        grid=grid,
        max_bytes=_float(cp, g, "memory_cap_GB") * 1e9,
    )
    sc = "scattering"
    scat = ScatteringConfig(match_r_min=_float(cp, sc, "match_r_min_a0"), tail_r=_float(cp, sc, "tail_r_a0"))
    e_col = units.kelvin_to_au(1e-6 * _float(cp, sc, "collision_energy_uK"))
    if e_col <= 0:
        raise ConfigError("[scattering] collision_energy_uK must be positive")
    o = "optics"
    try:
        pol = np.array([complex(x.strip().replace(" ", "")) for x in cp.get(o, "polarization").split(",")])
    except ValueError:
        raise ConfigError("[optics] polarization must be three comma-separated (complex) numbers") from None
    norm = math.sqrt(float(np.vdot(pol, pol).real)) if len(pol) == 3 else 0.0
    if norm == 0:
        raise ConfigError("[optics] polarization must be a nonzero 3-vector")
    pol = tuple(complex(x) / norm for x in pol)
    fmt = cp.get("output", "format").strip()
    if fmt not in ("csv", "json"):
        raise ConfigError("[output] format must be csv or json")
    resolved = {sec: dict(cp[sec]) for sec in cp.sections()}
    return RunConfig(
        params=params,
        grid=grid,
        search=search,
        scattering=scat,
        r_eq_reference=_float(cp, sc, "r_eq_reference_a0", allow_empty=True),
        collision_energy=e_col,
        polarization=pol,
        intensity=_float(cp, o, "intensity_W_cm2"),
        density_cm3=_float(cp, o, "density_cm3"),
        gate_phase=_float(cp, o, "gate_phase_rad"),
        output_format=fmt,
        float_digits=int(_float(cp, "output", "float_digits")),
        resolved=resolved,
    )
