"""End-to-end drivers shared by the CLI and the acceptance tests."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import units
from .angular.channels import allowed_excited_blocks, enumerate_channels, parse_parity
from .boundstates.states import BoundState, find_levels
from .config import RunConfig
from .ofr import ResonanceOptics, resonance_optics
from .potentials import ModelParams
from .scattering import ScatteringState, apply_calibration, calibrate_ground, scattering_wavefunction

log = logging.getLogger(__name__)

S_WAVE_BLOCK = (1, -1)


def parse_block(spec: str) -> list[tuple[int, int]]:
    """'s', 'p', or 'T,parity' such as '1,odd'."""
    spec = spec.strip().lower()
    if spec in ("s", "p"):
        return allowed_excited_blocks(spec)
    try:
        t, p = spec.split(",")
        return [(int(t), parse_parity(p))]
    except ValueError:
        raise ValueError(f"block must be 's', 'p' or 'T,parity', got {spec!r}") from None


def calibrated_params(cfg: RunConfig) -> ModelParams:
    if cfg.params.C12_ground is not None:
        return cfg.params
    log.info("calibrating ground C12 to a_bg = %.3f a0", cfg.params.a_bg_target)
    cal = calibrate_ground(cfg.params, r_eq_reference=cfg.r_eq_reference, config=cfg.scattering)
    cfg.resolved["model"]["C12_ground_au"] = repr(cal.C12)
    cfg.resolved["model"]["C12_ground_nodes"] = str(cal.nodes)
    return apply_calibration(cfg.params, cal)


def levels(cfg: RunConfig, block_key: tuple[int, int]) -> list[BoundState]:
    block = enumerate_channels(*block_key)
    log.info("block T=%d parity=%+d: %d channels", block.T, block.parity, len(block))
    return find_levels(block, cfg.params, cfg.search)


@dataclass
class LineResult:
    state: BoundState
    optics: ResonanceOptics | None


def s_wave_lines(cfg: RunConfig, with_optics: bool = True) -> tuple[list[LineResult], ScatteringState | None, ModelParams]:
    params = calibrated_params(cfg) if with_optics else cfg.params
    states = levels(cfg, S_WAVE_BLOCK)
    if not with_optics:
        return [LineResult(s, None) for s in states], None, params
    scat = scattering_wavefunction(cfg.collision_energy, params, config=cfg.scattering)
    block = enumerate_channels(*S_WAVE_BLOCK)
    out = [LineResult(s, resonance_optics(s, scat, params, cfg.polarization, block)) for s in states]
    return out, scat, params


def nearest_line(lines: list[LineResult], e_b_mhz: float, tol_mhz: float | None = None) -> LineResult:
    best = min(lines, key=lambda ln: abs(ln.state.E_b_mhz - e_b_mhz))
    if tol_mhz is not None and abs(best.state.E_b_mhz - e_b_mhz) > tol_mhz:
        raise LookupError(f"no computed line within {tol_mhz} MHz of {e_b_mhz} MHz (nearest {best.state.E_b_mhz:.3f})")
    return best


def delta_from_spec(spec: str, gamma_m: float) -> float:
    """Detuning in Hartree from '-30G' (units of Gamma_M) or '-7.8' (MHz)."""
    s = spec.strip()
    if s.lower().endswith("g"):
        return float(s[:-1]) * gamma_m
    return units.mhz_to_au(float(s))
