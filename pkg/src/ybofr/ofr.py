"""Optical Feshbach resonance quantities built from bound and scattering states.

Conventions: Gamma_M, Gamma_stim and detunings are energies (hbar times the
angular rate) in Hartree; lengths in bohr. Detuning is measured from the
molecular line. Practical-unit wrappers sit at the bottom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import units
from .angular import pair
from .angular.channels import ChannelBlock, enumerate_channels
from .boundstates.states import BoundState, resonant_coeffs
from .potentials import ModelParams
from .scattering import ScatteringState

LINEAR_Z = (0.0, 0.0, 1.0)


def saturation_intensity(params: ModelParams) -> float:
    """I_sat = 2 pi^2 hbar Gamma_A c / (3 lambda^3), in W/cm^2."""
    i_au = 2 * math.pi**2 * params.Gamma_A * units.SPEED_OF_LIGHT_AU / (3 * params.wavelength**3)
    return units.au_to_w_cm2(i_au)


def power_broadened_linewidth(intensity_w_cm2: float, params: ModelParams) -> float:
    """hbar Gamma_A sqrt(1 + I/I_sat), Hartree."""
    return params.Gamma_A * math.sqrt(1 + intensity_w_cm2 / saturation_intensity(params))


def _check_polarization(eps) -> np.ndarray:
    eps = np.asarray(eps, dtype=complex)
    if eps.shape != (3,):
        raise ValueError("polarization must be a 3-vector")
    if abs(np.vdot(eps, eps).real - 1) > 1e-9:
        raise ValueError("polarization must be unit-normalized")
    return eps


def dipole_couplings(block: ChannelBlock, ground_I: int, ground_R: int, ground_T: int, eps) -> dict[int, np.ndarray]:
    """Angular dipole coefficients <e_c (T' M') | (d1 + d2).eps | g (T 0)> / d for M' = -T'..T'.

    Both sides are antisymmetrized product-space vectors, so exchange
    selection rules come out of the overlap rather than being imposed.
    """
    eps = _check_polarization(eps)
    rc = max(block.r_cap, ground_R + 2)
    g = pair.ground_channel_vector(ground_I, ground_R, ground_T, rc)
    if g is None:
        raise ValueError(f"ground state I={ground_I}, R={ground_R} is forbidden by exchange symmetry")
    dg = pair.laser_dipole_operator(eps, rc).apply(g[:, None])[:, 0]
    out = {}
    for m in range(-block.T, block.T + 1):
        cols = []
        for ch in block.channels:
            v = pair.excited_channel_vector(ch.f2.twice, ch.F.twice, int(ch.R), block.T, rc, twice_MT=2 * m)
            cols.append(np.zeros_like(dg, dtype=float) if v is None else v)
        out[m] = np.array(cols).conj() @ dg
    return out


def franck_condon(
    bound: BoundState, scat: ScatteringState, eps, params: ModelParams, block: ChannelBlock | None = None, r_cut: float = 100.0
) -> float:
    """f_FC f_rot = sum_M' |<psi_e M'| d.eps |psi_g>|^2 / (2 d_A^2), units 1/Hartree.

    The ground state is the I = 0, R = 0 s-wave singlet. Summing over the
    degenerate M' of the excited level makes the result independent of the
    (unit) polarization. The excited state enters through its resonant part
    (open-adiabat box tail beyond r_cut removed).
    """
    if scat.l != 0:
        raise ValueError("Franck-Condon factors are defined here for s-wave collisions")
    block = block or enumerate_channels(bound.T, bound.parity)
    if (block.T, block.parity) not in [(1, -1)]:
        raise ValueError(f"block T={block.T}, parity={block.parity} is not reachable from an s-wave singlet")
    coup = dipole_couplings(block, 0, 0, 0, eps)
    ug = scat(bound.grid.r)
    # u_e(r_i) sqrt(w_i) are the DVR coefficients; integral u_e u_g dr = sum c_i u_g(r_i) sqrt(w_i)
    overlaps = resonant_coeffs(bound, block, params, r_cut) @ (ug * np.sqrt(bound.grid.weights))
    total = 0.0
    for m, a in coup.items():
        total += abs(np.dot(a, overlaps)) ** 2
    return total / 2.0


def stimulated_width(fcf: float, intensity_w_cm2: float, params: ModelParams) -> float:
    """Gamma_stim = (pi/2)(I/I_sat) (hbar Gamma_A)^2 f_FC f_rot, Hartree."""
    return 0.5 * math.pi * intensity_w_cm2 / saturation_intensity(params) * params.Gamma_A**2 * fcf


@dataclass
class ResonanceOptics:
    E_b: float  # Hartree
    Gamma_M: float  # Hartree
    fcf: float  # 1/Hartree
    k: float  # 1/bohr at E_col_used
    E_col_used: float
    polarization: tuple = LINEAR_Z
    label: str = ""
    params: ModelParams = field(default=None, repr=False)

    def gamma_stim(self, intensity_w_cm2: float) -> float:
        return stimulated_width(self.fcf, intensity_w_cm2, self.params)

    def l_opt(self, intensity_w_cm2: float) -> float:
        return optical_length(self.gamma_stim(intensity_w_cm2), self.k, self.Gamma_M)

    @property
    def l_opt_per_intensity(self) -> float:
        """bohr per W/cm^2."""
        return self.l_opt(1.0)


def resonance_optics(bound: BoundState, scat: ScatteringState, params: ModelParams, eps=LINEAR_Z, block=None) -> ResonanceOptics:
    fcf = franck_condon(bound, scat, eps, params, block)
    return ResonanceOptics(bound.E_b, bound.Gamma_M, fcf, scat.k, scat.E_col, tuple(eps), f"{bound.E_b_mhz:.1f} MHz", params)


def optical_length(gamma_stim: float, k: float, gamma_m: float) -> float:
    """l_opt = Gamma_stim / (2 k Gamma_M)."""
    return gamma_stim / (2 * k * gamma_m)


def complex_scattering_length(l_opt: float, delta: float, gamma_m: float, gamma_stim: float) -> tuple[float, float]:
    """(a_opt, b_opt) for one isolated line; delta, gamma in the same units."""
    den = delta**2 + 0.25 * (gamma_m + gamma_stim) ** 2
    return l_opt * delta * gamma_m / den, 0.5 * l_opt * gamma_m**2 / den


def loss_coefficient(b_opt: float, params: ModelParams) -> dict[str, float]:
    """Two-body loss coefficient in cm^3/s.

    ``rate`` is 4 pi hbar b / mu, from the decoherence rate 2 K n = 8 pi hbar n b / mu.
    ``identical`` is half of it, the identical-particle convention
    K_2 = 2 pi hbar b / mu that the quoted design-point number follows.
    """
    k_au = 4 * math.pi * b_opt / params.reduced_mass
    return {"rate": units.cm3_per_s_from_au(k_au), "identical": units.cm3_per_s_from_au(k_au / 2)}


def gate_fidelity(gamma_m: float, delta: float) -> float:
    """F = exp(-(pi/2) Gamma_M/|Delta|) for the pi/2 (sqrt SWAP) phase."""
    if delta == 0:
        return 0.0
    return math.exp(-0.5 * math.pi * gamma_m / abs(delta))


@dataclass
class OFRPoint:
    intensity: float  # W/cm^2
    delta: float  # Hartree
    a_opt: float
    b_opt: float
    gamma_stim: float
    K_rate: float  # cm^3/s
    K_identical: float
    fidelity: float
    tau_gate: float  # s

    def row(self) -> dict:
        return {
            "I_W_cm2": self.intensity,
            "Delta_MHz": units.au_to_mhz(self.delta),
            "a_opt_a0": self.a_opt,
            "b_opt_a0": self.b_opt,
            "Gamma_stim_MHz": units.au_to_mhz(self.gamma_stim),
            "K_cm3_s": self.K_rate,
            "K_identical_cm3_s": self.K_identical,
            "F": self.fidelity,
            "tau_gate_us": self.tau_gate * 1e6,
        }


def gate_time(a_opt: float, density_cm3: float, params: ModelParams, target_phase: float = math.pi / 2) -> float:
    """tau = phi mu / (4 pi hbar n |a_opt|), seconds."""
    if a_opt == 0:
        raise ValueError("a_opt = 0: no finite gate time (detuning on resonance?)")
    n = units.per_cm3_to_au(density_cm3)
    return units.au_time_to_s(target_phase * params.reduced_mass / (4 * math.pi * n * abs(a_opt)))


def ofr_point(res: ResonanceOptics, intensity: float, delta: float, density_cm3: float, target_phase: float = math.pi / 2) -> OFRPoint:
    gs = res.gamma_stim(intensity)
    l_opt = optical_length(gs, res.k, res.Gamma_M)
    a, b = complex_scattering_length(l_opt, delta, res.Gamma_M, gs)
    k = loss_coefficient(b, res.params)
    tau = gate_time(a, density_cm3, res.params, target_phase) if delta != 0 else float("inf")
    return OFRPoint(intensity, delta, a, b, gs, k["rate"], k["identical"], gate_fidelity(res.Gamma_M, delta), tau)


@dataclass
class GatePlan:
    intensity: float  # W/cm^2
    delta: float  # Hartree
    density: float  # cm^-3
    tau_gate: float  # s
    phase: float
    fidelity: float
    a_opt: float
    b_opt: float
    gamma_stim: float
    power_broadened_linewidth: float  # Hartree
    broadening_warning: bool
    E_b: float

    def as_dict(self) -> dict:
        return {
            "I_W_cm2": self.intensity,
            "Delta_MHz": units.au_to_mhz(self.delta),
            "n_cm3": self.density,
            "tau_gate_us": self.tau_gate * 1e6,
            "phase_rad": self.phase,
            "F": self.fidelity,
            "a_opt_a0": self.a_opt,
            "b_opt_a0": self.b_opt,
            "Gamma_stim_MHz": units.au_to_mhz(self.gamma_stim),
            "power_broadened_Gamma_A_MHz": units.au_to_mhz(self.power_broadened_linewidth),
            "power_broadening_warning": self.broadening_warning,
            "E_b_MHz": units.au_to_mhz(self.E_b),
        }


def intensity_for_stim_width(res: ResonanceOptics, gamma_stim: float) -> float:
    """Intensity (W/cm^2) at which Gamma_stim reaches the requested value."""
    return gamma_stim / res.gamma_stim(1.0)


def gate_plan(
    res: ResonanceOptics,
    intensity: float | None,
    delta: float,
    density_cm3: float,
    target_phase: float = math.pi / 2,
    broadening_margin: float = 0.1,
) -> GatePlan:
    """Gate design at one line. With ``intensity=None`` the intensity is set
    so that Gamma_stim = |Delta|, the broadening rule of the design point.

    The power-broadened atomic linewidth is flagged when it exceeds
    ``broadening_margin`` times the binding energy (distance from the atomic line).
    """
    if delta == 0:
        raise ValueError("detuning 0 gives a_opt = 0 and no finite gate time")
    if intensity is None:
        intensity = intensity_for_stim_width(res, abs(delta))
    pt = ofr_point(res, intensity, delta, density_cm3, target_phase)
    pb = power_broadened_linewidth(intensity, res.params)
    return GatePlan(
        intensity, delta, density_cm3, pt.tau_gate, target_phase, pt.fidelity, pt.a_opt, pt.b_opt, pt.gamma_stim, pb,
        pb > broadening_margin * res.E_b, res.E_b,
    )


def implied_collision_energy(l_opt_per_intensity: float, intensity: float, stim_over_gamma_m: float, params: ModelParams) -> float:
    """Collision energy (Hartree) consistent with l_opt(I) = Gamma_stim / (2 k Gamma_M)."""
    k = stim_over_gamma_m / (2 * l_opt_per_intensity * intensity)
    return k * k / (2 * params.reduced_mass)


def neighbor_ratio(res: ResonanceOptics, neighbor: ResonanceOptics, intensity: float, delta: float) -> float:
    """|l_opt/Delta| of the neighbouring line relative to the addressed line at the same laser frequency."""
    # laser frequency fixed: line energy is -E_b, so Delta_nb = Delta + E_b(nb) - E_b
    d_nb = delta + neighbor.E_b - res.E_b
    return abs(neighbor.l_opt(intensity) / d_nb) / abs(res.l_opt(intensity) / delta)
