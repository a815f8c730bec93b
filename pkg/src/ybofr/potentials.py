"""Model parameters and r-dependent Hamiltonian pieces for a channel block.

Energies are in Hartree, lengths in bohr. The zero of energy is the
1S0 + 3P1(f=3/2) separated-atom limit for the excited manifold and the
1S0 + 1S0 limit for the ground manifold.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from . import units
from .angular.channels import EXCITED, CaseEChannel, ChannelBlock

YB171_MASS_U = 170.9363258

_DEFAULT_PROVENANCE = {
    "C6_excited": "paper",
    "C12_excited": "paper",
    "C3_Omega1": "paper",
    "C3_Omega0": "paper",
    "C6_ground": "literature:Kitagawa et al., Phys. Rev. A 77, 012719 (2008)",
    "C12_ground": "calibrated",
    "hyperfine_splitting_3P1": "literature:3/2 x A(3P1) with A = 3957.19 MHz, Clark et al., Phys. Rev. A 20, 239 (1979)",
    "Gamma_A": "paper",
    "wavelength": "literature:1S0-3P1 intercombination line, 555.8 nm (NIST ASD)",
    "atomic_mass": "literature:AME atomic mass of 171Yb, 170.9363258 u",
    "a_bg_target": "paper",
}


@dataclass(frozen=True)
class ModelParams:
    """Physical constants, all in atomic units.

    ``Gamma_A`` is the atomic linewidth as an energy (hbar * Gamma_A).
    ``hyperfine_splitting_3P1`` is E(f=3/2) - E(f=1/2); a negative value
    inverts the hyperfine ordering.
    """

    C6_excited: float = 2810.0
    C12_excited: float = 1.862e8
    C3_Omega1: float = 0.09695
    C3_Omega0: float = -0.1939
    C6_ground: float = 1932.0
    C12_ground: float | None = None
    hyperfine_splitting_3P1: float = units.mhz_to_au(5935.785)
    Gamma_A: float = units.cyclic_hz_to_angular_au(182e3)
    wavelength: float = units.nm_to_bohr(555.8)
    atomic_mass: float = units.amu_to_au(YB171_MASS_U)
    a_bg_target: float = -0.15
    provenance: dict = field(default_factory=lambda: dict(_DEFAULT_PROVENANCE), compare=False)

    def __post_init__(self):
        positive = ["C6_excited", "C12_excited", "C3_Omega1", "C6_ground", "Gamma_A", "wavelength", "atomic_mass"]
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.C3_Omega0 < 0:
            raise ValueError("C3_Omega0 must be negative")
        if self.C12_ground is not None and not self.C12_ground > 0:
            raise ValueError("C12_ground must be positive")
        if self.hyperfine_splitting_3P1 == 0:
            raise ValueError("hyperfine_splitting_3P1 must be nonzero")
        missing = [f.name for f in dataclasses.fields(self) if f.name != "provenance" and f.name not in self.provenance]
        if missing:
            raise ValueError(f"no provenance for {missing}")

    @property
    def reduced_mass(self) -> float:
        return self.atomic_mass / 2

    @property
    def d_A_squared(self) -> float:
        """Transition dipole squared from the linewidth: (3/4) hbar Gamma (lambda/2pi)^3."""
        lam_bar = self.wavelength / (2 * math.pi)
        return 0.75 * self.Gamma_A * lam_bar**3

    @property
    def d_A(self) -> float:
        return math.sqrt(self.d_A_squared)

    def C3(self, omega: int) -> float:
        if omega == 1:
            return self.C3_Omega1
        if omega == 0:
            return self.C3_Omega0
        raise ValueError("omega must be 0 or 1")

    def with_updates(self, provenance: dict | None = None, **changes) -> ModelParams:
        prov = dict(self.provenance)
        prov.update(provenance or {})
        return dataclasses.replace(self, provenance=prov, **changes)

    def require_ground(self) -> float:
        if self.C12_ground is None:
            raise ValueError("C12_ground is not set; run scattering.calibrate_ground first")
        return self.C12_ground

    def describe(self) -> dict:
        """Flat dict of values in practical units with provenance, for output headers."""
        return {
            "C6_excited_au": self.C6_excited,
            "C12_excited_au": self.C12_excited,
            "C3_Omega1_au": self.C3_Omega1,
            "C3_Omega0_au": self.C3_Omega0,
            "C6_ground_au": self.C6_ground,
            "C12_ground_au": self.C12_ground,
            "hyperfine_splitting_MHz": units.au_to_mhz(self.hyperfine_splitting_3P1),
            "Gamma_A_over_2pi_kHz": units.au_to_khz(self.Gamma_A),
            "wavelength_nm": units.bohr_to_m(self.wavelength) * 1e9,
            "atomic_mass_u": self.atomic_mass * units.ELECTRON_MASS_U,
            "reduced_mass_au": self.reduced_mass,
            "d_A_au": self.d_A,
            "a_bg_target_a0": self.a_bg_target,
            "provenance": dict(self.provenance),
        }


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    return r


def excited_bo_potential(omega: int, sigma: int, r, params: ModelParams):
    """C12/r^12 - C6/r^6 - sigma C3^Omega / r^3."""
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    r = _check_r(r)
    out = params.C12_excited / r**12 - params.C6_excited / r**6 - sigma * params.C3(omega) / r**3
    return out if out.ndim else float(out)


def ground_potential(r, params: ModelParams):
    """Lennard-Jones model C12g/r^12 - C6g/r^6 of the 1S0 + 1S0 pair."""
    c12 = params.require_ground()
    r = _check_r(r)
    out = c12 / r**12 - params.C6_ground / r**6
    return out if out.ndim else float(out)


def hyperfine_matrix(block: ChannelBlock, params: ModelParams) -> np.ndarray:
    if block.manifold != EXCITED:
        return np.zeros((len(block), len(block)))
    diag = np.where(block.f2_values == 1.5, 0.0, -params.hyperfine_splitting_3P1)
    return np.diag(diag)


def rotational_term(channel: CaseEChannel, r, params: ModelParams):
    R = int(channel.R)
    r = _check_r(r)
    out = R * (R + 1) / (2 * params.reduced_mass * r**2)
    return out if np.ndim(out) else float(out)


def _bo_diagonal(block: ChannelBlock, r: np.ndarray, params: ModelParams) -> np.ndarray:
    """(n_r, n_c) Born-Oppenheimer potentials of the case-(c) channels."""
    cols = [excited_bo_potential(int(ch.Omega), ch.sigma, r, params) for ch in block.case_c_channels]
    return np.stack(cols, axis=-1)


def potential_matrix(block: ChannelBlock, r, params: ModelParams) -> np.ndarray:
    """Full potential (BO + hyperfine + rotation) in the case-(e) basis.

    Scalar r gives an (n, n) matrix; an array of radii gives (n_r, n, n).
    """
    r = _check_r(r)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    n = len(block)
    if block.manifold == EXCITED:
        u = block.u_ec
        vdiag = _bo_diagonal(block, r, params)
        m = np.einsum("ia,ra,ja->rij", u, vdiag, u)
        m = 0.5 * (m + np.swapaxes(m, 1, 2))
        m += hyperfine_matrix(block, params)[None]
    else:
        m = np.zeros((len(r), n, n))
        m += ground_potential(r, params)[:, None, None] * np.eye(n)[None]
    R = block.R_values
    m[:, np.arange(n), np.arange(n)] += R * (R + 1) / (2 * params.reduced_mass * r[:, None] ** 2)
    return m[0] if scalar else m


def potential_matrix_direct(block: ChannelBlock, r, params: ModelParams) -> np.ndarray:
    """Same matrix built from the projected dipole-dipole operator, without case (c).

    Uses V = C12/r^12 - C6/r^6 + C3^1 A / r^3, where A is the angular
    dipole-dipole operator in units of d^2 and C3^1 = d^2.
    """
    r = np.atleast_1d(_check_r(r))
    n = len(block)
    iso = params.C12_excited / r**12 - params.C6_excited / r**6
    m = iso[:, None, None] * np.eye(n)[None] + (params.C3_Omega1 / r**3)[:, None, None] * block.dipole_dipole[None]
    m += hyperfine_matrix(block, params)[None]
    R = block.R_values
    m[:, np.arange(n), np.arange(n)] += R * (R + 1) / (2 * params.reduced_mass * r[:, None] ** 2)
    return m


def adiabatic_curves(block: ChannelBlock, r, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (n_r, n) ascending and eigenvectors (n_r, n, n) of the potential matrix."""
    m = potential_matrix(block, np.atleast_1d(r), params)
    return np.linalg.eigh(m)


def asymptotic_thresholds(block: ChannelBlock, params: ModelParams) -> np.ndarray:
    return np.diag(hyperfine_matrix(block, params)).copy()
