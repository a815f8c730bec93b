"""Ground-state 1S0 + 1S0 scattering on the calibrated model potential."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import numerov, units
from .potentials import ModelParams, ground_potential


@dataclass(frozen=True)
class ScatteringConfig:
    r_start: float = 5.0
    # local phase per step and step/r cap: together they keep the
    # two-solution Wronskian flat to ~1e-9 from 10 nK to 100 uK
    phase_step: float = 0.01
    h_rel: float = 0.005
    scan_phase_step: float = 0.05  # coarse value for bracketing calibration roots only
    h_max: float = 20.0
    zero_energy_r_max: float = 20000.0
    match_r_min: float = 1500.0
    match_wavelengths: float = 3.0
    tail_r: float = 6000.0


@dataclass
class ScatteringState:
    E_col: float  # Hartree
    k: float  # 1/bohr
    l: int
    r: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)  # energy normalized
    phase_shift: float
    fit_residual: float
    normalization: str = "energy"

    @property
    def a_extracted(self) -> float:
        """-tan(delta)/k, the energy-dependent scattering length (s wave)."""
        return -math.tan(self.phase_shift) / self.k

    def __call__(self, r) -> np.ndarray:
        return CubicSpline(self.r, self.u)(r)


@dataclass
class GroundCalibration:
    C12: float
    a: float
    nodes: int
    r_equilibrium: float
    well_depth_cm: float
    landscape: list = field(default_factory=list, repr=False)


def _ground_with(params: ModelParams, c12: float) -> ModelParams:
    return params.with_updates(C12_ground=c12)


def _q0(params: ModelParams, l: int = 0):
    mu = params.reduced_mass

    def q(r):
        return 2 * mu * ground_potential(r, params) + l * (l + 1) / r**2

    return q


def zero_energy_solution(params: ModelParams, config: ScatteringConfig = ScatteringConfig(), refine: float = 1.0):
    q = _q0(params)
    r0 = numerov.wall_start(q, config.r_start, config.zero_energy_r_max)
    grid = numerov.doubling_grid(q, r0, config.zero_energy_r_max, config.phase_step / refine, config.h_max, h_rel=config.h_rel / refine)
    return numerov.propagate(q(grid), grid)


def zero_energy_scattering_length(params: ModelParams, config: ScatteringConfig = ScatteringConfig(), refine: float = 1.0):
    """(a, nodes) from u -> r - a; the leading -C6 tail correction beta^4 / (3 r^3) is removed."""
    sol = zero_energy_solution(params, config, refine)
    i = len(sol.r) - 3
    u, up = sol.value_and_derivative(i)
    r = sol.r[i]
    beta4 = 2 * params.reduced_mass * params.C6_ground
    a = r - u / up - beta4 / (3 * r**3)
    return float(a), sol.nodes


def _equilibrium(params: ModelParams, c12: float) -> tuple[float, float]:
    re = (2 * c12 / params.C6_ground) ** (1 / 6)
    depth = params.C6_ground**2 / (4 * c12)
    return re, depth * units.HARTREE_HZ / 2.99792458e10


def _scan(params, c12_values, config):
    coarse = replace(config, phase_step=config.scan_phase_step)
    return [(float(c), *zero_energy_scattering_length(_ground_with(params, c), coarse)) for c in c12_values]


def _brackets(land, target):
    out = []
    for (c0, a0, n0), (c1, a1, n1) in zip(land[:-1], land[1:]):
        if n0 == n1 and (a0 - target) * (a1 - target) < 0:
            out.append((c0, c1, n0))
    return out


def _no_root(land, n_show=20):
    step = max(1, len(land) // n_show)
    return ValueError(
        "no calibration root in scanned range; landscape (C12, a, nodes): "
        + "; ".join(f"{c:.4e},{a:.2f},{n}" for c, a, n in land[::step])
    )


def calibrate_ground(
    params: ModelParams,
    a_bg_target: float | None = None,
    r_eq_reference: float | None = 8.7,
    config: ScatteringConfig = ScatteringConfig(),
    span: float = 0.08,
    n_scan: int = 161,
) -> GroundCalibration:
    """Fit C12 of the ground Lennard-Jones model to a zero-energy scattering length.

    Every branch between two poles of a(C12) contains one root. With a
    reference equilibrium distance the branch closest to it is used, found
    by scanning log C12 over +/- ``span`` decades around C6 r_e^6 / 2.
    With ``r_eq_reference=None`` the branch with the fewest zero-energy
    nodes is used instead, found by walking r_e inward from 200 a0.
    """
    target = params.a_bg_target if a_bg_target is None else a_bg_target
    if r_eq_reference is None:
        land = []
        for re in 200.0 * 0.99 ** np.arange(400):
            land += _scan(params, [params.C6_ground * re**6 / 2], config)
            found = _brackets(land[-2:], target) if len(land) > 1 else []
            if found:
                break
        else:
            raise _no_root(land)
        c0, c1, nodes = found[0]
        c0, c1 = min(c0, c1), max(c0, c1)
    else:
        c12_ref = params.C6_ground * r_eq_reference**6 / 2
        land = _scan(params, c12_ref * 10 ** np.linspace(-span, span, n_scan), config)
        roots = _brackets(land, target)
        if not roots:
            raise _no_root(land)
        c0, c1, nodes = min(roots, key=lambda t: abs(math.log(math.sqrt(t[0] * t[1]) / c12_ref)))
    def resid(c):
        return zero_energy_scattering_length(_ground_with(params, c), config)[0] - target

    # the bracket came from the coarse scan: widen it a little if the production step moved the root
    for _ in range(8):
        if resid(c0) * resid(c1) < 0:
            break
        w = c1 - c0
        c0, c1 = c0 - 0.25 * w, c1 + 0.25 * w
    c12 = brentq(resid, c0, c1, xtol=1e-12 * c0, rtol=1e-14)
    a, n = zero_energy_scattering_length(_ground_with(params, c12), config)
    if n != nodes:
        raise RuntimeError("calibration root left its branch")
    re, depth = _equilibrium(params, c12)
    return GroundCalibration(c12, a, n, re, depth, land)


def apply_calibration(params: ModelParams, cal: GroundCalibration) -> ModelParams:
    return params.with_updates(
        C12_ground=cal.C12,
        provenance={"C12_ground": f"calibrated:a={cal.a:.4f} a0, {cal.nodes} zero-energy nodes, r_e={cal.r_equilibrium:.3f} a0"},
    )


def wave_number(E_col: float, params: ModelParams) -> float:
    return math.sqrt(2 * params.reduced_mass * E_col)


def _riccati(l: int, x):
    """Riccati-Bessel x j_l(x) and x y_l(x) for l = 0, 1."""
    if l == 0:
        return np.sin(x), -np.cos(x)
    if l == 1:
        return np.sin(x) / x - np.cos(x), -np.cos(x) / x - np.sin(x)
    raise ValueError("only l = 0, 1 supported")


def scattering_wavefunction(
    E_col: float,
    params: ModelParams,
    l: int = 0,
    r_max: float | None = None,
    config: ScatteringConfig = ScatteringConfig(),
    refine: float = 1.0,
) -> ScatteringState:
    """Energy-normalized radial solution u ~ sqrt(2 mu / (pi k)) sin(kr - l pi/2 + delta).

    Matching uses two radii a quarter wavelength apart beyond
    max(match_r_min, match_wavelengths * lambda, tail_r), where the -C6/r^6
    phase correction is negligible; the residual of the asymptotic fit over
    the last oscillation is recorded.
    """
    if E_col <= 0:
        raise ValueError("collision energy must be positive")
    mu = params.reduced_mass
    k = wave_number(E_col, params)
    lam = 2 * math.pi / k
    r_match = max(config.match_r_min, config.match_wavelengths * lam, config.tail_r)
    r_end = r_match + 1.5 * lam
    if r_max is not None and r_max < r_end:
        raise ValueError(f"r_max={r_max:.0f} a0 is too small at this energy; need at least {r_end:.0f} a0")

    def q(r):
        return 2 * mu * (ground_potential(r, params) - E_col) + l * (l + 1) / r**2

    h_max = min(config.h_max, lam / 40)
    r0 = numerov.wall_start(q, config.r_start, r_end)
    grid = numerov.doubling_grid(q, r0, r_end, config.phase_step / refine, h_max, h_rel=config.h_rel / refine)
    sol = numerov.propagate(q(grid), grid)
    r, u = sol.r, sol.u
    # least-squares fit to A j + B y over the last oscillation
    sel = r > r_end - lam
    fj, fy = _riccati(l, k * r[sel])
    coef, *_ = np.linalg.lstsq(np.column_stack([fj, fy]), u[sel], rcond=None)
    amp_j, amp_y = coef
    fit = amp_j * fj + amp_y * fy
    resid = float(np.max(np.abs(fit - u[sel])) / np.max(np.abs(u[sel])))
    delta = math.atan2(-amp_y, amp_j)
    amp = math.hypot(amp_j, amp_y)
    norm = math.sqrt(2 * mu / (math.pi * k)) / amp
    if math.cos(delta) * amp_j < 0:
        norm = -norm
    u = u * norm
    # two-radius phase as a cross-check on the fit
    return ScatteringState(E_col, k, l, r, u, delta, resid)


def wronskian_drift(E_col: float, params: ModelParams, l: int = 0, config: ScatteringConfig = ScatteringConfig()) -> float:
    """Max relative change of the Wronskian of two independent solutions over the scattering grid.

    Both solutions start at the inner classical turning point; under the
    barrier they would grow alike and the Wronskian would be lost to
    cancellation rather than measure the integrator.
    """
    mu = params.reduced_mass
    k = wave_number(E_col, params)
    lam = 2 * math.pi / k
    r_end = max(config.match_r_min, config.match_wavelengths * lam, config.tail_r) + 1.5 * lam

    def q(r):
        return 2 * mu * (ground_potential(r, params) - E_col) + l * (l + 1) / r**2

    r0 = numerov.wall_start(q, config.r_start, r_end)
    grid = numerov.doubling_grid(q, r0, r_end, config.phase_step, min(config.h_max, lam / 40), h_rel=config.h_rel)
    qv = q(grid)
    i = int(np.argmax(qv < 0))
    a = numerov.propagate(qv[i:], grid[i:], 0.0, 1e-3)
    b = numerov.propagate(qv[i:], grid[i:], 1e-3, 1e-3)
    w = numerov.wronskian(a, b)
    return float(np.max(np.abs(w / w[0] - 1)))


def two_radius_phase(state: ScatteringState) -> float:
    """Phase shift from two radii a quarter wavelength apart at the end of the solution."""
    k, l = state.k, state.l
    lam = 2 * math.pi / k
    r2 = state.r[-1] - 0.05 * lam
    r1 = r2 - lam / 4
    spl = CubicSpline(state.r, state.u)
    u1, u2 = spl(r1), spl(r2)
    j1, y1 = _riccati(l, k * r1)
    j2, y2 = _riccati(l, k * r2)
    # u = A (j cos d - y sin d): solve for tan d
    t = (u1 * j2 - u2 * j1) / (u1 * y2 - u2 * y1)
    return math.atan(t)


def background_scattering_length(
    params: ModelParams,
    temperatures_k: tuple[float, ...] = (4e-8, 2e-8, 1e-8),
    config: ScatteringConfig = ScatteringConfig(),
) -> float:
    """Zero-energy limit of -delta_0(k)/k by Richardson extrapolation in k^2.

    The ladder is geometric in energy (factor 2 per step), i.e. k^2 halves;
    a polynomial in k^2 through the points is evaluated at k = 0. With a
    near zero the effective-range term is large (r_e ~ 1/a^2), so the
    ladder has to sit in the nK range for the k^2 expansion to hold.
    """
    ks, vals = [], []
    for t in temperatures_k:
        st = scattering_wavefunction(units.kelvin_to_au(t), params, config=config)
        ks.append(st.k)
        vals.append(-math.tan(st.phase_shift) / st.k)
    x = np.array(ks) ** 2
    coef = np.polyfit(x, np.array(vals), len(x) - 1)
    return float(np.polyval(coef, 0.0))
