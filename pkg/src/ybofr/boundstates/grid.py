"""Mapped radial grids and the sine-DVR kinetic operator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .. import units
from ..angular.channels import ChannelBlock
from ..potentials import ModelParams, adiabatic_curves, hyperfine_matrix


@dataclass(frozen=True)
class GridConfig:
    """Grid construction knobs.

    The map x -> r is uniform in the local phase of an envelope wave number
    k_env(r) = sqrt(2 mu (E_top + W(r))), W(r) a smooth upper bound on the
    well depth; ``beta`` grid points fall in every half-wavelength pi/k_env.
    ``E_top`` is max(0, -threshold) + |target window| + margin, so open
    lower-hyperfine channels are resolved too.
    """

    r_min: float = 5.8
    r_max: float | None = None
    beta: float = 2.0
    r_max_factor: float = 1.5
    envelope_core: float = 7.0
    energy_margin_mhz: float = 200.0
    window_depth_mhz: float = 1100.0
    min_points_per_wavelength: float = 4.0


@dataclass
class RadialGrid:
    r: np.ndarray
    dx: float
    jac: np.ndarray  # dr/dx
    jac_x: np.ndarray  # d(dr/dx)/dx
    jac_xx: np.ndarray
    r_min: float
    r_max: float
    mapping: str

    @property
    def n_points(self) -> int:
        return len(self.r)

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights: integral f dr ~ sum_i w_i f(r_i)."""
        return self.jac * self.dx

    def to_function(self, coeffs: np.ndarray) -> np.ndarray:
        """DVR coefficients -> u(r_i); inverse of sqrt(w_i) scaling."""
        return coeffs / np.sqrt(self.weights)


def uniform_grid(r_min: float, r_max: float, n_intervals: int) -> RadialGrid:
    """Plain Colbert-Miller box grid with interior points only."""
    if r_max <= r_min or n_intervals < 2:
        raise ValueError("need r_min < r_max and at least 2 intervals")
    dx = (r_max - r_min) / n_intervals
    r = r_min + dx * np.arange(1, n_intervals)
    one = np.ones_like(r)
    return RadialGrid(r, dx, one, 0 * one, 0 * one, r_min, r_max, "uniform")


def outer_turning_point_c3(binding: float, params: ModelParams) -> float:
    return (params.C3_Omega1 / binding) ** (1.0 / 3.0)


def mapped_grid(
    params: ModelParams,
    r_min: float,
    r_max: float,
    e_top: float,
    beta: float,
    core: float = 7.0,
) -> RadialGrid:
    c6, c3, mu = params.C6_excited, abs(params.C3_Omega0), params.reduced_mass
    if r_min >= r_max:
        raise ValueError(f"infeasible grid: r_min={r_min} >= r_max={r_max}")

    def w(r):
        return 2 * c6 / (r**6 + core**6) + 2 * c3 / (r**3 + core**3)

    def w_r(r):
        return -12 * c6 * r**5 / (r**6 + core**6) ** 2 - 6 * c3 * r**2 / (r**3 + core**3) ** 2

    def w_rr(r):
        a6, a3 = r**6 + core**6, r**3 + core**3
        return (
            -60 * c6 * r**4 / a6**2
            + 144 * c6 * r**10 / a6**3
            - 12 * c3 * r / a3**2
            + 36 * c3 * r**4 / a3**3
        )

    def jac(r):
        return math.pi / (beta * np.sqrt(2 * mu * (e_top + w(r))))

    hit = lambda x, y: y[0] - r_max  # noqa: E731
    hit.terminal = True
    sol = solve_ivp(lambda x, y: jac(y), [0, 1e8], [r_min], events=hit, rtol=1e-12, atol=1e-12, dense_output=True)
    x_end = sol.t_events[0][0]
    n_int = int(math.ceil(x_end))
    dx = x_end / n_int
    x = dx * np.arange(1, n_int)
    r = sol.sol(x)[0]
    g = e_top + w(r)
    j = jac(r)
    j_r = -0.5 * j * w_r(r) / g
    j_rr = j * (0.75 * (w_r(r) / g) ** 2 - 0.5 * w_rr(r) / g)
    j_x = j * j_r
    j_xx = j * (j_r**2 + j * j_rr)
    return RadialGrid(r, dx, j, j_x, j_xx, r_min, r_max, f"phase-uniform beta={beta} E_top={units.au_to_mhz(e_top):.1f}MHz")


def points_per_wavelength(grid: RadialGrid, block: ChannelBlock, params: ModelParams, e_top: float) -> float:
    """Smallest number of grid points per local de Broglie wavelength at energy
    ``e_top`` on the lowest adiabat, which includes open-channel motion."""
    vals, _ = adiabatic_curves(block, grid.r, params)
    ke = np.clip(e_top - vals[:, 0], 1e-30, None)
    lam = 2 * math.pi / np.sqrt(2 * params.reduced_mass * ke)
    spacing = np.gradient(grid.r)
    return float(np.min(lam / spacing))


def build_grid(block: ChannelBlock, target_Emin: float, params: ModelParams, config: GridConfig = GridConfig()) -> RadialGrid:
    """Grid for states bound by at least ``target_Emin`` (Hartree, positive).

    r_max defaults to ``r_max_factor`` times the C3 outer turning point at
    target_Emin. The sampling check uses the true lowest adiabat.
    """
    if target_Emin <= 0:
        raise ValueError("target_Emin must be a positive binding energy")
    r_max = config.r_max or config.r_max_factor * outer_turning_point_c3(target_Emin, params)
    if config.r_min >= r_max:
        raise ValueError(f"infeasible grid: r_min={config.r_min} >= r_max={r_max}")
    thresholds = np.diag(hyperfine_matrix(block, params))
    e_top = max(0.0, -float(thresholds.min())) + units.mhz_to_au(config.window_depth_mhz + config.energy_margin_mhz)
    grid = mapped_grid(params, config.r_min, r_max, e_top, config.beta, config.envelope_core)
    ppw = points_per_wavelength(grid, block, params, 0.0)
    if ppw < config.min_points_per_wavelength:
        raise ValueError(
            f"grid samples only {ppw:.2f} points per local wavelength "
            f"(< {config.min_points_per_wavelength}); increase beta"
        )
    return grid


def _sine_kinetic_x(n_int: int, dx: float, mu: float) -> np.ndarray:
    """Colbert-Miller kinetic matrix on a uniform box grid with n_int intervals."""
    i = np.arange(1, n_int)[:, None]
    j = np.arange(1, n_int)[None, :]
    pref = math.pi**2 / (4 * mu * dx**2 * n_int**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = pref * (-1.0) ** (i - j) * (1 / np.sin(math.pi * (i - j) / (2 * n_int)) ** 2 - 1 / np.sin(math.pi * (i + j) / (2 * n_int)) ** 2)
    d = np.arange(1, n_int)
    t[d - 1, d - 1] = pref * ((2 * n_int**2 + 1) / 3 - 1 / np.sin(math.pi * d / n_int) ** 2)
    return t


def kinetic_matrix(grid: RadialGrid, mu: float) -> np.ndarray:
    """-(1/2mu) d^2/dr^2 on a mapped grid, symmetrized.

    With r = r(x) and J = dr/dx the kinetic operator on the rescaled
    function J^{1/2} u is (1/2)(G Tx + Tx G) plus a local term, G = 1/J^2.
    """
    n_int = grid.n_points + 1
    tx = _sine_kinetic_x(n_int, grid.dx, mu)
    if grid.mapping == "uniform":
        return tx
    j, jx, jxx = grid.jac, grid.jac_x, grid.jac_xx
    g = 1.0 / j**2
    t = 0.5 * (g[:, None] * tx + tx * g[None, :])
    t[np.diag_indices_from(t)] += (1.75 * jx**2 / j**4 - 0.5 * jxx / j**3) / (2 * mu)
    return t
