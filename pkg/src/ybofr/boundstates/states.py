"""Coupled-channel DVR Hamiltonian, bound states and their properties.

The lower hyperfine channels (f2 = 1/2) are open below the f2 = 3/2 limit,
so a finite box also holds discretized continuum states. Each eigenvector
gets an open weight: its probability on the open adiabats outside
``r_cut``. True levels carry almost none; box states carry almost all. A
level that happens to sit next to a box state can hybridize with it, so
:func:`find_levels` repeats the diagonalization with a few box sizes and
keeps the least-hybridized copy of each level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import eigh

from .. import units
from ..angular.channels import ChannelBlock, parity_name
from ..potentials import ModelParams, adiabatic_curves, hyperfine_matrix, potential_matrix
from .grid import GridConfig, RadialGrid, build_grid, kinetic_matrix

DEGENERACY_TOL = units.khz_to_au(1.0)


@dataclass
class PLRWell:
    """Shallow outer well of one adiabatic curve."""

    adiabat: int
    depth: float  # Hartree, positive
    r_min: float  # position of the minimum
    r_inner: float  # inner avoided-crossing radius (barrier top inside the well)

    @property
    def depth_mhz(self) -> float:
        return units.au_to_mhz(self.depth)


@dataclass
class BoundState:
    T: int
    parity: int
    energy: float  # Hartree, negative below the f2 = 3/2 limit
    coeffs: np.ndarray = field(repr=False)  # (n_channels, n_points) DVR coefficients
    grid: RadialGrid = field(repr=False)
    Gamma_M: float = 0.0  # hbar Gamma_M, Hartree
    is_PLR: bool = False
    plr_weight: float = 0.0
    outer_turning_point: float = float("nan")
    channel_weights: np.ndarray = field(default=None, repr=False)
    closed_weight: float = 1.0
    converged: bool = True
    note: str = ""
    multiplicity: int = 1

    @property
    def block(self) -> tuple[int, int]:
        return (self.T, self.parity)

    @property
    def E_b(self) -> float:
        """Binding energy, Hartree (positive)."""
        return -self.energy

    @property
    def E_b_mhz(self) -> float:
        return units.au_to_mhz(-self.energy)

    @property
    def Gamma_M_khz(self) -> float:
        return units.au_to_khz(self.Gamma_M)

    @property
    def amplitudes(self) -> np.ndarray:
        """u_c(r_i) with sum_c integral |u_c|^2 dr = 1."""
        return self.coeffs / np.sqrt(self.grid.weights)[None, :]

    @property
    def norm(self) -> float:
        return float(np.sum(self.coeffs**2))

    def summary(self) -> dict:
        return {
            "T": self.T,
            "parity": parity_name(self.parity),
            "E_b_MHz": self.E_b_mhz,
            "Gamma_M_kHz": self.Gamma_M_khz,
            "is_PLR": self.is_PLR,
            "outer_turning_point_a0": self.outer_turning_point,
            "closed_weight": self.closed_weight,
            "converged": self.converged,
            "note": self.note,
        }


def hamiltonian_bytes(block: ChannelBlock, grid: RadialGrid) -> int:
    n = len(block) * grid.n_points
    return 8 * n * n


def assemble_hamiltonian(block: ChannelBlock, grid: RadialGrid, params: ModelParams, max_bytes: float = 2e9) -> np.ndarray:
    """Dense H = 1_channels x T + blockwise diagonal potential, channel-major ordering."""
    need = hamiltonian_bytes(block, grid)
    if need > max_bytes:
        raise MemoryError(
            f"Hamiltonian needs {need / 1e9:.2f} GB (> cap {max_bytes / 1e9:.2f} GB); "
            "lower beta, shrink r_max or raise the memory cap"
        )
    nc, n = len(block), grid.n_points
    kin = kinetic_matrix(grid, params.reduced_mass)
    h = np.zeros((nc * n, nc * n))
    vmat = potential_matrix(block, grid.r, params)
    idx = np.arange(n)
    for a in range(nc):
        h[a * n : (a + 1) * n, a * n : (a + 1) * n] = kin
        for b in range(nc):
            h[a * n + idx, b * n + idx] += vmat[:, a, b]
    return h


def open_channel_mask(block: ChannelBlock, params: ModelParams, e_top: float = 0.0) -> np.ndarray:
    return np.diag(hyperfine_matrix(block, params)) < e_top


def open_weight(coeffs: np.ndarray, vecs: np.ndarray, grid: RadialGrid, n_open: int, r_cut: float) -> float:
    """Probability on the n_open lowest adiabats outside r_cut."""
    if n_open == 0:
        return 0.0
    sel = grid.r > r_cut
    proj = np.einsum("rca,cr->ra", vecs[sel][:, :, :n_open], coeffs[:, sel])
    return float(np.sum(proj**2))


def resonant_coeffs(state: "BoundState", block: ChannelBlock, params: ModelParams, r_cut: float = 100.0) -> np.ndarray:
    """DVR coefficients with the open-adiabat tail beyond r_cut removed, renormalized.

    That tail is the discretized predissociation continuum: its shape and size
    follow the box, not the resonance.
    """
    n_open = int(np.sum(open_channel_mask(block, params)))
    c = state.coeffs.copy()
    if n_open == 0:
        return c
    sel = state.grid.r > r_cut
    _, vecs = adiabatic_curves(block, state.grid.r[sel], params)
    vo = vecs[:, :, :n_open]
    proj = np.einsum("rca,cr->ra", vo, c[:, sel])
    c[:, sel] -= np.einsum("rca,ra->cr", vo, proj)
    return c / np.sqrt(np.sum(c**2))


def superradiant_weight(coeffs: np.ndarray, block: ChannelBlock) -> float:
    """Integrated probability in case-(c) channels with X = d1.d2/d^2 = +1 (sigma = -1)."""
    cc = block.u_ec.T @ coeffs
    sr = np.array([ch.sigma == -1 for ch in block.case_c_channels])
    return float(np.sum(cc[sr] ** 2))


def molecular_linewidth(state: BoundState, block: ChannelBlock, params: ModelParams) -> float:
    """hbar Gamma_M = 2 hbar Gamma_A x (superradiant case-(c) weight), small-kr limit."""
    return 2 * params.Gamma_A * superradiant_weight(state.coeffs, block) / state.norm


def molecular_linewidth_operator(state: BoundState, block: ChannelBlock, params: ModelParams) -> float:
    """Same quantity from the decay operator sum_q D_q^+ D_q, without case (c)."""
    g = block.decay
    return params.Gamma_A * float(np.einsum("ar,ab,br->", state.coeffs, g, state.coeffs)) / state.norm


def plr_wells(block: ChannelBlock, params: ModelParams, r=None, r_search: float = 25.0, min_gap: float = 0.25) -> list[PLRWell]:
    """Purely long-range wells: local minima below the f2 = 3/2 limit at r > r_search
    whose inner side rises above that limit before reaching short range.

    A minimum that is only the lower half of a narrow avoided crossing (gap to
    the neighbouring adiabats below ``min_gap`` times the depth) is skipped:
    a diabatic curve runs straight through it and it holds no levels of its own.
    """
    if r is None:
        r = np.geomspace(6.0, 1000.0, 6000)
    vals, _ = adiabatic_curves(block, r, params)
    wells = []
    for a in range(vals.shape[1]):
        v = vals[:, a]
        for i in range(1, len(r) - 1):
            if r[i] < r_search or not (v[i] < v[i - 1] and v[i] <= v[i + 1] and v[i] < 0):
                continue
            # walk inward up the wall to the barrier top (the avoided crossing)
            k_top = i
            while k_top > 0 and v[k_top - 1] >= v[k_top]:
                k_top -= 1
            if v[k_top] <= 0:
                continue
            gaps = [abs(vals[i, b] - v[i]) for b in (a - 1, a + 1) if 0 <= b < vals.shape[1]]
            if gaps and min(gaps) < min_gap * abs(v[i]):
                continue
            wells.append(PLRWell(a, -float(v[i]), float(r[i]), float(r[k_top])))
    return wells


def classify_plr(state: BoundState, block: ChannelBlock, grid: RadialGrid, params: ModelParams, vecs=None, threshold: float = 0.9):
    """PLR iff at least ``threshold`` of the probability sits on a PLR adiabat
    outside its inner avoided-crossing radius. Returns (flag, weight, well)."""
    wells = plr_wells(block, params)
    if not wells:
        return False, 0.0, None
    if vecs is None:
        _, vecs = adiabatic_curves(block, grid.r, params)
    best = (0.0, None)
    for w in wells:
        sel = grid.r > w.r_inner
        proj = np.einsum("rc,cr->r", vecs[sel][:, :, w.adiabat], state.coeffs[:, sel])
        weight = float(np.sum(proj**2)) / state.norm
        if weight > best[0]:
            best = (weight, w)
    return bool(best[0] >= threshold), best[0], best[1]


def outer_turning_point(state: BoundState, vals: np.ndarray, vecs: np.ndarray) -> float:
    """Outermost crossing of E with the adiabat carrying most of the probability."""
    proj = np.einsum("rca,cr->ra", vecs, state.coeffs)
    pops = np.sum(proj**2, axis=0)
    a = int(np.argmax(pops))
    v = vals[:, a]
    r = state.grid.r
    inside = np.nonzero(v < state.energy)[0]
    if len(inside) == 0:
        return float("nan")
    k = inside[-1]
    if k + 1 >= len(r):
        return float(r[-1])
    # linear interpolation of the crossing
    t = (state.energy - v[k]) / (v[k + 1] - v[k])
    return float(r[k] + t * (r[k + 1] - r[k]))


def bound_states(
    block: ChannelBlock,
    energy_window: tuple[float, float],
    grid: RadialGrid,
    params: ModelParams,
    r_cut: float = 100.0,
    closed_threshold: float = 0.5,
    endpoint_tol: float = 1e-6,
    max_bytes: float = 2e9,
    keep_continuum: bool = False,
) -> list[BoundState]:
    """Eigenstates with energies in ``energy_window`` (Hartree, both <= 0).

    States whose open weight exceeds 1 - closed_threshold are box states of
    the open channels and are dropped unless ``keep_continuum``. Amplitude on
    the closed adiabats at the outer grid edge above ``endpoint_tol`` of its
    peak marks a state as not converged.
    """
    lo, hi = energy_window
    if not lo < hi <= 0:
        raise ValueError("energy window must satisfy lo < hi <= 0")
    h = assemble_hamiltonian(block, grid, params, max_bytes)
    w, v = eigh(h, subset_by_value=(lo, hi), driver="evr", overwrite_a=True)
    del h
    nc, n = len(block), grid.n_points
    vals, vecs = adiabatic_curves(block, grid.r, params)
    is_open = open_channel_mask(block, params)
    n_open = int(np.sum(is_open))
    states = []
    for k in range(len(w)):
        c = v[:, k].reshape(nc, n)
        s = BoundState(block.T, block.parity, float(w[k]), c, grid)
        s.closed_weight = 1.0 - open_weight(c, vecs, grid, n_open, r_cut)
        if s.closed_weight < closed_threshold and not keep_continuum:
            continue
        s.channel_weights = np.sum(c**2, axis=1)
        s.Gamma_M = molecular_linewidth(s, block, params)
        s.is_PLR, s.plr_weight, _ = classify_plr(s, block, grid, params, vecs)
        s.outer_turning_point = outer_turning_point(s, vals, vecs)
        # closed adiabats, not closed diabatic channels: an open-channel tail
        # carries an f2 = 3/2 admixture that only dies off as 1/r^3
        proj = np.einsum("rca,cr->ar", vecs[:, :, n_open:], s.amplitudes)
        peak = np.max(np.abs(proj))
        edge = np.max(np.abs(proj[:, -3:]))
        if edge > endpoint_tol * peak:
            s.converged = False
            s.note = "not converged - enlarge grid"
        states.append(s)
    states = merge_degenerate(states)
    states.sort(key=lambda s: s.E_b)
    return states


def merge_degenerate(states: list[BoundState], tol: float = DEGENERACY_TOL) -> list[BoundState]:
    """Report eigenvalue clusters within ``tol`` as one level.

    Energy is the cluster mean; Gamma_M and channel weights are cluster sums
    divided by the multiplicity, i.e. traces over the degenerate subspace,
    which do not depend on how the degenerate vectors are rotated.
    """
    if not states:
        return states
    states = sorted(states, key=lambda s: s.energy)
    out, cluster = [], [states[0]]
    for s in states[1:]:
        if s.energy - cluster[-1].energy < tol:
            cluster.append(s)
        else:
            out.append(_merge(cluster))
            cluster = [s]
    out.append(_merge(cluster))
    return out


def _merge(cluster: list[BoundState]) -> BoundState:
    if len(cluster) == 1:
        return cluster[0]
    m = len(cluster)
    base = cluster[0]
    return replace(
        base,
        energy=float(np.mean([s.energy for s in cluster])),
        Gamma_M=float(np.mean([s.Gamma_M for s in cluster])),
        channel_weights=np.mean([s.channel_weights for s in cluster], axis=0),
        closed_weight=float(np.mean([s.closed_weight for s in cluster])),
        is_PLR=any(s.is_PLR for s in cluster),
        multiplicity=m,
    )


@dataclass(frozen=True)
class LevelSearch:
    """Settings for :func:`find_levels`."""

    window_mhz: tuple[float, float] = (-1100.0, 0.0)
    target_Emin_mhz: float = 0.25
    box_scales: tuple[float, ...] = (1.0, 1.07, 1.15)
    r_cut: float = 100.0
    closed_threshold: float = 0.5
    well_resolved: float = 0.9
    match_tol_mhz: float = 0.05
    match_rel: float = 0.01
    grid: GridConfig = GridConfig()
    max_bytes: float = 2e9


def find_levels(block: ChannelBlock, params: ModelParams, search: LevelSearch = LevelSearch()) -> list[BoundState]:
    """Bound levels of a block, stabilized against box-state hybridization.

    Each box size gives a candidate list. For every level the copy with the
    largest closed weight is kept; levels are matched across boxes by energy
    within max(match_tol, match_rel * E_b).
    """
    window = (units.mhz_to_au(search.window_mhz[0]), units.mhz_to_au(search.window_mhz[1]))
    runs = []
    for scale in search.box_scales:
        base = build_grid(block, units.mhz_to_au(search.target_Emin_mhz), params, search.grid)
        cfg = replace(search.grid, r_max=base.r_max * scale)
        grid = build_grid(block, units.mhz_to_au(search.target_Emin_mhz), params, cfg)
        runs.append(
            bound_states(block, window, grid, params, r_cut=search.r_cut, closed_threshold=search.closed_threshold, max_bytes=search.max_bytes)
        )
    levels = list(runs[0])
    for other in runs[1:]:
        for cand in other:
            tol = max(units.mhz_to_au(search.match_tol_mhz), search.match_rel * cand.E_b)
            near = [i for i, s in enumerate(levels) if abs(s.energy - cand.energy) < tol]
            if not near:
                if cand.closed_weight >= search.well_resolved:
                    levels.append(cand)
                continue
            i = min(near, key=lambda j: abs(levels[j].energy - cand.energy))
            if cand.closed_weight > levels[i].closed_weight:
                levels[i] = cand
    levels.sort(key=lambda s: s.E_b)
    for s in levels:
        if s.closed_weight < search.well_resolved:
            s.note = (s.note + "; " if s.note else "") + f"hybridized with open-channel box state (closed weight {s.closed_weight:.2f})"
    return levels
