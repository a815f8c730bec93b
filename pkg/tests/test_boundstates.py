"""DVR engine, bound-state bookkeeping and adiabatic PLR analysis."""

import math

import numpy as np
import pytest

import ybofr.boundstates.states as states_mod
from ybofr import numerov, units
from ybofr.angular.channels import enumerate_channels
from ybofr.boundstates import (
    GridConfig,
    assemble_hamiltonian,
    bound_states,
    build_grid,
    kinetic_matrix,
    mapped_grid,
    merge_degenerate,
    molecular_linewidth,
    molecular_linewidth_operator,
    plr_wells,
    uniform_grid,
)
from ybofr.potentials import excited_bo_potential, hyperfine_matrix, potential_matrix
from ybofr.validate import c3_model_levels, leroy_bernstein_exponent

# --- kinetic operator ------------------------------------------------------


def test_harmonic_oscillator_uniform_grid():
    grid = uniform_grid(0.0, 20.0, 400)
    h = kinetic_matrix(grid, 1.0) + np.diag(0.5 * (grid.r - 10.0) ** 2)
    ev = np.linalg.eigvalsh(h)[:10]
    n = np.arange(10) + 0.5
    assert np.max(np.abs(ev - n) / n) < 1e-8


def test_harmonic_oscillator_mapped_grid(params):
    """The mapped kinetic operator (Jacobian terms included) on the production map."""
    mu = params.reduced_mass
    grid = mapped_grid(params, 5.8, 300.0, units.mhz_to_au(1300.0), 2.0)
    w = units.mhz_to_au(2000.0)
    ev = np.linalg.eigvalsh(kinetic_matrix(grid, mu) + np.diag(0.5 * mu * w**2 * (grid.r - 40.0) ** 2))[:10]
    n = np.arange(10) + 0.5
    assert np.max(np.abs(ev / w - n) / n) < 1e-8


def test_particle_in_box():
    L, mu = 7.0, 3.0
    grid = uniform_grid(0.0, L, 200)
    ev = np.linalg.eigvalsh(kinetic_matrix(grid, mu))[:20]
    n = np.arange(1, 21)
    ratio = ev / ev[0]
    assert np.max(np.abs(ratio - n**2) / n**2) < 1e-6
    assert ev[0] == pytest.approx((math.pi / L) ** 2 / (2 * mu), rel=1e-10)


def test_kinetic_matrix_symmetric_positive(params):
    grid = mapped_grid(params, 5.8, 400.0, units.mhz_to_au(1300.0), 2.0)
    t = kinetic_matrix(grid, params.reduced_mass)
    assert np.max(np.abs(t - t.T)) == 0.0
    assert np.linalg.eigvalsh(t)[0] > 0


def test_uniform_grid_rejects_bad_box():
    with pytest.raises(ValueError):
        uniform_grid(1.0, 1.0, 10)
    with pytest.raises(ValueError):
        uniform_grid(0.0, 1.0, 1)


# --- grids -----------------------------------------------------------------


def test_grid_reaches_past_outer_turning_point(params, s_block):
    e = units.mhz_to_au(3.1)
    grid = build_grid(s_block, e, params)
    r_turn = (params.C3_Omega1 / e) ** (1 / 3)
    assert r_turn == pytest.approx(590, rel=0.01)
    assert grid.r_max >= 1.5 * r_turn > 880
    assert np.all(np.diff(grid.r) > 0)
    assert grid.r[0] > grid.r_min and grid.r[-1] < grid.r_max
    # interior-point quadrature misses half a cell at each end
    half_cells = 0.5 * (grid.weights[0] + grid.weights[-1])
    assert np.sum(grid.weights) == pytest.approx(grid.r_max - grid.r_min - half_cells, rel=1e-6)


def test_grid_inner_edge_is_deep_in_the_wall(params):
    assert units.au_to_mhz(excited_bo_potential(1, 1, 6.0, params)) > 1e6
    assert units.au_to_mhz(excited_bo_potential(1, 1, GridConfig().r_min, params)) > 1e6


def test_grid_samples_local_wavelength(params, s_block):
    from ybofr.boundstates.grid import points_per_wavelength

    grid = build_grid(s_block, units.mhz_to_au(5.0), params)
    assert points_per_wavelength(grid, s_block, params, 0.0) >= 4.0


@pytest.mark.parametrize(
    "target, cfg",
    [
        (0.0, GridConfig()),
        (units.mhz_to_au(5.0), GridConfig(r_max=5.0)),
        (units.mhz_to_au(5.0), GridConfig(beta=0.3)),
    ],
)
def test_infeasible_grids_rejected(params, s_block, target, cfg):
    with pytest.raises(ValueError):
        build_grid(s_block, target, params, cfg)


def test_memory_cap(params, s_block):
    grid = build_grid(s_block, units.mhz_to_au(5.0), params)
    with pytest.raises(MemoryError, match="shrink r_max"):
        assemble_hamiltonian(s_block, grid, params, max_bytes=1e6)


def test_window_validation(params, small_states, s_block):
    grid, _ = small_states
    with pytest.raises(ValueError):
        bound_states(s_block, (units.mhz_to_au(-10.0), units.mhz_to_au(5.0)), grid, params)


# --- single-channel reduction ------------------------------------------------


def test_single_channel_reduction_matches_numerov(params, s_block, monkeypatch):
    """Hyperfine and off-diagonal couplings zeroed: the block splits into
    independent channels, each checked against Numerov shooting."""
    hf = np.diag(hyperfine_matrix(s_block, params))

    def diag_only(block, r, p):
        m = potential_matrix(block, r, p)
        out = np.zeros_like(m)
        idx = np.arange(m.shape[-1])
        out[..., idx, idx] = np.diagonal(m, axis1=-2, axis2=-1) - hf
        return out

    r_max = 300.0
    grid = build_grid(s_block, units.mhz_to_au(5.0), params, GridConfig(r_max=r_max))
    monkeypatch.setattr(states_mod, "potential_matrix", diag_only)
    ev = np.linalg.eigvalsh(assemble_hamiltonian(s_block, grid, params))
    monkeypatch.undo()
    lo = units.mhz_to_au(-1100.0)
    dvr = np.sort(ev[(ev > lo) & (ev < 0)])
    ref = []
    for c in range(len(s_block)):

        def v(r, c=c):
            return potential_matrix(s_block, np.atleast_1d(r), params)[:, c, c] - hf[c]

        r0 = numerov.wall_start(numerov.local_q(v, params.reduced_mass, lo), grid.r_min, r_max)
        ref += list(numerov.bound_levels(v, params.reduced_mass, r0, r_max, lo, 0.0, phase_step=0.05, rel_tol=1e-10))
    ref = np.sort(ref)
    assert len(dvr) == len(ref) > 10
    assert np.max(np.abs(units.au_to_mhz(dvr - ref))) < 0.1


# --- bound-state bookkeeping -------------------------------------------------


def test_states_are_bound_and_sorted(small_states):
    _, states = small_states
    assert len(states) > 5
    eb = [s.E_b for s in states]
    assert all(e > 0 for e in eb) and eb == sorted(eb)


def test_orthonormality(small_states):
    _, states = small_states
    c = np.array([s.coeffs.ravel() for s in states if s.multiplicity == 1])
    assert np.max(np.abs(c @ c.T - np.eye(len(c)))) < 1e-8


def test_channel_weights_and_amplitude_norm(small_states):
    grid, states = small_states
    for s in states:
        assert np.sum(s.channel_weights) == pytest.approx(1.0, abs=1e-8)
        norm = np.sum(s.amplitudes**2 * grid.weights[None, :])
        assert norm == pytest.approx(1.0, abs=1e-8)


def test_deep_states_are_converged_with_small_endpoint_amplitude(small_states):
    _, states = small_states
    deep = [s for s in states if s.E_b_mhz > 100]
    assert deep and all(s.converged for s in deep)
    for s in deep:
        u = np.abs(s.amplitudes)
        assert np.max(u[:, :3]) < 1e-6 * np.max(u)


def test_small_box_flags_unconverged(params, s_block):
    # outer turning points of levels bound by < 100 MHz lie beyond 160 a0
    grid = build_grid(s_block, units.mhz_to_au(100.0), params, GridConfig(r_max=160.0))
    shallow = bound_states(s_block, (units.mhz_to_au(-100.0), units.mhz_to_au(-1.0)), grid, params)
    assert shallow and not any(s.converged for s in shallow)
    assert all("enlarge grid" in s.note for s in shallow)


def test_linewidth_bounds_and_operator_form(params, s_block, small_states):
    _, states = small_states
    for s in states:
        g = molecular_linewidth(s, s_block, params)
        assert 0.0 <= g <= 2 * params.Gamma_A
        assert molecular_linewidth_operator(s, s_block, params) == pytest.approx(g, rel=1e-10)


def test_linewidth_invariant_within_degenerate_cluster(params, s_block, small_states):
    _, states = small_states
    a, b = [s for s in states if s.multiplicity == 1 and s.E_b_mhz > 100][:2]
    pair = [a, b]
    traces = []
    for theta in (0.0, 0.3, 1.1, 2.5):
        c, s = math.cos(theta), math.sin(theta)
        rot = []
        for coeffs in (c * a.coeffs + s * b.coeffs, -s * a.coeffs + c * b.coeffs):
            st = states_mod.replace(a, coeffs=coeffs, energy=a.energy)
            st.Gamma_M = molecular_linewidth(st, s_block, params)
            st.channel_weights = np.sum(coeffs**2, axis=1)
            rot.append(st)
        merged = merge_degenerate(rot)
        assert len(merged) == 1 and merged[0].multiplicity == 2
        traces.append(merged[0].Gamma_M)
    ref = 0.5 * (pair[0].Gamma_M + pair[1].Gamma_M)
    assert np.max(np.abs(np.array(traces) / ref - 1)) < 1e-10


def test_grid_refinement_converged_and_variational(params, s_block, small_states):
    grid, states = small_states
    fine_cfg = GridConfig(beta=3.0, r_max=grid.r_max)
    fine = build_grid(s_block, units.mhz_to_au(5.0), params, fine_cfg)
    assert fine.n_points > 1.4 * grid.n_points
    window = (units.mhz_to_au(-1100.0), units.mhz_to_au(-20.0))
    refined = bound_states(s_block, window, fine, params)
    tol = units.mhz_to_au(0.1)
    for s in states:
        if not s.converged or s.closed_weight < 0.99:
            continue
        e = min((t.energy for t in refined), key=lambda x: abs(x - s.energy))
        assert abs(e - s.energy) < tol
        assert e <= s.energy + tol


# --- purely long-range wells -------------------------------------------------


def test_s_wave_plr_well(params, s_block):
    wells = plr_wells(s_block, params)
    assert len(wells) == 1
    assert 80 < wells[0].r_min < 130
    assert wells[0].r_inner < wells[0].r_min


def test_narrow_avoided_crossing_is_not_a_well(params):
    block = enumerate_channels(2, 1)
    assert plr_wells(block, params) == []
    # without the gap filter the lower half of the crossing shows up
    assert len(plr_wells(block, params, min_gap=0.0)) >= 1


def test_plr_states_live_outside_the_inner_crossing(small_states):
    _, states = small_states
    for s in states:
        assert (s.plr_weight >= 0.9) == s.is_PLR
    plr = [s for s in states if s.is_PLR]
    assert plr and all(s.outer_turning_point > 100 for s in plr)


# --- near-dissociation scaling ------------------------------------------------


def test_leroy_bernstein_exponent(params):
    eb = c3_model_levels(params)
    n, v_d = leroy_bernstein_exponent(eb[-4:])
    assert abs(n - 6) <= 0.3
    assert v_d > len(eb) - 1


def test_leroy_bernstein_fit_recovers_exact_power_law():
    v = np.arange(6)
    n, v_d = leroy_bernstein_exponent(3.0 * (7.4 - v) ** 6)
    assert n == pytest.approx(6.0, abs=1e-6) and v_d == pytest.approx(7.4, abs=1e-6)
