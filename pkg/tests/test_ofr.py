"""Resonance optics: closed forms, selection rules and Franck-Condon factors."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ybofr import units
from ybofr.angular.channels import enumerate_channels
from ybofr.ofr import (
    ResonanceOptics,
    complex_scattering_length,
    dipole_couplings,
    franck_condon,
    gate_fidelity,
    gate_plan,
    gate_time,
    implied_collision_energy,
    loss_coefficient,
    neighbor_ratio,
    ofr_point,
    optical_length,
    power_broadened_linewidth,
    resonance_optics,
    saturation_intensity,
    stimulated_width,
)
from ybofr.scattering import scattering_wavefunction

GM = units.khz_to_au(261.0)


def _synthetic(params, l_per_i=840.0, e_b_mhz=396.5):
    """Optics whose l_opt at 1 W/cm^2 is ``l_per_i`` at the 2 uK wave number."""
    e_col = units.kelvin_to_au(2e-6)
    k = math.sqrt(2 * params.reduced_mass * e_col)
    res = ResonanceOptics(units.mhz_to_au(e_b_mhz), GM, 1.0, k, e_col, params=params)
    res.fcf = l_per_i / res.l_opt(1.0)
    return res


# --- saturation intensity and widths -----------------------------------------


def test_saturation_intensity(params):
    isat = saturation_intensity(params)
    assert isat * 1e3 == pytest.approx(0.139, rel=0.01)  # mW/cm^2
    assert saturation_intensity(params.with_updates(wavelength=2 * params.wavelength)) == pytest.approx(isat / 8, rel=1e-12)
    assert saturation_intensity(params.with_updates(Gamma_A=3 * params.Gamma_A)) == pytest.approx(3 * isat, rel=1e-12)


def test_power_broadening_formula(params):
    isat = saturation_intensity(params)
    assert power_broadened_linewidth(3 * isat, params) == pytest.approx(2 * params.Gamma_A, rel=1e-12)
    assert power_broadened_linewidth(0.0, params) == params.Gamma_A


def test_stimulated_width_linear(params):
    assert stimulated_width(0.3, 0.0, params) == 0.0
    assert stimulated_width(0.3, 2.0, params) == pytest.approx(2 * stimulated_width(0.3, 1.0, params), rel=1e-14)
    isat = saturation_intensity(params)
    assert stimulated_width(1.0, isat, params) == pytest.approx(0.5 * math.pi * params.Gamma_A**2, rel=1e-12)


def test_optical_length_linear_in_intensity(params):
    res = _synthetic(params)
    assert res.l_opt(12.7) / res.l_opt(1.0) == pytest.approx(12.7, rel=1e-14)
    assert res.l_opt_per_intensity == pytest.approx(840.0, rel=1e-12)


# --- complex scattering length --------------------------------------------------


def test_design_point():
    a, b = complex_scattering_length(10668.0, -30 * GM, GM, 30 * GM)
    assert a == pytest.approx(-281.0, rel=0.01)
    assert b == pytest.approx(4.68, rel=0.005)
    assert a == pytest.approx(10668.0 * -30 / (900 + 31**2 / 4), rel=1e-14)


def test_on_resonance():
    a, b = complex_scattering_length(100.0, 0.0, GM, 4 * GM)
    assert a == 0.0
    assert b == pytest.approx(2 * 100.0 * GM**2 / (5 * GM) ** 2, rel=1e-14)


@settings(max_examples=200)
@given(
    st.floats(min_value=1.0, max_value=1e5),
    st.floats(min_value=-300.0, max_value=300.0).filter(lambda x: abs(x) > 1e-3),
    st.floats(min_value=0.0, max_value=100.0),
)
def test_resonance_identity_and_symmetry(l_opt, delta_over_gm, stim_over_gm):
    d, gs = delta_over_gm * GM, stim_over_gm * GM
    a, b = complex_scattering_length(l_opt, d, GM, gs)
    assert b > 0 and math.copysign(1, a) == math.copysign(1, d)
    assert (a / b) / (2 * d / GM) == pytest.approx(1.0, rel=1e-12)
    am, bm = complex_scattering_length(l_opt, -d, GM, gs)
    assert am == -a and bm == b


# --- loss, fidelity, gate ---------------------------------------------------------


def test_loss_coefficient_conventions(params):
    k = loss_coefficient(4.68, params)
    assert k["rate"] == pytest.approx(2.3e-12, rel=0.02)
    assert k["identical"] == pytest.approx(1.15e-12, rel=0.02)
    assert loss_coefficient(0.0, params)["rate"] == 0.0
    assert loss_coefficient(9.36, params)["rate"] == pytest.approx(2 * k["rate"], rel=1e-14)


def test_fidelity():
    assert gate_fidelity(GM, 30 * GM) == pytest.approx(math.exp(-math.pi / 60), rel=1e-14)
    assert gate_fidelity(GM, -30 * GM) == pytest.approx(0.949, abs=0.001)
    assert gate_fidelity(GM, GM) == pytest.approx(0.208, abs=0.001)
    assert gate_fidelity(GM, 1e9 * GM) == pytest.approx(1.0, abs=1e-8)


def test_gate_time(params):
    tau = gate_time(-281.0, 2.4e14, params)
    assert tau * 1e6 == pytest.approx(47.0, rel=0.02)
    assert gate_time(-281.0, 4.8e14, params) == pytest.approx(tau / 2, rel=1e-14)
    # phase accumulated over tau is pi/2
    n = units.per_cm3_to_au(2.4e14)
    phi = 4 * math.pi * n * 281.0 / params.reduced_mass * units.s_to_au_time(tau)
    assert phi == pytest.approx(math.pi / 2, rel=1e-12)
    with pytest.raises(ValueError):
        gate_time(0.0, 2.4e14, params)


def test_gate_plan_design_point(params):
    res = _synthetic(params)
    plan = gate_plan(res, None, -30 * GM, 2.4e14)
    assert plan.gamma_stim == pytest.approx(30 * GM, rel=1e-12)
    assert plan.fidelity == pytest.approx(0.949, abs=0.001)
    assert plan.a_opt < 0 and plan.b_opt > 0
    d = plan.as_dict()
    assert d["tau_gate_us"] == pytest.approx(plan.tau_gate * 1e6)
    assert d["power_broadened_Gamma_A_MHz"] == pytest.approx(units.au_to_mhz(power_broadened_linewidth(plan.intensity, params)))
    doubled = gate_plan(res, plan.intensity, -30 * GM, 4.8e14)
    assert doubled.tau_gate == pytest.approx(plan.tau_gate / 2, rel=1e-12)
    assert doubled.fidelity == plan.fidelity
    with pytest.raises(ValueError):
        gate_plan(res, 1.0, 0.0, 2.4e14)


def test_power_broadening_flag(params):
    res = _synthetic(params, e_b_mhz=3.0)
    assert gate_plan(res, 12.7, -30 * GM, 2.4e14).broadening_warning
    assert not gate_plan(_synthetic(params), 0.001, -30 * GM, 2.4e14).broadening_warning


def test_ofr_point_row(params):
    res = _synthetic(params)
    pt = ofr_point(res, 12.7, units.mhz_to_au(-7.83), 2.4e14)
    row = pt.row()
    assert set(row) >= {"I_W_cm2", "Delta_MHz", "a_opt_a0", "b_opt_a0", "K_cm3_s", "F", "tau_gate_us"}
    assert row["Delta_MHz"] == pytest.approx(-7.83)
    assert math.isinf(ofr_point(res, 12.7, 0.0, 2.4e14).tau_gate)


def test_implied_collision_energy(params):
    e = implied_collision_energy(840.0, 12.7, 30.0, params)
    assert units.au_to_kelvin(e) * 1e6 == pytest.approx(2.0, rel=0.05)
    k = math.sqrt(2 * params.reduced_mass * e)
    assert k == pytest.approx(1.4e-3, rel=0.02)


def test_neighbor_ratio(params):
    res = _synthetic(params)
    nb = _synthetic(params, l_per_i=1500.0, e_b_mhz=250.2)
    delta = -30 * GM
    d_nb = delta + nb.E_b - res.E_b
    expect = abs(nb.l_opt(1.0) / d_nb) / abs(res.l_opt(1.0) / delta)
    assert neighbor_ratio(res, nb, 1.0, delta) == pytest.approx(expect, rel=1e-14)
    # laser 7.83 MHz red of the 396.5 line sits 154.1 MHz from the 250.2 line
    assert neighbor_ratio(res, nb, 1.0, delta) == pytest.approx((1500 / 154.13) / (840 / 7.83), rel=1e-3)


# --- selection rules and Franck-Condon ----------------------------------------------


@pytest.mark.parametrize("eps", [(0, 0, 1), (1, 0, 0), (2**-0.5, 1j * 2**-0.5, 0)])
def test_triplet_does_not_couple_to_s_wave_block(eps):
    block = enumerate_channels(1, -1)
    for T in range(3):
        for a in dipole_couplings(block, 1, 1, T, eps).values():
            assert np.all(a == 0)
    singlet = dipole_couplings(block, 0, 0, 0, eps)
    assert max(np.max(np.abs(a)) for a in singlet.values()) > 0.1


def test_exchange_forbidden_ground_state_rejected():
    with pytest.raises(ValueError, match="exchange"):
        dipole_couplings(enumerate_channels(1, -1), 1, 0, 0, (0, 0, 1))


def test_franck_condon_polarization_independent(params, small_states, scat_2uK):
    _, states = small_states
    s = states[-1]
    ref = franck_condon(s, scat_2uK, (0, 0, 1), params)
    assert ref > 0
    for eps in [(1, 0, 0), (2**-0.5, 1j * 2**-0.5, 0), (0.6, 0, 0.8j)]:
        assert franck_condon(s, scat_2uK, eps, params) == pytest.approx(ref, rel=1e-10)


def test_franck_condon_rejections(params, small_states, scat_2uK, ground_params):
    _, states = small_states
    s = states[-1]
    with pytest.raises(ValueError, match="unit"):
        franck_condon(s, scat_2uK, (0, 0, 2), params)
    with pytest.raises(ValueError):
        franck_condon(s, scat_2uK, (0, 0, 1), params, block=enumerate_channels(2, 1))
    p_wave = scattering_wavefunction(units.kelvin_to_au(2e-6), ground_params, l=1)
    with pytest.raises(ValueError):
        franck_condon(s, p_wave, (0, 0, 1), params)


def test_franck_condon_threshold_law(params, ground_params, small_states):
    _, states = small_states
    s = states[-1]
    ratios = []
    for t in (1e-7, 1e-6):
        scat = scattering_wavefunction(units.kelvin_to_au(t), ground_params)
        ratios.append(franck_condon(s, scat, (0, 0, 1), params) / scat.k)
    assert ratios[0] == pytest.approx(ratios[1], rel=0.02)


def test_resonance_optics_carries_line_data(params, small_states, scat_2uK):
    _, states = small_states
    s = states[-1]
    res = resonance_optics(s, scat_2uK, params)
    assert res.E_b == s.E_b and res.Gamma_M == s.Gamma_M
    assert res.fcf >= 0 and res.l_opt_per_intensity >= 0
    assert res.l_opt(1.0) == pytest.approx(optical_length(res.gamma_stim(1.0), scat_2uK.k, s.Gamma_M))


def test_franck_condon_insensitive_to_box(params, ground_params, s_block, scat_2uK):
    """The discretized predissociation tail changes with r_max; the resonant overlap barely does."""
    from ybofr.boundstates import GridConfig, bound_states, build_grid

    target = units.mhz_to_au(60.0)
    base = build_grid(s_block, target, params).r_max
    window = (units.mhz_to_au(-450.0), units.mhz_to_au(-300.0))
    res, raw = [], []
    for scale in (1.0, 1.07, 1.15):
        grid = build_grid(s_block, target, params, GridConfig(r_max=scale * base))
        (s,) = [x for x in bound_states(s_block, window, grid, params) if 380 < x.E_b_mhz < 400]
        res.append(franck_condon(s, scat_2uK, (0, 0, 1), ground_params))
        raw.append(franck_condon(s, scat_2uK, (0, 0, 1), ground_params, r_cut=np.inf))
    spread = np.ptp(res) / np.mean(res)
    assert spread < 3e-3
    assert spread < 0.3 * np.ptp(raw) / np.mean(raw)
