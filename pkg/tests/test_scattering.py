"""Ground-state calibration and energy-normalized scattering states."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from ybofr import units
from ybofr.scattering import (
    _ground_with,
    background_scattering_length,
    calibrate_ground,
    scattering_wavefunction,
    two_radius_phase,
    wave_number,
    wronskian_drift,
    zero_energy_scattering_length,
)


def test_calibration_hits_target(calibration, ground_params):
    assert calibration.a == pytest.approx(-0.15, abs=0.01)
    assert zero_energy_scattering_length(ground_params)[0] == pytest.approx(-0.15, abs=1e-6)
    # default branch: equilibrium distance nearest the 8.7 a0 reference
    assert calibration.r_equilibrium == pytest.approx(8.7, abs=0.1)
    assert ground_params.provenance["C12_ground"].startswith("calibrated")


def test_calibration_integrator_converged(ground_params, calibration):
    a2, n2 = zero_energy_scattering_length(ground_params, refine=2.0)
    assert abs(a2 - calibration.a) < 0.005
    assert n2 == calibration.nodes


def test_scattering_length_monotone_on_branch(params, calibration):
    c = calibration.C12 * (1 + np.linspace(-2e-4, 2e-4, 9))
    res = [zero_energy_scattering_length(_ground_with(params, x)) for x in c]
    a = np.array([r[0] for r in res])
    assert {r[1] for r in res} == {calibration.nodes}
    d = np.diff(a)
    assert np.all(d > 0) or np.all(d < 0)
    assert a.min() < -0.15 < a.max()


def test_fewest_nodes_branch(params):
    cal = calibrate_ground(params, r_eq_reference=None)
    assert cal.a == pytest.approx(-0.15, abs=0.01)
    assert cal.nodes == 0
    # the only nodeless root sits absurdly far out: why it is not the default
    assert cal.r_equilibrium > 50


def test_no_root_reports_landscape(params):
    with pytest.raises(ValueError, match="landscape"):
        calibrate_ground(params, span=1e-7, n_scan=3)


def test_wave_number_at_2uK(ground_params):
    k = wave_number(units.kelvin_to_au(2e-6), ground_params)
    assert k == pytest.approx(1.4e-3, rel=0.01)


def test_asymptotic_form_and_fit_residual(scat_2uK, ground_params):
    s = scat_2uK
    assert s.normalization == "energy"
    assert s.fit_residual < 1e-4
    amp = math.sqrt(2 * ground_params.reduced_mass / (math.pi * s.k))
    sel = s.r > s.r[-1] - 2 * math.pi / s.k
    free = amp * np.sin(s.k * s.r[sel] + s.phase_shift)
    assert np.max(np.abs(s.u[sel] - free)) < 1e-4 * amp


def test_two_radius_phase_agrees_with_fit(scat_2uK):
    assert two_radius_phase(scat_2uK) == pytest.approx(scat_2uK.phase_shift, abs=1e-7)


@pytest.mark.parametrize("temperature", [1e-8, 2e-6, 2.5e-5])
def test_phase_converged_under_step_halving(ground_params, temperature):
    e = units.kelvin_to_au(temperature)
    a = scattering_wavefunction(e, ground_params)
    b = scattering_wavefunction(e, ground_params, refine=2.0)
    assert abs(a.phase_shift - b.phase_shift) < 1e-6


@pytest.mark.parametrize("temperature", [1e-8, 2e-6, 2.5e-5])
def test_wronskian_r_independent(ground_params, temperature):
    assert wronskian_drift(units.kelvin_to_au(temperature), ground_params) < 1e-8


def test_energy_normalization_against_free_waves(ground_params):
    """Overlap of two nearby energies over a finite box, against the same
    integral of the asymptotic free waves with the computed phases."""
    e1 = units.kelvin_to_au(2e-6)
    e2 = 1.05 * e1
    s1 = scattering_wavefunction(e1, ground_params)
    s2 = scattering_wavefunction(e2, ground_params)
    big_r = min(s1.r[-1], s2.r[-1])
    r = np.linspace(1e-3, big_r, 400001)
    got = np.trapezoid(s1(np.clip(r, s1.r[0], None)) * s2(np.clip(r, s2.r[0], None)) * (r > max(s1.r[0], s2.r[0])), r)
    mu = ground_params.reduced_mass
    pref = 2 * mu / (math.pi * math.sqrt(s1.k * s2.k))
    free, _ = quad(lambda x: math.sin(s1.k * x + s1.phase_shift) * math.sin(s2.k * x + s2.phase_shift), 0, big_r, limit=500)
    assert abs(free) > 0.1 * big_r / 2  # not a trivially vanishing overlap
    assert got == pytest.approx(pref * free, rel=0.05)


def test_richardson_background_length(ground_params):
    assert background_scattering_length(ground_params) == pytest.approx(-0.15, abs=0.005)


def test_energy_dependent_length_tends_to_a_bg(ground_params):
    vals = [scattering_wavefunction(units.kelvin_to_au(t), ground_params).a_extracted for t in (4e-8, 2e-8, 1e-8)]
    assert vals[0] > vals[1] > vals[2] > -0.15
    assert abs(vals[2] + 0.15) < 0.02


@pytest.mark.xfail(
    strict=True,
    reason="a_bg is nearly zero, so the effective-range term (~1/a^2) dominates -delta/k even at 100 nK: "
    "it gives -0.033 a0 there, not -0.15 a0 within 5%",
)
def test_threshold_law_at_100nK(ground_params):
    s = scattering_wavefunction(units.kelvin_to_au(1e-7), ground_params)
    assert s.a_extracted == pytest.approx(-0.15, rel=0.05)


def test_p_wave_threshold_law(ground_params):
    """delta_1 ~ k^3 near threshold: halving E divides it by 2^1.5."""
    d = [scattering_wavefunction(units.kelvin_to_au(t), ground_params, l=1).phase_shift for t in (1e-7, 5e-8)]
    assert d[0] / d[1] == pytest.approx(2**1.5, rel=0.05)


def test_refusals(ground_params):
    with pytest.raises(ValueError):
        scattering_wavefunction(0.0, ground_params)
    with pytest.raises(ValueError, match="r_max"):
        scattering_wavefunction(units.kelvin_to_au(1e-8), ground_params, r_max=3000.0)
