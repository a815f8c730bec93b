"""Oracle suites behind ``ybofr validate``.

Each check returns (passed, detail). The quick suite runs in well under a
minute; the full suite adds the LeRoy-Bernstein fit and the threshold law of
the calibrated ground potential.
"""

from __future__ import annotations

import math
import time
import numpy as np
from scipy.optimize import curve_fit

from . import numerov, units
from .angular import wigner
from .boundstates.grid import kinetic_matrix, mapped_grid, uniform_grid
from .config import RunConfig


def six_j_from_three_j(j1, j2, j3, j4, j5, j6) -> float:
    """6j symbol as the contraction of four 3j symbols over all projections."""
    acc = 0.0
    for m1 in np.arange(-j1, j1 + 1):
        for m2 in np.arange(-j2, j2 + 1):
            m3 = -m1 - m2
            if abs(m3) > j3:
                continue
            for m5 in np.arange(-j5, j5 + 1):
                m6 = m5 - m1
                m4 = m6 - m2
                if abs(m6) > j6 or abs(m4) > j4:
                    continue
                phase = (j1 + j2 + j3 + j4 + j5 + j6) - (m1 + m2 + m3 + m4 + m5 + m6)
                acc += (-1) ** int(round(phase)) * (
                    wigner.wigner3j(j1, j2, j3, -m1, -m2, -m3)
                    * wigner.wigner3j(j1, j5, j6, m1, -m5, m6)
                    * wigner.wigner3j(j4, j2, j6, m4, m2, -m6)
                    * wigner.wigner3j(j4, j5, j3, -m4, m5, m3)
                )
    return acc


def _wigner_oracle():
    worst = 0.0
    cases = [(0.5, 0.5, 1, 0.5, 0.5, 1), (1, 1, 1, 1, 1, 1), (1.5, 1, 0.5, 0.5, 1, 1.5), (2, 1, 1, 1, 2, 1), (1, 0.5, 1.5, 1.5, 1, 0.5)]
    for case in cases:
        worst = max(worst, abs(six_j_from_three_j(*case) - wigner.wigner6j(*case)))
    return worst < 1e-12, f"max |6j - 3j contraction| = {worst:.2e}"


def _cg_orthogonality():
    worst = 0.0
    for j1, j2 in ((0.5, 1), (1, 1), (1.5, 0.5), (1, 2)):
        for m1 in np.arange(-j1, j1 + 1):
            for m2 in np.arange(-j2, j2 + 1):
                for m1p in np.arange(-j1, j1 + 1):
                    m2p = m1 + m2 - m1p
                    if abs(m2p) > j2:
                        continue
                    s = sum(
                        wigner.clebsch_gordan(j1, m1, j2, m2, j, m1 + m2) * wigner.clebsch_gordan(j1, m1p, j2, m2p, j, m1 + m2)
                        for j in np.arange(abs(j1 - j2), j1 + j2 + 1)
                        if abs(m1 + m2) <= j
                    )
                    worst = max(worst, abs(s - (1.0 if (m1 == m1p) else 0.0)))
    return worst < 1e-13, f"max CG orthogonality defect = {worst:.2e}"


def _ho_dvr():
    mu, omega, r0 = 1.0, 1.0, 10.0
    grid = uniform_grid(0.0, 20.0, 400)
    h = kinetic_matrix(grid, mu) + np.diag(0.5 * mu * omega**2 * (grid.r - r0) ** 2)
    ev = np.linalg.eigvalsh(h)[:10]
    err = np.max(np.abs(ev - omega * (np.arange(10) + 0.5)) / (omega * (np.arange(10) + 0.5)))
    return err < 1e-8, f"max relative HO error (n<10) = {err:.2e}"


def _lj_numerov(params, window_mhz=1100.0):
    """Single channel C12/r^12 - C6/r^6 - C3/r^3 on the production mapped grid vs Numerov shooting."""
    mu = params.reduced_mass

    def v(r):
        return params.C12_excited / r**12 - params.C6_excited / r**6 - params.C3_Omega1 / r**3

    r_min, r_max = 5.8, 600.0
    grid = mapped_grid(params, r_min, r_max, units.mhz_to_au(window_mhz + 200.0), 2.0)
    h = kinetic_matrix(grid, mu) + np.diag(v(grid.r))
    lo = units.mhz_to_au(-window_mhz)
    dvr = np.linalg.eigvalsh(h)
    dvr = dvr[(dvr > lo) & (dvr < 0)]
    ref = numerov.bound_levels(v, mu, r_min, r_max, lo, 0.0, phase_step=0.02)
    if len(ref) != len(dvr):
        return False, f"level count differs: DVR {len(dvr)}, Numerov {len(ref)}"
    err = float(np.max(np.abs(units.au_to_mhz(dvr - ref))))
    return err < 0.1, f"{len(ref)} levels, max |DVR - Numerov| = {err * 1e3:.3f} kHz"


def leroy_bernstein_exponent(binding: np.ndarray) -> tuple[float, float]:
    """Fit E_v = A (v_D - v)^n to consecutive binding energies (deepest first).

    Returns (n, v_D) with v counted from 0 at the first entry.
    """
    e = np.asarray(binding, dtype=float)
    v = np.arange(len(e), dtype=float)
    guess_vd = len(e) - 1 + 1.0
    popt, _ = curve_fit(lambda x, a, vd, n: a * (vd - x) ** n, v, e, p0=[e[0] / guess_vd**6, guess_vd, 6.0], maxfev=20000)
    return float(popt[2]), float(popt[1])


def c3_model_levels(params, c3: float = 0.1939, r_max: float = 5000.0, window_mhz: float = 50.0):
    """Binding energies (MHz) of C12/r^12 - C3/r^3 whose outer turning point sits well inside r_max."""
    mu = params.reduced_mass

    def v(r):
        return params.C12_excited / r**12 - c3 / r**3

    e = numerov.bound_levels(v, mu, 5.8, r_max, units.mhz_to_au(-window_mhz), 0.0, phase_step=0.05, rel_tol=1e-11)
    r_turn = (c3 / -e) ** (1 / 3)
    return units.au_to_mhz(-e[r_turn < r_max / 4])


def _leroy_bernstein(params):
    eb = c3_model_levels(params)
    n, _ = leroy_bernstein_exponent(eb[-4:])
    return abs(n - 6) <= 0.3, f"exponent on last 4 levels = {n:.3f} (levels {np.round(eb[-4:], 3).tolist()} MHz)"


def run_suite(name: str, cfg: RunConfig) -> dict:
    checks = {
        "wigner_6j_vs_3j_contraction": _wigner_oracle,
        "clebsch_gordan_orthogonality": _cg_orthogonality,
        "harmonic_oscillator_dvr": _ho_dvr,
        "lennard_jones_dvr_vs_numerov": lambda: _lj_numerov(cfg.params),
    }
    if name == "full":
        from .scattering import background_scattering_length
        from .pipeline import calibrated_params

        def threshold():
            p = calibrated_params(cfg)
            a = background_scattering_length(p)
            return abs(a - p.a_bg_target) < 0.01, f"a_bg (Richardson) = {a:.4f} a0"

        checks["ground_threshold_law"] = threshold
        checks["leroy_bernstein_c3"] = lambda: _leroy_bernstein(cfg.params)
        checks["lennard_jones_dvr_vs_numerov_deep"] = lambda: _lj_numerov(cfg.params, window_mhz=20000.0)
    results = {}
    for key, fn in checks.items():
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # report, do not crash the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results[key] = {"passed": bool(ok), "detail": detail, "seconds": round(time.perf_counter() - t0, 3)}
    return {"suite": name, "passed": all(r["passed"] for r in results.values()), "checks": results}
