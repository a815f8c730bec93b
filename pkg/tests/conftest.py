"""Shared fixtures. The expensive ones (level searches, calibration) are
session scoped so the acceptance module and the unit tests reuse them."""

from __future__ import annotations

import pytest

from ybofr import units
from ybofr.angular.channels import allowed_excited_blocks, enumerate_channels
from ybofr.boundstates import GridConfig, LevelSearch, bound_states, build_grid, find_levels
from ybofr.potentials import ModelParams
from ybofr.scattering import apply_calibration, calibrate_ground, scattering_wavefunction

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def params() -> ModelParams:
    return ModelParams()


@pytest.fixture(scope="session")
def calibration(params):
    return calibrate_ground(params)


@pytest.fixture(scope="session")
def ground_params(params, calibration) -> ModelParams:
    return apply_calibration(params, calibration)


@pytest.fixture(scope="session")
def s_block():
    return enumerate_channels(1, -1)


@pytest.fixture(scope="session")
def s_levels(params, s_block):
    """Production level search of the s-wave accessible block."""
    return find_levels(s_block, params, LevelSearch())


@pytest.fixture(scope="session")
def p_levels(params):
    """Production level search of all p-wave accessible blocks, keyed by (T, parity)."""
    return {key: find_levels(enumerate_channels(*key), params, LevelSearch()) for key in allowed_excited_blocks("p")}


@pytest.fixture(scope="session")
def small_states(params, s_block):
    """One diagonalization on a short grid: cheap, for structural checks."""
    grid = build_grid(s_block, units.mhz_to_au(5.0), params, GridConfig())
    window = (units.mhz_to_au(-1100.0), units.mhz_to_au(-20.0))
    return grid, bound_states(s_block, window, grid, params)


@pytest.fixture(scope="session")
def scat_2uK(ground_params):
    return scattering_wavefunction(units.kelvin_to_au(2e-6), ground_params)
