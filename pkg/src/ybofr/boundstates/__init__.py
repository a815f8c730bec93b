"""Coupled-channel bound states of the 1S0 + 3P1 pair on a mapped DVR grid."""

from .grid import GridConfig, RadialGrid, build_grid, kinetic_matrix, mapped_grid, uniform_grid
from .states import (
    BoundState,
    LevelSearch,
    PLRWell,
    assemble_hamiltonian,
    bound_states,
    classify_plr,
    find_levels,
    merge_degenerate,
    molecular_linewidth,
    molecular_linewidth_operator,
    plr_wells,
    resonant_coeffs,
)

__all__ = [
    "BoundState",
    "GridConfig",
    "LevelSearch",
    "PLRWell",
    "RadialGrid",
    "assemble_hamiltonian",
    "bound_states",
    "build_grid",
    "classify_plr",
    "find_levels",
    "kinetic_matrix",
    "mapped_grid",
    "merge_degenerate",
    "molecular_linewidth",
    "molecular_linewidth_operator",
    "plr_wells",
    "resonant_coeffs",
    "uniform_grid",
]
