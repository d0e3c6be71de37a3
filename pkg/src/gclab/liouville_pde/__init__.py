"""Disk solver for the singular Liouville equation with mass diagnostics."""

from .grid import DEFAULT_N, DiskGrid, LocalProblem, PlanarField, \
    field_from_function
from .solve import NewtonCfg, solve_local
from .family import FamilyResult, continuation_family
from .mass import (
    MassReport,
    dyadic_radii,
    local_mass,
    partial_masses,
    pohozaev_residual,
    rescale,
)

__all__ = [
    "DEFAULT_N", "DiskGrid", "LocalProblem", "PlanarField",
    "field_from_function",
    "NewtonCfg", "solve_local",
    "FamilyResult", "continuation_family",
    "MassReport", "dyadic_radii", "local_mass", "partial_masses",
    "pohozaev_residual", "rescale",
]
