"""Constrained curvature functional on the maximally symmetric genus-2
surface: uniformization data, automorphic series, tensor fields, grids,
and the alternating minimizer with its conservation diagnostics."""

from .fuchsian import (FuchsianSurface, bolza_surface, mobius_apply,
                       mobius_derivative, su_inverse, su_product)
from .series import AutomorphicQuadDiff, PoincareSeries
from .fields import (BeltramiClass, EtaBasis, conformal_factor, dzbar_u_X,
                     hodge_star_inverse, star_E_coefficient, u_X)
from .grid import SurfaceGrid, octagon_quadrature
from .functional import (DEFAULT_SWEEP, DonaldsonProblem, OptCfg,
                         SurfaceState, SweepReport, XiReport)

__all__ = [
    "FuchsianSurface", "bolza_surface", "mobius_apply", "mobius_derivative",
    "su_inverse", "su_product",
    "AutomorphicQuadDiff", "PoincareSeries",
    "BeltramiClass", "EtaBasis", "conformal_factor", "dzbar_u_X",
    "hodge_star_inverse", "star_E_coefficient", "u_X",
    "SurfaceGrid", "octagon_quadrature",
    "DEFAULT_SWEEP", "DonaldsonProblem", "OptCfg", "SurfaceState",
    "SweepReport", "XiReport",
]
