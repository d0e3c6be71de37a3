from .closed_form import (
    PlanarSolutionPsi,
    DevelopingMap,
    bubble_value,
    collapsing_zeros_value,
)
from .quadrature import (
    QuadratureSpec,
    IntegralResult,
    integrate_plane,
    total_mass,
    moment_integral,
    radial_derivative_integral,
)

__all__ = [
    "PlanarSolutionPsi", "DevelopingMap", "bubble_value",
    "collapsing_zeros_value", "QuadratureSpec", "IntegralResult",
    "integrate_plane", "total_mass", "moment_integral",
    "radial_derivative_integral",
]
