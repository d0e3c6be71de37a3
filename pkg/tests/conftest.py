"""Shared fixtures.  The blow-up continuation families and the surface
functional problems are expensive (a minute or more each), so they are
built once per session and shared between the unit tests and the
acceptance battery."""

import numpy as np
import pytest

from gclab.donaldson import (AutomorphicQuadDiff, DonaldsonProblem, EtaBasis,
                             bolza_surface, hodge_star_inverse)
from gclab.liouville_exact import bubble_value, collapsing_zeros_value
from gclab.liouville_pde import (LocalProblem, continuation_family,
                                 field_from_function)

DELTA = 0.5
BUBBLE_SCHEDULE = [1 / 5, 1 / 10, 1 / 20, 1 / 40]
COLLAPSE_SCHEDULE = [0.25 * 2 ** (-k / 8) for k in range(17)]


def bubble_problem(t):
    lam = 1.0 / t
    return LocalProblem(DELTA, trace=lambda z: bubble_value(z, lam))


def collapse_problem(t):
    return LocalProblem(DELTA,
                        trace=lambda z, t=t: collapsing_zeros_value(z, t),
                        zeros=[t, -t], mults=[1, 1])


@pytest.fixture(scope="session")
def bubble_family():
    init = field_from_function(257, DELTA,
                               lambda z: bubble_value(z, 1.0 / BUBBLE_SCHEDULE[0]))
    return continuation_family(bubble_problem, BUBBLE_SCHEDULE, n=257, init=init)


@pytest.fixture(scope="session")
def collapsing_family():
    init = field_from_function(
        257, DELTA, lambda z: collapsing_zeros_value(z, COLLAPSE_SCHEDULE[0]))
    return continuation_family(collapse_problem, COLLAPSE_SCHEDULE, n=257,
                               init=init)


@pytest.fixture(scope="session")
def surface():
    return bolza_surface()


@pytest.fixture(scope="session")
def eta_basis(surface):
    return EtaBasis(surface)


@pytest.fixture(scope="session")
def unit_quad(surface):
    # Even seed: the constant polynomial averaged to weight 2.
    return AutomorphicQuadDiff(surface, [1.0])


@pytest.fixture(scope="session")
def surface_problem(surface, unit_quad, eta_basis):
    """Production-resolution problem for the unit even Beltrami datum."""
    beta0 = hodge_star_inverse(surface, unit_quad)
    return DonaldsonProblem(surface, beta0=beta0, basis=eta_basis, n=301)


@pytest.fixture(scope="session")
def surface_sweep(surface_problem):
    """Warm-started minimizers over the default decreasing schedule."""
    return surface_problem.rho_sweep()


@pytest.fixture(scope="session")
def zero_data_problem(surface, eta_basis):
    """Zero Beltrami class on a light grid; the minimizer is constant."""
    return DonaldsonProblem(surface, beta0=None, basis=eta_basis, n=151)
