"""Divided-difference tables, span agreement, and confluent limits.

The float64 table is exact for polynomial data at separated nodes (checked
against Newton-form reconstruction); at confluent-scale spacing it is shown
to break down, which is what the extended-precision path is for. The
confluent limit must recover Taylor coefficients through one Richardson
step at the shrinking node pattern.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gclab.curve_algebra import (
    confluent_limit,
    divided_difference_table,
    span_agreement,
    span_agreement_poly,
)
from gclab.errors import CoincidentPoints, DegreeTooLarge


def _poly_rows(rng, n_comp, degree):
    return rng.standard_normal((n_comp, degree + 1)) + \
        1j * rng.standard_normal((n_comp, degree + 1))


def _values(C, zs):
    return [np.array([np.polyval(C[h, ::-1], z) for h in range(C.shape[0])])
            for z in zs]


def test_table_reproduces_newton_coefficients():
    # [DERIVED] diagonal entries are the Newton interpolation coefficients
    rng = np.random.default_rng(0)
    C = _poly_rows(rng, 1, 5)
    zs = np.array([0.3, -0.8, 1.1 + 0.4j, -0.2 - 0.9j, 0.7j, 1.4])
    diag = divided_difference_table(_values(C, zs), zs)
    zchk = 0.35 - 0.6j
    acc = 0.0
    basis = 1.0
    for j in range(len(zs)):
        acc = acc + diag[j][0] * basis
        basis = basis * (zchk - zs[j])
    exact = np.polyval(C[0, ::-1], zchk)
    assert abs(acc - exact) <= 1e-12 * max(1.0, abs(exact))


def test_leading_difference_of_monomial_is_one():
    # [TRIVIAL] the k-th divided difference of z^k is 1 at any nodes
    zs = np.array([0.1, 0.9, -0.4, 0.6 + 0.3j])
    vals = [np.array([z ** 3]) for z in zs]
    diag = divided_difference_table(vals, zs)
    assert abs(diag[3][0] - 1.0) <= 1e-12


@given(a=st.floats(-2, 2), b=st.floats(-2, 2))
@settings(max_examples=25, deadline=None)
def test_table_is_linear(a, b):
    rng = np.random.default_rng(1)
    U = _poly_rows(rng, 3, 4)
    V = _poly_rows(rng, 3, 4)
    zs = np.array([0.2, -0.5, 1.0, 0.4j, -0.3 - 0.2j])
    tU = divided_difference_table(_values(U, zs), zs)
    tV = divided_difference_table(_values(V, zs), zs)
    tW = divided_difference_table(_values(a * U + b * V, zs), zs)
    assert np.max(np.abs(tW - (a * tU + b * tV))) <= 1e-9 * (1 + abs(a) + abs(b))


def test_span_agreement_separated_nodes():
    # [DERIVED] the table is a unit-triangular transform of the value rows,
    # so the two spans coincide; float64 suffices at O(1) node spacing
    rng = np.random.default_rng(2)
    C = _poly_rows(rng, 8, 6)
    zs = np.exp(2j * np.pi * np.arange(5) / 5)
    assert span_agreement(_values(C, zs), zs) <= 1e-10
    assert span_agreement_poly(C, zs) <= 1e-12


def test_span_agreement_confluent_pattern_needs_extended_precision():
    """At node spacing eps = 1e-4 the float64 table is rank-degenerate
    (error ~ u_mach / eps^(k-1)), while the extended-precision certificate
    still resolves the span identity to far below the working tolerance."""
    rng = np.random.default_rng(3)
    C = _poly_rows(rng, 8, 6)
    k = 7
    eps = 1e-4
    zs = eps * (np.arange(k) + 1.0) / (4 * k)
    # [DERIVED] extended precision: measured ~2e-35, frozen at 1e-12
    assert span_agreement_poly(C, zs) <= 1e-12
    # [DERIVED] float64 collapses here; pin the breakdown so nobody
    # "simplifies" the mp path away
    assert span_agreement(_values(C, zs), zs) > 1e-6


def test_confluent_limit_recovers_taylor_coefficients():
    # [DERIVED] j-th row tends to U^(j)(0)/j! = coefficient column j;
    # one Richardson step at eps = 1e-4 measured at ~2e-9, frozen 1e-8
    rng = np.random.default_rng(4)
    C = _poly_rows(rng, 6, 6)
    F = confluent_limit(C, 7)
    err = np.max(np.abs(F - C[:, :7].T))
    assert err <= 1e-8
    # without extrapolation the first-order term dominates: strictly worse
    F0 = confluent_limit(C, 7, richardson=False)
    assert np.max(np.abs(F0 - C[:, :7].T)) > err


def test_coincident_nodes_raise():
    zs = np.array([0.0, 1.0, 0.5, 0.5 + 1e-16])
    vals = [np.array([z]) for z in zs]
    with pytest.raises(CoincidentPoints):
        divided_difference_table(vals, zs)
    with pytest.raises(CoincidentPoints):
        span_agreement_poly(np.eye(2), np.array([0.3, 0.3]))


def test_degree_budget_enforced():
    C = np.zeros((2, 42))
    C[:, -1] = 1.0
    with pytest.raises(DegreeTooLarge):
        confluent_limit(C, 3)
