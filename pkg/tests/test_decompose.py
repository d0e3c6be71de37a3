"""Dual decomposition of coefficient vectors against small divisors."""

import numpy as np
import pytest

from gclab.curve_algebra import (
    Divisor,
    DualFunctional,
    HyperellipticCurve,
    dual_decomposition,
    q_of_divisor,
    raw_jet_rows,
)
from gclab.errors import ConfigInvalid


@pytest.fixture(scope="module")
def g3():
    return HyperellipticCurve(3, [-2.0, 0.0, 3.0, 0.0, -1.0, 0.0, 0.5, 1.0])


def _rand_point(curve, rng, box=1.2):
    x = complex(rng.uniform(-box, box), rng.uniform(-box, box))
    return curve.point(x, int(rng.choice([1, -1])))


def test_reassembly_and_remainder(g3):
    # [DERIVED] exact splitting: terms + remainder reproduce alpha, the
    # remainder satisfies every jet condition of the divisor
    rng = np.random.default_rng(3)
    alpha = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    for entries in (
        [(_rand_point(g3, rng), 1) for _ in range(3)],
        [(_rand_point(g3, rng), 2), (_rand_point(g3, rng), 1)],
    ):
        D = Divisor(entries)
        dec = dual_decomposition(g3, D, alpha)
        assert len(dec.terms) == D.degree
        assert dec.reassembly_error <= 1e-12
        assert dec.residual <= 1e-12
        assert np.max(np.abs(dec.reassemble() - alpha)) <= 1e-10
        assert q_of_divisor(g3, D).contains(dec.remainder, tol=1e-9)


def test_lambdas_are_raw_jet_values(g3):
    # [TRIVIAL] the coefficients are the raw jets of alpha at the points
    rng = np.random.default_rng(4)
    alpha = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    p = _rand_point(g3, rng)
    D = Divisor([(p, 2)])
    dec = dual_decomposition(g3, D, alpha)
    for t in dec.terms:
        want = DualFunctional(t.point, t.jet_order).apply(g3, alpha)
        assert abs(t.lam - want) <= 1e-10 * max(1.0, abs(want))


def test_term_vectors_have_normalized_jets(g3):
    """alpha_j1 has (value, derivative) = (1, 0) at its point and alpha_j2
    has (0, 1); both vanish to full order at the other support points."""
    rng = np.random.default_rng(5)
    alpha = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    p, q = _rand_point(g3, rng), _rand_point(g3, rng)
    D = Divisor([(p, 2), (q, 1)])
    dec = dual_decomposition(g3, D, alpha)
    for t in dec.terms:
        jets_here = raw_jet_rows(g3, t.point, 2) @ t.vector
        want = np.zeros(2, dtype=complex)
        want[t.jet_order] = 1.0
        if t.point.key() == p.key():
            assert np.max(np.abs(jets_here - want)) <= 1e-8
            other, order = q, 1
        else:
            assert abs(jets_here[0] - 1.0) <= 1e-8
            other, order = p, 2
        away = raw_jet_rows(g3, other, order) @ t.vector
        assert np.max(np.abs(away)) <= 1e-8


def test_invalid_configs(g3):
    rng = np.random.default_rng(6)
    alpha = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    with pytest.raises(ConfigInvalid):
        dual_decomposition(g3, Divisor([(_rand_point(g3, rng), 3)]), alpha)
    big = Divisor([(_rand_point(g3, rng), 2), (_rand_point(g3, rng), 2)])
    with pytest.raises(ConfigInvalid):
        dual_decomposition(g3, big, alpha)
    with pytest.raises(ConfigInvalid):
        dual_decomposition(g3, Divisor([(_rand_point(g3, rng), 1)]),
                           alpha[:4])


def test_genus2_single_point_exact():
    C = HyperellipticCurve(2, [-1.0, 0.0, 2.0, 0.0, -2.0, 1.0])
    rng = np.random.default_rng(8)
    alpha = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    p = C.point(0.37 + 0.21j, 1)
    dec = dual_decomposition(C, Divisor([(p, 1)]), alpha)
    assert len(dec.terms) == 1
    assert dec.reassembly_error <= 1e-13
    assert dec.residual <= 1e-13
