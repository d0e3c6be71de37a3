"""Disk solver, continuation families, and blow-up mass diagnostics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gclab.errors import (ConfigInvalid, NewtonDiverged, NoPlateau,
                          NonConvergedContinuationHint, OutOfDomain)
from gclab.liouville_exact import (PlanarSolutionPsi, bubble_value,
                                   collapsing_zeros_value)
from gclab.liouville_pde import (DiskGrid, LocalProblem, NewtonCfg,
                                 PlanarField, continuation_family,
                                 dyadic_radii, field_from_function, local_mass,
                                 partial_masses, pohozaev_residual, rescale,
                                 solve_local)
from conftest import DELTA, bubble_problem, collapse_problem

EIGHT_PI = 8 * np.pi


def zero_weight(z):
    return np.zeros(np.shape(z))


def test_degenerate_weight_recovers_quadratic():
    # [DERIVED: W = 0, g = 2 gives -Laplace(xi) = -2 with zero trace,
    # whose solution (|z|^2 - delta^2)/2 the 5-point scheme reproduces
    # exactly, quadratics being in the stencil's null-error space]
    prob = LocalProblem(DELTA, trace=zero_weight, h=zero_weight,
                        source=lambda z: 2.0 + 0.0 * np.real(z))
    f = solve_local(prob, n=65)
    z = f.grid.points()
    mask = f.grid.inside()
    exact = (np.abs(z) ** 2 - DELTA ** 2) / 2
    assert np.max(np.abs(f.values[mask] - exact[mask])) < 1e-8


def test_manufactured_solution_second_order():
    # [DERIVED: boundary trace and weight of the exact planar solution;
    # interior error against it contracts by ~4 per mesh halving]
    psi = PlanarSolutionPsi(1.0, 0.0)
    prob = LocalProblem(DELTA, trace=lambda z: psi.value(z),
                        zeros=[1.0, -1.0], mults=[1, 1])
    errs = []
    for n in (33, 65, 129):
        f = solve_local(prob, n=n)
        z = f.grid.points()
        mask = f.grid.inside()
        errs.append(np.max(np.abs(f.values[mask] - psi.value(z[mask]))))
    factors = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    assert all(fac >= 3.5 for fac in factors)
    assert errs[-1] < 5e-5


def test_newton_diverged_carries_last_iterate():
    prob = bubble_problem(1 / 5)
    with pytest.raises(NewtonDiverged) as exc:
        solve_local(prob, n=65, newton_cfg=NewtonCfg(max_iter=2))
    assert isinstance(exc.value.last_iterate, PlanarField)
    assert len(exc.value.residual_history) == 3
    assert all(r > 0 for r in exc.value.residual_history)


def test_solver_meta_counts_iterations():
    prob = LocalProblem(DELTA, trace=zero_weight)
    f = solve_local(prob, n=33)
    assert f.meta["newton_iterations"] == len(f.meta["residual_history"]) - 1


def test_exterior_nodes_carry_the_trace():
    prob = LocalProblem(DELTA, trace=lambda z: np.real(z) + 2.0)
    f = solve_local(prob, n=33)
    z = f.grid.points()
    outside = ~f.grid.inside() & (np.abs(z) > 0)
    proj = DELTA * z[outside] / np.abs(z[outside])
    assert np.allclose(f.values[outside], np.real(proj) + 2.0, atol=1e-12)


def test_schedule_must_decrease():
    with pytest.raises(ConfigInvalid):
        continuation_family(collapse_problem, [], n=33)
    with pytest.raises(ConfigInvalid):
        continuation_family(collapse_problem, [0.2, 0.3], n=33)


def test_frozen_schedule_is_a_fixed_point():
    # [TRIVIAL: identical solves from identical starts are bit-identical]
    prob = LocalProblem(0.4, trace=zero_weight)
    fam = continuation_family(lambda t: prob, [0.2, 0.2, 0.2], n=65)
    assert all(np.array_equal(m.values, fam.members[0].values)
               for m in fam.members)


def test_hint_names_the_failing_member():
    sched = [0.2, 0.18]
    init = field_from_function(129, DELTA,
                               lambda z: collapsing_zeros_value(z, 0.2))
    with pytest.raises(NonConvergedContinuationHint) as exc:
        continuation_family(collapse_problem, sched, n=129, init=init,
                            newton_cfg=NewtonCfg(max_iter=2),
                            max_bisections=0)
    hint = exc.value
    assert hint.index == 1
    assert hint.t_failed == pytest.approx(0.18)
    assert hint.t_last_good == pytest.approx(0.2)
    assert isinstance(hint.last_iterate, PlanarField)


def test_bisection_rescues_a_tight_budget():
    # Starved of iterations the direct step fails; geometric midpoints
    # inserted automatically carry the warm start across.
    sched = [0.2, 0.18]
    init = field_from_function(129, DELTA,
                               lambda z: collapsing_zeros_value(z, 0.2))
    fam = continuation_family(collapse_problem, sched, n=129, init=init,
                              newton_cfg=NewtonCfg(max_iter=3))
    assert fam.stepping_stones
    assert all(k == 1 for k, _ in fam.stepping_stones)
    assert all(0.18 < t < 0.2 for _, t in fam.stepping_stones)
    assert fam.max_xi[1] > fam.max_xi[0]
    assert [m.meta["t"] for m in fam.members] == sched


def test_bubble_family_mass(bubble_family):
    # [DERIVED: concentrating bubble carries total mass 8 pi; at the
    # steepest member the ball mass sits within half a percent of it]
    f = bubble_family.steepest()
    rep = local_mass(f, lambda z: np.ones(z.shape), 0.0,
                     dyadic_radii(DELTA, levels=9))
    assert abs(rep.sigma - EIGHT_PI) / EIGHT_PI < 0.006
    assert rep.plateau_radius == pytest.approx(DELTA)
    assert rep.quantization_residual < 0.2
    assert all(b > a for a, b in zip(bubble_family.max_xi,
                                     bubble_family.max_xi[1:]))


def test_bubble_partial_masses_monotone(bubble_family):
    f = bubble_family.steepest()
    radii = dyadic_radii(DELTA, levels=9)
    m = partial_masses(f, lambda z: np.ones(z.shape), 0.0, radii)
    assert all(b >= a for a, b in zip(m, m[1:]))


def test_collapsing_family_total_mass(collapsing_family):
    # [DERIVED: two simple zeros collapsing at the origin carry 16 pi in
    # the limit; at t = 1/16 the tail outside the disk is ~pi/8]
    f = collapsing_family.steepest()
    t = collapsing_family.t_values[-1]
    w = lambda z: np.abs(z ** 2 - t ** 2) ** 2
    total = partial_masses(f, w, 0.0, [DELTA])[-1]
    assert abs(total - 16 * np.pi) / (16 * np.pi) < 0.015


def test_collapsing_family_steepens_monotonically(collapsing_family):
    xs = collapsing_family.max_xi
    assert all(b > a for a, b in zip(xs, xs[1:]))
    assert [m.meta["t"] for m in collapsing_family.members] == \
        collapsing_family.t_values


def test_pohozaev_battery(collapsing_family):
    # [DERIVED: numeric masses; sigma0 from the plateau below delta/2,
    # lambda_phi from the rescaled member, residual ~1% of sigma0^2]
    f = collapsing_family.steepest()
    t = collapsing_family.t_values[-1]
    w = lambda z: np.abs(z ** 2 - t ** 2) ** 2
    radii = sorted(0.25 * 2 ** (-k / 2) for k in range(12))
    rep = local_mass(f, w, 0.0, radii, flat_tol=0.1)
    sigma0 = rep.sigma
    phi = rescale(f, t, 2, grid_n=257)
    lam_phi = partial_masses(phi, lambda z: np.abs(z ** 2 - 1.0) ** 2, 0.0,
                             [phi.grid.delta])[-1]
    res = pohozaev_residual(sigma0, lam_phi, 2)
    assert res <= 0.05 * sigma0 ** 2
    assert res <= 0.03 * sigma0 ** 2


def test_flat_field_has_no_plateau():
    g = DiskGrid(65, DELTA)
    flat = PlanarField(g, np.zeros((65, 65)))
    with pytest.raises(NoPlateau):
        local_mass(flat, lambda z: np.ones(z.shape), 0.0,
                   dyadic_radii(DELTA, levels=6))


def test_partial_masses_guard_radii():
    g = DiskGrid(33, DELTA)
    f = PlanarField(g, np.zeros((33, 33)))
    with pytest.raises(ConfigInvalid):
        partial_masses(f, lambda z: np.ones(z.shape), 0.0, [2 * DELTA])
    with pytest.raises(ConfigInvalid):
        partial_masses(f, lambda z: np.ones(z.shape), 0.0, [0.0])


def test_rescale_identity():
    src = field_from_function(65, DELTA,
                              lambda z: collapsing_zeros_value(z, 1.0))
    out = rescale(src, 1.0, 1)
    assert np.allclose(out.values, src.values, atol=1e-14)
    assert out.grid.delta == src.grid.delta


def test_rescale_substitution():
    # [DERIVED: phi(w) = psi(tau w) + 4 ln tau satisfies
    # -Laplace(phi) = |tau w^2 - 1/tau|^2 e^phi identically; the 5-point
    # residual of the interpolated field stays below 1e-4]
    src = field_from_function(257, DELTA,
                              lambda z: collapsing_zeros_value(z, 1.0))
    tau = 0.5
    phi = rescale(src, tau, 1, grid_n=257)
    vals = phi.values
    h = phi.grid.h
    lap = (vals[1:-1, 2:] + vals[1:-1, :-2] + vals[2:, 1:-1]
           + vals[:-2, 1:-1] - 4 * vals[1:-1, 1:-1]) / h ** 2
    pts = phi.grid.points()[1:-1, 1:-1]
    wgt = np.abs(tau * pts ** 2 - 1.0 / tau) ** 2
    res = -lap - wgt * np.exp(vals[1:-1, 1:-1])
    interior = np.abs(pts) < phi.grid.delta * 0.85
    assert np.max(np.abs(res[interior])) < 1e-4


def test_rescale_composes_as_a_groupoid():
    src = field_from_function(257, DELTA,
                              lambda z: collapsing_zeros_value(z, 1.0))
    two_step = rescale(rescale(src, 0.5, 2, grid_n=257), 0.5, 2, grid_n=257)
    one_step = rescale(src, 0.25, 2, grid_n=257)
    assert two_step.grid.delta == one_step.grid.delta
    assert np.max(np.abs(two_step.values - one_step.values)) < 1e-3


def test_rescale_preserves_mass():
    # [DERIVED: with the weight carried along, the ball integral is
    # invariant under the scaling map up to quadrature transfer error]
    t = 0.25
    src = field_from_function(257, DELTA,
                              lambda z: collapsing_zeros_value(z, t))
    m_src = partial_masses(src, lambda z: np.abs(z ** 2 - t ** 2) ** 2,
                           0.0, [DELTA])[-1]
    out = rescale(src, t, 2, grid_n=257)
    m_out = partial_masses(out, lambda z: np.abs(z ** 2 - 1.0) ** 2,
                           0.0, [out.grid.delta])[-1]
    assert abs(m_src - m_out) / m_src < 1e-3


def test_rescale_guards():
    src = field_from_function(33, DELTA, lambda z: np.zeros(np.shape(z)))
    with pytest.raises(ConfigInvalid):
        rescale(src, 1.5, 1)
    with pytest.raises(OutOfDomain):
        rescale(src, 0.5, 1, target_delta=4 * DELTA)


def test_pohozaev_arithmetic():
    # [TRIVIAL: |s^2 - l^2 - 8 pi (n+1)(s - l)| by hand]
    assert pohozaev_residual(3.0, 3.0, 2) == 0.0
    assert pohozaev_residual(2.0, 1.0, 0) == pytest.approx(8 * np.pi - 3.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=-2.0, max_value=2.0))
def test_partial_mass_shift_property(c):
    # adding a constant to the field multiplies every ball mass by e^c
    rng = np.random.default_rng(7)
    g = DiskGrid(17, 1.0)
    base = rng.normal(size=(17, 17)) * 0.3
    w = lambda z: 1.0 + np.abs(z) ** 2
    radii = [0.3, 0.6, 0.9]
    m0 = np.array(partial_masses(PlanarField(g, base), w, 0.0, radii))
    m1 = np.array(partial_masses(PlanarField(g, base + c), w, 0.0, radii))
    assert np.allclose(m1, np.exp(c) * m0, rtol=1e-12)
