"""Verb dispatch: validated request -> computation -> result envelope.

One handler per verb. Each handler fills an EnvelopeBuilder with uniform
check records and JSON-safe data, so the service endpoints and the CLI
share a single code path. Exit-code contract:

    0  all checks passed
    1  a check failed, or a numerical module aborted (partial envelope)
    2  the config was rejected (schema violation or semantic guard)

Everything is deterministic given (config, seed): group enumeration order,
factorizations, and quadrature summation orders are all fixed, and the
envelope excludes wall time (that lives in the meta layer).
"""

import math
import os
from functools import lru_cache

import numpy as np
from pydantic import ValidationError

from ..curve_algebra import (Divisor, HyperellipticCurve, dual_decomposition,
                             kodaira_point, max_vanishing_order,
                             projective_distance, q_of_divisor,
                             secant_membership)
from ..donaldson import (DEFAULT_SWEEP, AutomorphicQuadDiff, DonaldsonProblem,
                         EtaBasis, OptCfg, bolza_surface, hodge_star_inverse)
from ..envelope import EnvelopeBuilder
from ..errors import ConfigInvalid, GclabError
from ..jsonio import c2pair, pair2c, sig15, write_field_dump
from ..liouville_exact import (PlanarSolutionPsi, bubble_value,
                               collapsing_zeros_value, moment_integral,
                               radial_derivative_integral, total_mass)
from ..liouville_pde import (LocalProblem, NewtonCfg, continuation_family,
                             dyadic_radii, field_from_function, local_mass,
                             partial_masses, rescale, solve_local)
from .models import REQUEST_MODELS

SIXTEEN_PI = 16.0 * math.pi
EIGHT_PI = 8.0 * math.pi


def _configure_threads():
    raw = os.environ.get("GCLAB_THREADS")
    if not raw:
        return
    try:
        import numba
        numba.set_num_threads(max(1, int(raw)))
    except (ImportError, ValueError):
        pass


_configure_threads()


# -- shared plumbing ---------------------------------------------------------


def _maybe_dump(builder, output, name, array, meta):
    if not (output.dump_fields and output.out_dir):
        return
    os.makedirs(output.out_dir, exist_ok=True)
    stem = (output.label + "-" if output.label else "") + name
    base = os.path.join(output.out_dir, stem)
    write_field_dump(base, array, meta)
    builder.data.setdefault("dumps", []).append(stem)


def _curve_of(spec):
    return HyperellipticCurve(spec.genus, [pair2c(c) for c in spec.f_coeffs])


def _point_of(curve, p):
    if p.at_infinity:
        return curve.point_at_infinity(p.sheet)
    if p.x is None:
        raise ConfigInvalid("finite divisor points need an x coordinate")
    return curve.point(pair2c(p.x), p.sheet)


def _divisor_of(curve, pts):
    if not pts:
        raise ConfigInvalid("divisor must list at least one point")
    return Divisor([(_point_of(curve, p), p.mult) for p in pts])


def _point_json(point, mult=None):
    rec = {"at_infinity": bool(point.at_infinity),
           "sheet": int(point.sheet),
           "x": None if point.at_infinity else c2pair(point.x)}
    if mult is not None:
        rec["mult"] = int(mult)
    return rec


# -- closed-form oracle verb -------------------------------------------------


def _run_verify_appendix1(req, b):
    A, B = pair2c(req.A), pair2c(req.B)
    if A == 0:
        raise ConfigInvalid("the leading coefficient A must be nonzero")
    tol = req.tol

    r16 = total_mass(A, B)
    v16 = float(r16.value.real)
    b.add_check("integral_16pi", v16, expected=SIXTEEN_PI,
                tolerance=tol * SIXTEEN_PI,
                passed=abs(v16 - SIXTEEN_PI) <= tol * SIXTEEN_PI,
                provenance="closed-form identity, parameter independent")

    rm8 = moment_integral(A, B)
    m8 = complex(rm8.value)
    b.add_check("integral_m8pi", m8.real, expected=-EIGHT_PI,
                tolerance=tol * EIGHT_PI,
                passed=abs(m8.real + EIGHT_PI) <= tol * EIGHT_PI,
                provenance="closed-form identity, parameter independent")
    b.add_check("moment_imag_cancellation", abs(m8.imag),
                expected=0.0, tolerance=1e-8 * abs(m8.real),
                passed=abs(m8.imag) <= 1e-8 * abs(m8.real),
                provenance="inversion symmetry of the density")

    rcl = radial_derivative_integral(A, B)
    vcl = float(rcl.value.real)
    cl_tol = max(tol, 1e-5)
    b.add_check("chen_li_32pi", vcl, expected=32.0 * math.pi,
                tolerance=cl_tol * 32.0 * math.pi,
                passed=abs(vcl - 32.0 * math.pi) <= cl_tol * 32.0 * math.pi,
                provenance="radial Pohozaev identity, beta = 8")

    rng = np.random.default_rng(req.seed)
    n = req.n_symmetry_samples
    zs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    zs = zs[np.abs(zs) > 1e-3]
    aa = A * (1.0 + 0.5 * rng.standard_normal(n))[: len(zs)]
    bb = B + (rng.standard_normal(n) + 1j * rng.standard_normal(n))[: len(zs)]
    sym = 0.0
    for ak, bk, zk in zip(aa, bb, zs):
        if ak == 0:
            continue
        sym = max(sym, float(PlanarSolutionPsi(ak, bk)
                             .inversion_residual(np.array([zk]))[0]))
    b.add_check("symmetry_max_err", sym, expected=0.0, tolerance=1e-12,
                passed=sym <= 1e-12,
                provenance="exact inversion covariance of the family")

    b.data.update({
        "integral_16pi": v16,
        "integral_m8pi": c2pair(m8),
        "chen_li": vcl,
        "symmetry_max_err": sym,
        "quadrature_error_estimates": [r16.error_estimate, rm8.error_estimate,
                                       rcl.error_estimate],
        "n_evaluations": int(r16.n_evals + rm8.n_evals + rcl.n_evals),
    })


# -- curve verbs --------------------------------------------------------------


def _run_curve_basis(req, b):
    curve = _curve_of(req.curve)
    b.add_check("dimension", curve.n_basis, expected=3 * (curve.genus - 1),
                tolerance=0, passed=curve.n_basis == 3 * (curve.genus - 1),
                provenance="Riemann-Roch count for quadratic differentials")
    b.add_check("zero_divisor_degree", curve.zero_divisor_degree(),
                expected=4 * (curve.genus - 1), tolerance=0,
                passed=curve.zero_divisor_degree() == 4 * (curve.genus - 1),
                provenance="degree of K^2 on the curve")
    b.data.update({
        "genus": curve.genus,
        "dimension": curve.n_basis,
        "basis_labels": curve.basis_labels,
        "branch_x": [c2pair(x) for x in curve.branch_x],
        "f_degree": curve.degree,
    })


def _run_curve_qdim(req, b):
    curve = _curve_of(req.curve)
    div = _divisor_of(curve, req.divisor)
    sub = q_of_divisor(curve, div)
    expected = req.expected_dim
    if expected is None and div.degree < 2 * (curve.genus - 1):
        expected = 3 * (curve.genus - 1) - div.degree
    b.add_check("q_dimension", sub.dim, expected=expected, tolerance=0,
                passed=None if expected is None else sub.dim == expected,
                provenance="codimension-equals-degree below the critical "
                           "degree 2(g-1)")
    b.data.update({
        "dimension": sub.dim,
        "divisor_degree": div.degree,
        "divisor": [_point_json(p, m) for p, m in div],
        "critical_degree": 2 * (curve.genus - 1),
    })


def _run_curve_kodaira(req, b):
    curve = _curve_of(req.curve)
    if not req.points:
        raise ConfigInvalid("kodaira needs at least one point")
    out = []
    for p in req.points:
        point = _point_of(curve, p)
        tau = kodaira_point(curve, point)
        rec = {"point": _point_json(point),
               "tau": [c2pair(v) for v in tau]}
        if not point.at_infinity and not point.is_branch:
            mirror = curve.hyperelliptic_involution(point)
            d = projective_distance(tau, kodaira_point(curve, mirror))
            rec["involution_distance"] = sig15(d)
            if curve.genus == 2:
                b.add_check("involution_factoring_%s" % point.label(), d,
                            expected=0.0, tolerance=1e-10,
                            passed=d <= 1e-10,
                            provenance="genus-2 projective map factors "
                                       "through the involution")
            else:
                b.add_check("involution_distance_%s" % point.label(), d,
                            provenance="reported; no factoring expected "
                                       "above genus 2")
        out.append(rec)
    b.data["points"] = out


def _run_curve_weierstrass(req, b):
    curve = _curve_of(req.curve)
    if req.points:
        points = [_point_of(curve, p) for p in req.points]
    else:
        points = list(curve.branch_points())
        if not curve.even_degree:
            points.append(curve.point_at_infinity())
    cap = curve.zero_divisor_degree()
    out = []
    for point in points:
        order = max_vanishing_order(curve, point)
        out.append({"point": _point_json(point), "max_order": order})
        b.add_check("order_bound_%s" % point.label(), order,
                    expected=cap, tolerance=0, passed=order <= cap,
                    provenance="zero divisor of K^2 has degree 4(g-1)")
        if point.is_branch or point.at_infinity and not curve.even_degree:
            b.add_check("weierstrass_gap_%s" % point.label(), order,
                        expected=cap, tolerance=0, passed=order == cap,
                        provenance="ramification points realize the full "
                                   "zero divisor")
    b.data.update({"points": out, "generic_max_order": curve.n_basis - 1,
                   "order_cap": cap})


def _run_curve_secant(req, b):
    curve = _curve_of(req.curve)
    cov = np.array([pair2c(c) for c in req.covector])
    res = secant_membership(curve, cov, req.nu, member_tol=req.member_tol)
    b.add_check("certificate", sig15(res.certificate), expected=0.0,
                tolerance=req.member_tol,
                passed=res.certificate <= req.member_tol if res.member
                else None,
                provenance="projection residual onto the witness row span")
    b.add_check("decision_consistent",
                res.member == (res.certificate <= req.member_tol),
                expected=True, tolerance=0,
                passed=res.member == (res.certificate <= req.member_tol),
                provenance="decision is the thresholded certificate")
    b.data.update({
        "member": bool(res.member),
        "certificate": sig15(res.certificate),
        "grid_certificate": sig15(res.grid_certificate),
        "n_evaluations": int(res.n_evaluations),
        "witness": None if res.witness is None else
        [_point_json(p, m) for p, m in res.witness],
    })


def _run_curve_decompose(req, b):
    curve = _curve_of(req.curve)
    div = _divisor_of(curve, req.divisor)
    alpha = np.array([pair2c(c) for c in req.alpha])
    dec = dual_decomposition(curve, div, alpha)
    b.add_check("reassembly_error", dec.reassembly_error, expected=0.0,
                tolerance=1e-9, passed=dec.reassembly_error <= 1e-9,
                provenance="terms plus remainder reproduce alpha")
    b.add_check("remainder_jet_residual", dec.residual, expected=0.0,
                tolerance=1e-8, passed=dec.residual <= 1e-8,
                provenance="remainder lies in the divisor's "
                           "constraint subspace")
    b.data.update({
        "terms": [{"point": _point_json(t.point), "jet_order": t.jet_order,
                   "lambda": c2pair(t.lam)} for t in dec.terms],
        "remainder": [c2pair(v) for v in dec.remainder],
        "divisor_degree": div.degree,
    })


# -- disk solver verbs ---------------------------------------------------------


def _liouville_setup(req):
    """(problem, exact profile callable or None, init field)."""
    A, B = pair2c(req.A), pair2c(req.B)
    if req.profile == "bubble":
        lam = req.lam

        def exact(z):
            return bubble_value(z, lam)

        problem = LocalProblem(req.delta, trace=exact)
    else:
        t = req.t

        def exact(z):
            return collapsing_zeros_value(z, t, A, B)

        problem = LocalProblem(req.delta, trace=exact,
                               zeros=[t, -t], mults=[1, 1])
    if req.weight is not None:
        w = req.weight
        hconst = w.h_const
        if len(w.zeros) != len(w.mults):
            raise ConfigInvalid("weight zeros and mults must pair up")
        problem = LocalProblem(
            req.delta, trace=exact,
            zeros=[pair2c(p) for p in w.zeros], mults=list(w.mults),
            h=(None if hconst == 1.0 else
               lambda z: np.full(np.shape(z), hconst)))
        exact = None
    init = None
    if exact is not None:
        init = field_from_function(req.n, req.delta, exact)
    return problem, exact, init


def _solve_checks(b, req, field, problem, exact):
    hist = field.meta.get("residual_history", [])
    res = float(hist[-1]) if hist else float("nan")
    b.add_check("scaled_residual", res, expected=0.0, tolerance=req.tol,
                passed=res <= req.tol,
                provenance="row-normalized discrete equation residual")
    if exact is not None:
        grid = field.grid
        inside = grid.inside()
        err = float(np.max(np.abs(field.values[inside]
                                  - exact(grid.points()[inside]))))
        b.add_check("max_error_vs_profile", err,
                    provenance="reported against the closed-form profile "
                               "supplying the trace")
        b.data["max_error_vs_profile"] = err
    mass = float(partial_masses(field, problem.weight, 0.0,
                                [0.98 * problem.delta])[0])
    b.data.update({
        "newton_iterations": int(field.meta.get("newton_iterations", -1)),
        "scaled_residual": res,
        "max_xi": field.max_value(),
        "mass_in_disk": mass,
    })
    return mass


def _run_liouville_solve(req, b):
    problem, exact, init = _liouville_setup(req)
    field = solve_local(problem, init=init, newton_cfg=NewtonCfg(tol=req.tol),
                        n=req.n)
    _solve_checks(b, req, field, problem, exact)
    _maybe_dump(b, req.output, "xi", field.values,
                {"kind": "disk-field", "delta": problem.delta,
                 "n": req.n, "profile": req.profile})


def _run_liouville_family(req, b):
    if len(req.schedule) < 2:
        raise ConfigInvalid("family schedule needs at least two parameters")
    if req.profile == "bubble":
        def make(t):
            return LocalProblem(req.delta,
                                trace=lambda z, t=t: bubble_value(z, 1.0 / t))

        def first(z):
            return bubble_value(z, 1.0 / req.schedule[0])
    else:
        A, B = pair2c(req.A), pair2c(req.B)

        def make(t):
            return LocalProblem(
                req.delta,
                trace=lambda z, t=t: collapsing_zeros_value(z, t, A, B),
                zeros=[t, -t], mults=[1, 1])

        def first(z):
            return collapsing_zeros_value(z, req.schedule[0], A, B)

    init = field_from_function(req.n, req.delta, first)
    fam = continuation_family(make, req.schedule, n=req.n, init=init,
                              newton_cfg=NewtonCfg(tol=req.tol))
    rows = []
    for t, fld in zip(fam.t_values, fam.members):
        prob = make(t)
        rows.append({
            "t": float(t),
            "max_xi": fld.max_value(),
            "newton_iterations": int(fld.meta.get("newton_iterations", -1)),
            "mass_in_disk": float(partial_masses(
                fld, prob.weight, 0.0, [0.98 * req.delta])[0]),
        })
    b.add_check("members_converged", len(fam.members),
                expected=len(req.schedule), tolerance=0,
                passed=len(fam.members) == len(req.schedule),
                provenance="continuation delivered every requested member")
    peaks = [r["max_xi"] for r in rows]
    b.add_check("peaks_monotone", bool(np.all(np.diff(peaks) > -1e-9)),
                expected=True, tolerance=0,
                passed=bool(np.all(np.diff(peaks) > -1e-9)),
                provenance="steepening schedules concentrate the field")
    b.data.update({"members": rows,
                   "stepping_stones": [[int(k), float(t)]
                                       for k, t in fam.stepping_stones]})
    if req.output.dump_fields:
        for t, fld in zip(fam.t_values, fam.members):
            _maybe_dump(b, req.output, "xi-t%.6g" % t, fld.values,
                        {"kind": "disk-field", "delta": req.delta,
                         "n": req.n, "t": t, "profile": req.profile})


def _run_liouville_mass(req, b):
    problem, exact, init = _liouville_setup(req.solve)
    field = solve_local(problem, init=init,
                        newton_cfg=NewtonCfg(tol=req.solve.tol),
                        n=req.solve.n)
    _solve_checks(b, req.solve, field, problem, exact)
    center = pair2c(req.center)
    r_max = req.r_max if req.r_max is not None else 0.95 * problem.delta
    radii = dyadic_radii(r_max, req.levels)
    rep = local_mass(field, problem.weight, center, radii,
                     flat_tol=req.flat_tol)
    mono = bool(np.all(np.diff(rep.partial_masses) >= -1e-12))
    b.add_check("mass_monotone", mono, expected=True, tolerance=0,
                passed=mono, provenance="m(r) is an integral of a "
                                        "nonnegative density")
    b.add_check("sigma", rep.sigma,
                provenance="plateau of m(r) over dyadic radii")
    b.data.update({
        "sigma": rep.sigma,
        "plateau_radius": rep.plateau_radius,
        "plateau_width": rep.plateau_width,
        "quantization_residual": rep.quantization_residual,
        "radii": [float(r) for r in rep.radii],
        "partial_masses": [float(m) for m in rep.partial_masses],
    })


def _run_liouville_rescale(req, b):
    problem, exact, init = _liouville_setup(req.solve)
    field = solve_local(problem, init=init,
                        newton_cfg=NewtonCfg(tol=req.solve.tol),
                        n=req.solve.n)
    mass0 = _solve_checks(b, req.solve, field, problem, exact)
    tau, nexp = req.tau, req.n_exponent
    out = rescale(field, tau, nexp, target_delta=req.target_delta)

    def weight_out(w):
        return problem.weight(tau * w) / tau ** (2 * nexp)

    mass1 = float(partial_masses(out, weight_out, 0.0,
                                 [0.98 * min(out.grid.delta,
                                             problem.delta / tau)])[0])
    # same physical disk on both sides of the zoom
    mass0c = float(partial_masses(field, problem.weight, 0.0,
                                  [0.98 * min(out.grid.delta,
                                              problem.delta / tau) * tau])[0])
    rel = abs(mass1 - mass0c) / (1.0 + abs(mass0c))
    b.add_check("mass_preserved_under_rescale", rel, expected=0.0,
                tolerance=2e-2, passed=rel <= 2e-2,
                provenance="substitution z = tau w in the mass integral")
    b.data.update({
        "tau": tau, "n_exponent": nexp,
        "delta_out": out.grid.delta,
        "mass_source": mass0, "mass_rescaled": mass1,
        "max_phi": out.max_value(),
    })
    _maybe_dump(b, req.output, "phi", out.values,
                {"kind": "disk-field", "delta": out.grid.delta,
                 "n": out.grid.n, "tau": tau})


# -- surface functional verbs ----------------------------------------------------


@lru_cache(maxsize=1)
def _surface():
    return bolza_surface()


@lru_cache(maxsize=1)
def _basis():
    return EtaBasis(_surface())


@lru_cache(maxsize=3)
def _problem(n, seed_key, gauss_order=32):
    surface = _surface()
    seed = np.array(seed_key, dtype=complex)
    beta0 = hodge_star_inverse(surface, AutomorphicQuadDiff(surface, seed))
    return DonaldsonProblem(surface, beta0=beta0, basis=_basis(), n=n,
                            gauss_order=gauss_order)


def _seed_key(pairs, scale=1.0):
    vals = tuple(complex(scale) * pair2c(p) for p in pairs)
    if not vals or all(v == 0 for v in vals):
        raise ConfigInvalid("beta seed must have a nonzero coefficient")
    return vals


def _state_report(prob, state):
    xi = prob.xi_monitor(state)
    gb = prob.gauss_bonnet_residual(state)
    return xi, gb, {
        "F": state.F,
        "EL_residual": state.el_residual,
        "hol_residual": state.hol_residual,
        "gauss_bonnet_residual": gb,
        "rho": prob.rho(state),
        "s_t": xi.s_t,
        "d_t": xi.d_t,
        "max_xi": xi.max_xi,
    }


def _run_donaldson_minimize(req, b):
    opts = req.options
    prob = _problem(opts.n, _seed_key(opts.beta_seed, pair2c(opts.beta_scale)))
    state = prob.minimize(req.t, opt_cfg=OptCfg(tol=opts.tol,
                                                tol_hol=opts.tol_hol))
    xi, gb, rep = _state_report(prob, state)
    b.add_check("el_residual", state.el_residual, expected=0.0,
                tolerance=opts.tol, passed=state.el_residual <= opts.tol,
                provenance="metric max-norm of the discrete "
                           "Euler-Lagrange field")
    b.add_check("gauss_bonnet_balance", gb, expected=0.0, tolerance=1e-2,
                passed=gb <= 1e-2,
                provenance="curvature integral balances the Euler "
                           "characteristic")
    b.add_check("t_exp_mean_bound", xi.t_exp_d, expected=1.0, tolerance=1e-6,
                passed=xi.t_exp_d <= 1.0 + 1e-6,
                provenance="Jensen bound at any minimizer")
    rho_cap = 4.0 * math.pi * (prob.surface.genus - 1) + 0.05
    b.add_check("rho_window", rep["rho"], expected=None, tolerance=rho_cap,
                passed=-1e-9 <= rep["rho"] <= rho_cap,
                provenance="defect measure bounded by the volume target")
    b.data.update(rep)
    b.data["t"] = req.t
    b.data["newton_iterations"] = state.newton_iters
    b.data["outer_iterations"] = state.outer_iters
    b.data["eta_coeffs"] = [c2pair(c) for c in state.eta_coeffs]
    _maybe_dump(b, req.output, "u", state.u,
                {"kind": "octagon-interior-flat", "n": opts.n,
                 "box": prob.grid.box, "t": req.t})


def _run_donaldson_sweep(req, b):
    opts = req.options
    prob = _problem(opts.n, _seed_key(opts.beta_seed, pair2c(opts.beta_scale)))
    schedule = tuple(req.schedule) if req.schedule else DEFAULT_SWEEP
    rep = prob.rho_sweep(schedule, opt_cfg=OptCfg(tol=opts.tol,
                                                  tol_hol=opts.tol_hol))
    flags = list(rep.monotone_flags)
    n_bad = flags.count(False)
    # one violation at the two smallest parameters is tolerated with a warning
    soft_ok = n_bad == 0 or (n_bad == 1 and False in flags[-2:])
    b.add_check("rho_bounds", bool(rep.bound_ok), expected=True, tolerance=0,
                passed=bool(rep.bound_ok),
                provenance="defect measure stays inside [0, volume target]")
    b.add_check("rho_monotone_flags", flags, expected=[True] * len(flags),
                tolerance=0, passed=soft_ok,
                provenance="defect measure is monotone along the parameter")
    rows = []
    for t, st in zip(rep.t_values, rep.states):
        xi, gb, row = _state_report(prob, st)
        row["t"] = float(t)
        rows.append(row)
        b.add_check("gauss_bonnet_t%.6g" % t, gb, expected=0.0,
                    tolerance=1e-2, passed=gb <= 1e-2,
                    provenance="curvature integral balances the Euler "
                               "characteristic")
    b.data.update({
        "t_values": [float(t) for t in rep.t_values],
        "rho_values": [float(r) for r in rep.rho_values],
        "monotone_flags": flags,
        "bound_ok": bool(rep.bound_ok),
        "warnings": list(rep.warnings),
        "states": rows,
    })


def _run_donaldson_involution(req, b):
    opts = req.options
    prob = _problem(opts.n, _seed_key(opts.beta_seed, pair2c(opts.beta_scale)))
    state = prob.minimize(req.t, opt_cfg=OptCfg(tol=opts.tol,
                                                tol_hol=opts.tol_hol))
    inv = prob.involution_check(state)
    b.add_check("F_gap_rel", inv["F_gap_rel"], expected=0.0, tolerance=1e-4,
                passed=inv["F_gap_rel"] <= 1e-4,
                provenance="functional is invariant under the "
                           "hyperelliptic involution")
    b.add_check("beta_gap", inv["beta_gap"], expected=0.0, tolerance=1e-8,
                passed=inv["beta_gap"] <= 1e-8,
                provenance="even seeds give involution-fixed data")
    b.data.update({"t": req.t, "F": state.F,
                   "F_gap": inv["F_gap"], "F_gap_rel": inv["F_gap_rel"],
                   "beta_gap": inv["beta_gap"]})


def _run_donaldson_pairing(req, b):
    surface = _surface()
    prob = _problem(31, _seed_key(req.beta_seed),
                    gauss_order=req.gauss_order)
    alpha = AutomorphicQuadDiff(surface, [pair2c(c) for c in req.alpha_seed])
    beta_vals = prob.gb0
    val = prob.wedge_pairing(beta_vals, alpha)
    b.data["pairing"] = c2pair(val)
    if tuple(req.beta_seed) == tuple(req.alpha_seed):
        ok = val.real > 0 and abs(val.imag) <= 1e-10 * abs(val.real)
        b.add_check("self_pairing_is_squared_norm", c2pair(val),
                    expected=[abs(val.real), 0.0],
                    tolerance=1e-10 * abs(val.real), passed=ok,
                    provenance="pairing a class with its own dual "
                               "differential gives its norm")
    if req.eta_coeffs is not None:
        coeffs = np.array([pair2c(c) for c in req.eta_coeffs])
        if coeffs.shape != (len(_basis()),):
            raise ConfigInvalid("eta_coeffs must have %d entries"
                                % len(_basis()))
        shift = prob.eta_dbar_on_gauss(coeffs)
        pert = prob.wedge_pairing(beta_vals + shift, alpha)
        delta = abs(pert - val) / (1.0 + abs(val))
        b.add_check("stokes_invariance", delta, expected=0.0, tolerance=1e-6,
                    passed=delta <= 1e-6,
                    provenance="exact perturbations drop out of the "
                               "pairing by Stokes")
        b.data["pairing_perturbed"] = c2pair(pert)
    b.data["gauss_order"] = req.gauss_order


_HANDLERS = {
    "verify-appendix1": _run_verify_appendix1,
    "curve.basis": _run_curve_basis,
    "curve.q-dim": _run_curve_qdim,
    "curve.kodaira": _run_curve_kodaira,
    "curve.weierstrass": _run_curve_weierstrass,
    "curve.secant-test": _run_curve_secant,
    "curve.decompose": _run_curve_decompose,
    "liouville.solve": _run_liouville_solve,
    "liouville.family": _run_liouville_family,
    "liouville.mass": _run_liouville_mass,
    "liouville.rescale": _run_liouville_rescale,
    "donaldson.minimize": _run_donaldson_minimize,
    "donaldson.sweep-t": _run_donaldson_sweep,
    "donaldson.involution-check": _run_donaldson_involution,
    "donaldson.pairing": _run_donaldson_pairing,
}

VERBS = tuple(_HANDLERS)


def validate_request(verb, payload):
    model_cls = REQUEST_MODELS.get(verb)
    if model_cls is None:
        raise ConfigInvalid("unknown verb %r" % verb)
    try:
        return model_cls.model_validate(payload)
    except ValidationError as exc:
        raise ConfigInvalid("config rejected for %s: %s"
                           % (verb, exc)) from None


def execute_validated(verb, req):
    """(result document, exit code) for a validated request model.

    ConfigInvalid propagates (the caller maps it to exit 2); numerical
    module failures are folded into a partial envelope with exit code 1.
    """
    builder = EnvelopeBuilder(verb, req.model_dump(mode="json"))
    try:
        _HANDLERS[verb](req, builder)
    except ConfigInvalid:
        raise
    except GclabError as exc:
        builder.data["error"] = {"type": type(exc).__name__,
                                 "message": str(exc)}
        builder.add_check("completed", False, expected=True, tolerance=0,
                          passed=False,
                          provenance="aborted by a module error")
        return builder.finish(), 1
    doc = builder.finish()
    return doc, 0 if doc["envelope"]["all_passed"] else 1


def execute_payload(verb, payload):
    return execute_validated(verb, validate_request(verb, payload))
