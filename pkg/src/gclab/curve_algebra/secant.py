"""Secant-variety membership for the point map of a curve.

The order-0 jet rows trace a projective curve in coefficient-dual space; the
nu-th secant variety is swept by spans of nu such rows (confluent
configurations contribute tangent spans, i.e. the order-0 and order-1 rows
at one point). A covector b lies on the nu-secant iff it belongs to the row
span of some admissible jet configuration, certified by the projection
residual of unit b onto that span.

The search is deterministic: witness seeds recovered from the monomial
structure of the covector (Prony on the polynomial-family block), plus a
fixed grid of x-chart samples on both sheets scored by closed-form Gram
certificates (all unordered pairs and the confluent diagonal), then
Levenberg-Marquardt polish of the seeds and the best few grid candidates
with lexicographic tie-breaking.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from ..errors import ConfigInvalid, SearchBudgetExceeded
from .curve import Divisor

MEMBER_TOL = 1e-8


def order01_rows(curve, x, sheet):
    """Raw order-0/1 rows at non-branch x via the rational closed forms
    (no series needed): a_j = x^j/f resp. x^j/y, and their x-derivatives.

    Vectorized over x; returns (row0, row1) of shape (..., n_basis).
    """
    g = curve.genus
    x = np.asarray(x, dtype=complex)
    f = curve.f(x)
    fp = curve.f_prime(x)
    y = sheet * np.sqrt(f)
    n1 = 2 * g - 1
    shape = x.shape + (curve.n_basis,)
    r0 = np.empty(shape, dtype=complex)
    r1 = np.empty(shape, dtype=complex)
    xp = np.ones_like(x)          # x^j
    xprev = np.zeros_like(x)      # x^{j-1}, with the j=0 term dropped
    for j in range(n1):
        r0[..., j] = xp / f
        r1[..., j] = j * xprev / f - xp * fp / f ** 2
        xprev = xp
        xp = xp * x
    xp = np.ones_like(x)
    xprev = np.zeros_like(x)
    for j in range(g - 2):
        h = n1 + j
        r0[..., h] = xp / y
        r1[..., h] = (j * xprev - xp * fp / (2 * f)) / y
        xprev = xp
        xp = xp * x
    return r0, r1


def _unit(v, axis=-1):
    n = np.linalg.norm(v, axis=axis, keepdims=True)
    n = np.where(n == 0, 1.0, n)
    return v / n


def membership_certificate(curve, b, config):
    """Projection residual of unit b onto the span of the config's jet rows.

    config: list of (x, sheet, order) with order 0 -> row0, 1 -> (row0,row1).
    This vanishes exactly on membership and, unlike the smallest singular
    value of the stacked matrix, stays large when the configuration
    degenerates (coincident points make the rows parallel, shrinking the
    span rather than faking a rank drop).
    """
    bhat = np.asarray(b, dtype=complex).ravel()
    bhat = bhat / np.linalg.norm(bhat)
    rows = []
    with np.errstate(all="ignore"):
        for x, sheet, order in config:
            r0, r1 = order01_rows(curve, complex(x), sheet)
            rows.append(_unit(r0))
            if order >= 1:
                rows.append(_unit(r1))
        A = np.stack(rows, axis=-1)          # N x k, columns span the rows
    if not np.all(np.isfinite(A)):
        return 1.0        # off the numeric chart (|x| huge); worst certificate
    coef, *_ = np.linalg.lstsq(A, bhat, rcond=1e-12)
    return float(np.linalg.norm(A @ coef - bhat))


def _prony_candidates(curve, bhat, nu, max_modulus=50.0):
    """Deterministic witness seeds from the monomial structure.

    On members, the family-1 block of the covector is b_j = sum_i d_i x_i^j
    (j = 0..2g-2), an exponential-sum sequence whose nodes are the witness
    x-positions: they are the roots of the best-fit linear recurrence
    (Prony). Sheets are not identified by family 1, so all sheet patterns
    are returned for polishing. On non-members the seeds are meaningless
    but harmless: the polish cannot push the residual to zero.
    """
    g = curve.genus
    seq = bhat[:2 * g - 1]
    if nu == 1:
        M = seq[:-1, None]
        rhs = seq[1:]
    else:
        M = np.stack([seq[1:-1], -seq[:-2]], axis=1)
        rhs = seq[2:]
    if M.shape[0] < M.shape[1]:
        return []
    sigma, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if nu == 1:
        roots = np.array([sigma[0]])
    else:
        roots = np.roots([1.0, -sigma[0], sigma[1]])
    if not np.all(np.isfinite(roots)) or np.any(np.abs(roots) > max_modulus):
        return []
    configs = []
    if nu == 1:
        for sheet in ((1,) if g == 2 else (1, -1)):
            configs.append([(complex(roots[0]), sheet, 0)])
        return configs
    confluent = abs(roots[0] - roots[1]) <= 1e-7 * (1 + abs(roots[0]))
    sheet_choices = ((1,),) if g == 2 else ((1, 1), (1, -1), (-1, 1), (-1, -1))
    if confluent:
        x = complex(0.5 * (roots[0] + roots[1]))
        for sheets in (((1,),) if g == 2 else ((1,), (-1,))):
            configs.append([(x, sheets[0], 1)])
    else:
        for sheets in sheet_choices:
            s2 = sheets[1] if len(sheets) > 1 else 1
            configs.append([(complex(roots[0]), sheets[0], 0),
                            (complex(roots[1]), s2, 0)])
    return configs


@dataclass
class SecantResult:
    member: bool
    certificate: float
    witness: object          # Divisor or None
    witness_config: list
    n_evaluations: int
    grid_certificate: float


def _grid_singles(curve, n_side=8, extent=1.6, margin=0.05):
    """Deterministic x-samples avoiding the branch locus."""
    g = np.linspace(-extent, extent, n_side)
    xs = (g[:, None] + 1j * g[None, :]).ravel()
    d = np.min(np.abs(xs[:, None] - curve.branch_x[None, :]), axis=1)
    xs = xs + (d < margin) * (2 * margin)      # nudge off the branch locus
    return xs


def secant_membership(curve, b, nu, n_side=8, refine_top=6, member_tol=MEMBER_TOL,
                      maxiter=4000, budget=2_000_000):
    """Search the nu-secant (nu in {1, 2}) for the covector b."""
    b = np.asarray(b, dtype=complex).ravel()
    if b.shape != (curve.n_basis,):
        raise ConfigInvalid("covector must have %d entries" % curve.n_basis)
    if nu not in (1, 2):
        raise ConfigInvalid("nu must be 1 or 2")
    bhat = b / np.linalg.norm(b)
    xs = _grid_singles(curve, n_side)
    n_evals = 0

    # rows for every (x, sheet) sample
    r0p, r1p = order01_rows(curve, xs, +1)
    r0m, r1m = order01_rows(curve, xs, -1)
    R0 = _unit(np.concatenate([r0p, r0m], axis=0))
    R1 = _unit(np.concatenate([r1p, r1m], axis=0))
    sheets = np.concatenate([np.ones(len(xs)), -np.ones(len(xs))]).astype(int)
    xall = np.concatenate([xs, xs])
    S = len(xall)
    n_evals += S

    candidates = []  # (certificate, sort_key, config)
    h0 = R0.conj() @ bhat                    # <r0_i, bhat>
    if nu == 1:
        cert1 = np.sqrt(np.maximum(0.0, 1.0 - np.abs(h0) ** 2))
        for i in range(S):
            candidates.append((float(cert1[i]), (i,),
                               [(xall[i], sheets[i], 0)]))
    else:
        # pair certificates from the 2x2 Gram solve:
        # proj^2 = (|h_i|^2 + |h_j|^2 - 2 Re(g conj(h_i) h_j)) / (1 - |g|^2)
        G = R0.conj() @ R0.T                 # g_ij = <r0_i, r0_j>
        ii, jj = np.triu_indices(S, k=1)
        g = G[ii, jj]
        d = 1.0 - np.abs(g) ** 2
        num = (np.abs(h0[ii]) ** 2 + np.abs(h0[jj]) ** 2
               - 2.0 * np.real(g * np.conj(h0[ii]) * h0[jj]))
        with np.errstate(invalid="ignore", divide="ignore"):
            p2 = np.where(d > 1e-12, num / np.maximum(d, 1e-300),
                          np.maximum(np.abs(h0[ii]) ** 2, np.abs(h0[jj]) ** 2))
        cert2 = np.sqrt(np.maximum(0.0, 1.0 - np.minimum(p2, 1.0)))
        for t in range(len(ii)):
            candidates.append((float(cert2[t]), (int(ii[t]), int(jj[t])),
                               [(xall[ii[t]], sheets[ii[t]], 0),
                                (xall[jj[t]], sheets[jj[t]], 0)]))
        # confluent diagonal: span{row0_i, row1_i}
        h1 = R1.conj() @ bhat
        gd = np.einsum("ij,ij->i", R0.conj(), R1)
        dd = 1.0 - np.abs(gd) ** 2
        numd = (np.abs(h0) ** 2 + np.abs(h1) ** 2
                - 2.0 * np.real(gd * np.conj(h0) * h1))
        with np.errstate(invalid="ignore", divide="ignore"):
            p2d = np.where(dd > 1e-12, numd / np.maximum(dd, 1e-300),
                           np.maximum(np.abs(h0) ** 2, np.abs(h1) ** 2))
        certd = np.sqrt(np.maximum(0.0, 1.0 - np.minimum(p2d, 1.0)))
        for i in range(S):
            candidates.append((float(certd[i]), (i, i),
                               [(xall[i], sheets[i], 1)]))
        n_evals += len(ii) + S

    candidates.sort(key=lambda c: (c[0], c[1]))
    grid_best = candidates[0][0]

    best_cert = np.inf
    best_config = None
    evals_left = [budget]

    def polish(config):
        """Levenberg-Marquardt on b = sum_i c_i row_i(x_i): unknowns are the
        chart positions and the complex combination coefficients."""
        sheets_fixed = [s for _, s, _ in config]
        orders = [o for _, _, o in config]

        def rows_of(params):
            cols = []
            with np.errstate(all="ignore"):
                for k in range(len(config)):
                    x = complex(params[2 * k], params[2 * k + 1])
                    r0, r1 = order01_rows(curve, x, sheets_fixed[k])
                    cols.append(_unit(r0))
                    if orders[k] >= 1:
                        cols.append(_unit(r1))
            return np.stack(cols, axis=-1)

        x0 = []
        for x, _, _ in config:
            x0 += [x.real, x.imag]
        A = rows_of(np.array(x0))
        c0, *_ = np.linalg.lstsq(A, bhat, rcond=None)
        p0 = np.concatenate([x0, c0.view(float)])
        npos = len(x0)

        def residual(params):
            if evals_left[0] <= 0:
                raise SearchBudgetExceeded("secant search evaluation budget")
            evals_left[0] -= 1
            A = rows_of(params[:npos])
            if not np.all(np.isfinite(A)):
                return np.full(2 * curve.n_basis, 1.0)
            c = params[npos:].copy().view(complex)
            return (A @ c - bhat).view(float)

        try:
            res = least_squares(residual, p0, method="lm", xtol=1e-14,
                                ftol=1e-14, gtol=1e-14, max_nfev=maxiter)
        except SearchBudgetExceeded:
            raise
        cfg = [(complex(res.x[2 * k], res.x[2 * k + 1]), sheets_fixed[k],
                orders[k]) for k in range(len(config))]
        # the clean certificate refits the coefficients at the final
        # positions, guarding against LM stopping with a stale c
        return membership_certificate(curve, bhat, cfg), cfg, int(res.nfev)

    queue = _prony_candidates(curve, bhat, nu)
    queue += [config for _, _, config in candidates[:refine_top]]
    for config in queue:
        val, cfg, used = polish(config)
        n_evals += used
        if val < best_cert:
            best_cert, best_config = val, cfg
        if best_cert <= 0.1 * member_tol:
            break

    member = best_cert <= member_tol
    witness = None
    if member:
        entries = []
        for x, sheet, order in best_config:
            entries.append((curve.point(x, sheet), order + 1))
        try:
            witness = Divisor(entries)
        except Exception:
            witness = None
    return SecantResult(member=member, certificate=best_cert,
                        witness=witness, witness_config=best_config or [],
                        n_evaluations=n_evals, grid_certificate=grid_best)
