"""Dual decomposition of a combination against a divisor.

Given D = sum n_j p_j with n_j in {1, 2} and deg D < 2(g-1), any coefficient
vector alpha splits as

    alpha = sum_j [ lam_j1 alpha_j1 + (n_j = 2) lam_j2 alpha_j2 ] + alpha_hat

where alpha_jk lie in Q(D - n_j p_j) with normalized jets at p_j
(alpha_j1: value 1, derivative 0; alpha_j2: value 0, derivative 1, in the
point's fixed canonical chart) and alpha_hat lies in Q(D). Each alpha_jk
vanishes to full order at the other support points, so subtracting the j-th
terms never disturbs the conditions at p_k, k != j; the lambda coefficients
are therefore just the raw jet values of alpha at p_j.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigInvalid, LinearSolveFailure
from .curve import Divisor
from .jets import Subspace, q_of_divisor, raw_jet_rows, stack_divisor_rows


@dataclass
class DualFunctional:
    """The functional alpha -> d^order/dzeta^order of the local
    representative of alpha at `point` (canonical chart), evaluated at 0."""
    point: object
    order: int

    def apply(self, curve, coeffs):
        rows = raw_jet_rows(curve, self.point, self.order + 1)
        return complex(rows[self.order] @ np.asarray(coeffs, dtype=complex))


@dataclass
class DecompositionTerm:
    point: object
    jet_order: int          # 0 for the value term, 1 for the derivative term
    lam: complex
    vector: np.ndarray      # coefficient vector of alpha_jk


@dataclass
class DualDecomposition:
    terms: list
    remainder: np.ndarray
    residual: float         # max |jet condition| of the remainder against D
    reassembly_error: float

    def reassemble(self):
        out = self.remainder.copy()
        for t in self.terms:
            out = out + t.lam * t.vector
        return out


def dual_decomposition(curve, divisor, alpha, solve_tol=1e-9):
    """Split `alpha` against `divisor` (multiplicities 1 or 2)."""
    alpha = np.asarray(alpha, dtype=complex).ravel()
    if alpha.shape != (curve.n_basis,):
        raise ConfigInvalid("alpha must have %d coefficients" % curve.n_basis)
    if divisor.degree >= 2 * (curve.genus - 1):
        raise ConfigInvalid(
            "dual decomposition needs deg D < 2(g-1) = %d"
            % (2 * (curve.genus - 1)))
    for _, m in divisor:
        if m not in (1, 2):
            raise ConfigInvalid("multiplicities must be 1 or 2")

    terms = []
    remainder = alpha.copy()
    for idx, (p, m) in enumerate(divisor):
        reduced = divisor.reduced_by(idx)
        S = (q_of_divisor(curve, reduced) if reduced.entries
             else Subspace.full(curve.n_basis))
        R = raw_jet_rows(curve, p, m)          # m x N raw jets at p
        M = R @ S.basis                        # jet map restricted to S
        rhs = np.eye(m, dtype=complex)
        sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        resid = np.linalg.norm(M @ sol - rhs)
        if resid > solve_tol:
            raise LinearSolveFailure(
                "normalized jet representatives do not exist at %s "
                "(residual %.2e); divisor too special" % (p.label(), resid))
        lam = R @ alpha                        # raw jet values of alpha at p
        for k in range(m):
            vec = S.basis @ sol[:, k]
            terms.append(DecompositionTerm(point=p, jet_order=k,
                                           lam=complex(lam[k]), vector=vec))
            remainder = remainder - lam[k] * vec

    rows = stack_divisor_rows(curve, divisor, raw=True)
    scale = np.linalg.norm(alpha) or 1.0
    residual = float(np.max(np.abs(rows @ remainder)) / scale) if len(rows) else 0.0
    total = remainder + sum(t.lam * t.vector for t in terms)
    reassembly = float(np.max(np.abs(total - alpha)) / scale)
    return DualDecomposition(terms=terms, remainder=remainder,
                             residual=residual, reassembly_error=reassembly)
