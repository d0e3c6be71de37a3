"""Jet rows against divisors, vanishing subspaces, and the point map.

The order-k jet row of the basis at a point p is the vector of k-th
derivatives at zeta = 0 of the ratios s_h / alpha0, where alpha0 is a
reference combination chosen per support point as the conjugate of the
order-0 value row (this maximizes |alpha0(p)| over the unit sphere, so the
reference vanishes only if every basis element does). Dividing by alpha0
makes the order-0 row independent of the chart parameter; higher rows pick
up powers of the chart rescaling only, so spans and ranks never depend on
the chart.

Q(D) is the nullspace of the stacked rows of a divisor D = sum n_j p_j
(orders 0..n_j-1 at p_j): coefficient vectors of combinations vanishing to
order n_j at every p_j. For deg D < 2(g-1) its dimension is exactly
3(g-1) - deg D.
"""

import math
import warnings

import numpy as np

from ..errors import RankDeficiencyWarning, ReferenceVanishes
from .charts import NTERMS, chart_series
from .series import ps_mul, ps_reciprocal

RANK_TOL = 1e-9


def raw_jet_rows(curve, point, orders, nterms=NTERMS, scale=1.0):
    """Rows of plain derivatives d^k a_h/dzeta^k (0) of the local series,
    no reference division. Used where absolute jet values matter (the dual
    decomposition's lambda coefficients)."""
    ser = chart_series(curve, point, nterms, scale)
    rows = np.empty((orders, curve.n_basis), dtype=complex)
    for k in range(orders):
        rows[k] = math.factorial(k) * ser[:, k]
    return rows


def jet_rows(curve, point, orders, nterms=NTERMS, scale=1.0):
    """Reference-normalized rows: derivatives of (s_h / alpha0) at the point.

    Row 0 is the direction of the order-0 value row with norm 1 against the
    reference; rows k >= 1 transform by scale^k under chart rescaling.
    """
    ser = chart_series(curve, point, nterms, scale)
    r0 = ser[:, 0]
    n0 = np.linalg.norm(r0)
    if not np.isfinite(n0) or n0 == 0.0:
        raise ReferenceVanishes(
            "all basis elements vanish at %s" % point.label())
    cref = np.conj(r0) / n0
    a0 = cref @ ser                        # series of alpha0 in the chart
    inv_a0 = ps_reciprocal(a0, nterms)
    rows = np.empty((orders, curve.n_basis), dtype=complex)
    for h in range(curve.n_basis):
        ratio = ps_mul(ser[h], inv_a0, nterms)
        for k in range(orders):
            rows[k, h] = math.factorial(k) * ratio[k]
    return rows


def stack_divisor_rows(curve, divisor, raw=False):
    fn = raw_jet_rows if raw else jet_rows
    blocks = [fn(curve, p, m) for p, m in divisor]
    if not blocks:
        return np.zeros((0, curve.n_basis), dtype=complex)
    return np.vstack(blocks)


class Subspace:
    """A subspace of coefficient space, stored as an orthonormal basis
    (columns) plus the singular values of the constraint matrix it came
    from."""

    def __init__(self, basis, sing_values=None, constraint_rank=0):
        self.basis = np.asarray(basis, dtype=complex)
        self.sing_values = (np.asarray(sing_values, dtype=float)
                            if sing_values is not None else np.zeros(0))
        self.constraint_rank = int(constraint_rank)

    @classmethod
    def full(cls, n):
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def from_constraints(cls, rows, rank_tol=RANK_TOL, expect_rank=None):
        """Nullspace of the constraint rows (each row normalized first)."""
        rows = np.asarray(rows, dtype=complex)
        n = rows.shape[1]
        if rows.shape[0] == 0:
            return cls.full(n)
        norms = np.linalg.norm(rows, axis=1)
        norms[norms == 0] = 1.0
        rows = rows / norms[:, None]
        _, s, vh = np.linalg.svd(rows)
        rank = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
        if expect_rank is not None and rank < expect_rank:
            warnings.warn(
                "jet constraints rank %d below generic %d; divisor is special"
                % (rank, expect_rank), RankDeficiencyWarning, stacklevel=3)
        null = vh[rank:].conj().T
        return cls(null, sing_values=s, constraint_rank=rank)

    @property
    def dim(self):
        return self.basis.shape[1]

    def project(self, vec):
        vec = np.asarray(vec, dtype=complex)
        return self.basis @ (self.basis.conj().T @ vec)

    def contains(self, vec, tol=1e-8):
        vec = np.asarray(vec, dtype=complex)
        n = np.linalg.norm(vec)
        if n == 0:
            return True
        return np.linalg.norm(vec - self.project(vec)) <= tol * n

    def contains_subspace(self, other, tol=1e-8):
        return all(self.contains(other.basis[:, k], tol)
                   for k in range(other.dim))


def q_of_divisor(curve, divisor, rank_tol=RANK_TOL):
    """Q(D): coefficient vectors vanishing to the divisor's orders."""
    rows = stack_divisor_rows(curve, divisor)
    nu = divisor.degree
    expect = min(nu, curve.n_basis) if nu < 2 * (curve.genus - 1) else None
    return Subspace.from_constraints(rows, rank_tol, expect_rank=expect)


def kodaira_point(curve, point):
    """Projective class of the order-0 jet row, canonically phased:
    unit norm, largest-modulus entry rotated to the positive real axis."""
    row = jet_rows(curve, point, 1)[0]
    row = row / np.linalg.norm(row)
    i = int(np.argmax(np.abs(row)))
    phase = row[i] / abs(row[i])
    return row / phase


def projective_distance(a, b):
    """Fubini-Study chordal distance sqrt(1 - |<a,b>|^2) on unit reps,
    computed as the projection residual |b - a<a,b>|, which stays accurate
    down to machine zero (the textbook form loses half the digits near 0).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.linalg.norm(b - a * np.vdot(a, b)))


def max_vanishing_order(curve, point, cap=None):
    """Largest m such that some combination vanishes to order m at `point`
    (i.e. the first m jet rows still have a common nullvector).

    Branch points realize the extreme value 4(g-1) (the full zero divisor
    concentrates there); generic points stop at 3(g-1) - 1.
    """
    n = curve.n_basis
    cap = cap or (4 * (curve.genus - 1) + 1)
    rows = jet_rows(curve, point, cap, nterms=max(NTERMS, cap + 2))
    norms = np.linalg.norm(rows, axis=1)
    norms[norms == 0] = 1.0
    rows = rows / norms[:, None]
    best = 0
    for m in range(1, cap + 1):
        s = np.linalg.svd(rows[:m], compute_uv=False)
        rank = int(np.sum(s > RANK_TOL * s[0])) if s[0] > 0 else 0
        if rank < n:
            best = m
        else:
            break
    return best
