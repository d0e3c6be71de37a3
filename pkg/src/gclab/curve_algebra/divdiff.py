"""Divided differences of vector-valued curves, spans, and confluent limits.

For a curve U: C -> C^N and nodes z_1..z_k, the table

    F_1(z_1) = U(z_1),
    F_{j+1}(z_1..z_j, z_{j+1}) = (F_j(z_1..z_{j-1}, z_{j+1})
                                  - F_j(z_1..z_{j-1}, z_j)) / (z_{j+1} - z_j)

satisfies two statements used downstream: the spans of {F_1..F_k} and of
{U(z_1)..U(z_k)} agree (the transform is unit triangular), and in the
confluent limit z_s -> 0 the diagonal entry F_j tends to
U^{(j-1)}(0)/(j-1)!.

The confluent evaluation is catastrophically ill-conditioned in float64
(error ~ u_mach/eps^{k-1}), so the table is computed in extended precision
(mpmath, 60 significant digits) for polynomial curves given by coefficient
matrices. One Richardson step 2 F(eps/2) - F(eps) removes the O(eps) term;
with the scaled node pattern z_s = eps * s/(4k) the remaining quadratic term
sits well below 1e-8 for degree <= 6.
"""

import mpmath as mp
import numpy as np

from ..errors import CoincidentPoints, DegreeTooLarge

DPS = 60
MAX_DEGREE = 40


def _check_nodes(zs):
    zs = np.asarray(zs, dtype=complex)
    k = len(zs)
    if k < 1:
        raise ValueError("need at least one node")
    if k > 1:
        dists = [abs(zs[i] - zs[j]) for i in range(k) for j in range(i + 1, k)]
        spread = max(dists)
        if spread == 0.0 or min(dists) <= 1e-14 * spread:
            raise CoincidentPoints(
                "nodes coincide at relative 1e-14; use the confluent limit")
    return zs


def divided_difference_table(samples, zs):
    """Diagonal F_1..F_k from samples U(z_i) (rows) in float64.

    Fine for well-separated nodes; the confluent regime needs
    `confluent_limit` below.
    """
    zs = _check_nodes(zs)
    rows = [np.asarray(s, dtype=complex) for s in samples]
    k = len(rows)
    if len(zs) != k:
        raise ValueError("samples/nodes length mismatch")
    diag = [rows[0]]
    prev = list(rows)
    for j in range(1, k):
        cur = []
        for i in range(k - j):
            cur.append((prev[i + 1] - prev[i]) / (zs[i + j] - zs[i]))
        diag.append(cur[0])
        prev = cur
    return np.array(diag)


def span_agreement(samples, zs):
    """Largest principal-angle sine between span{F_j} and span{U(z_i)},
    computed as the worst two-sided projection residual (stable down to
    machine zero, unlike sqrt(1 - sigma_min^2))."""
    F = divided_difference_table(samples, zs)
    U = np.array([np.asarray(s, dtype=complex) for s in samples])

    def ortho(M):
        q, r = np.linalg.qr(M.T)
        keep = np.abs(np.diag(r)) > 1e-12 * max(1.0, np.abs(r).max())
        return q[:, keep]

    QF, QU = ortho(F), ortho(U)
    if QF.shape[1] != QU.shape[1]:
        return 1.0

    def residual(Q, onto):
        R = Q - onto @ (onto.conj().T @ Q)
        return float(np.max(np.linalg.norm(R, axis=0)))

    return max(residual(QU, QF), residual(QF, QU))


def span_agreement_poly(coeff_matrix, zs, dps=DPS):
    """Two-sided span certificate for a polynomial curve at arbitrary nodes,
    computed in extended precision (usable even at confluent-scale spacing
    where the float64 table is rank-degenerate).

    Returns the max relative projection residual between span{F_1..F_k} and
    span{U(z_1)..U(z_k)}, both directions.
    """
    C = np.asarray(coeff_matrix, dtype=complex)
    zs = _check_nodes(zs)
    with mp.workdps(dps):
        C_mp = np.empty(C.shape, dtype=object)
        for idx in np.ndindex(*C.shape):
            C_mp[idx] = mp.mpc(C[idx])
        zs_mp = [mp.mpc(z) for z in zs]
        F = _poly_table_mp(C_mp, zs_mp)
        U = _poly_values_mp(C_mp, zs_mp)

        def residual(vectors, onto):
            basis = _mgs(onto)
            worst = mp.mpf(0)
            for v in vectors:
                r = list(v)
                nv = _norm(v)
                for b in basis:
                    ip = _dot(b, r)
                    r = [r[h] - ip * b[h] for h in range(len(r))]
                if nv > 0:
                    worst = max(worst, _norm(r) / nv)
            return worst

        out = max(residual(F, U), residual(U, F))
        return float(out)


def _dot(a, b):
    return mp.fsum((mp.conj(x) * y for x, y in zip(a, b)))


def _norm(a):
    return mp.sqrt(mp.fsum((abs(x) ** 2 for x in a)))


def _mgs(vectors):
    """Modified Gram-Schmidt orthonormal basis of the span (mp arithmetic)."""
    basis = []
    for v in vectors:
        r = list(v)
        for b in basis:
            ip = _dot(b, r)
            r = [r[h] - ip * b[h] for h in range(len(r))]
        n = _norm(r)
        if n > mp.mpf(10) ** (-mp.mp.dps + 10):
            basis.append([x / n for x in r])
    return basis


def _poly_values_mp(C_mp, zs_mp):
    N = C_mp.shape[0]
    vals = []
    for z in zs_mp:
        row = []
        for h in range(N):
            acc = mp.mpc(0)
            for c in C_mp[h, ::-1]:
                acc = acc * z + c
            row.append(acc)
        vals.append(row)
    return vals


def _poly_table_mp(coeff_matrix, zs_mp):
    """Diagonal divided differences of U(z) = sum_m C[:, m] z^m in mpmath."""
    k = len(zs_mp)
    N = coeff_matrix.shape[0]
    vals = _poly_values_mp(coeff_matrix, zs_mp)
    diag = [vals[0]]
    prev = vals
    for j in range(1, k):
        cur = []
        for i in range(k - j):
            dz = zs_mp[i + j] - zs_mp[i]
            cur.append([(prev[i + 1][h] - prev[i][h]) / dz for h in range(N)])
        diag.append(cur[0])
        prev = cur
    return diag


def confluent_limit(coeff_matrix, k, eps=1e-4, richardson=True):
    """F_j at the shrinking node pattern z_s = eps * s/(4k), extrapolated.

    Returns a (k x N) float-complex array approximating
    U^{(j-1)}(0)/(j-1)! = C[:, j-1] rows. Raises DegreeTooLarge beyond the
    precision budget of the fixed 60-digit table.
    """
    C = np.asarray(coeff_matrix, dtype=complex)
    C_mp = np.empty(C.shape, dtype=object)
    for idx in np.ndindex(*C.shape):
        C_mp[idx] = mp.mpc(C[idx])
    if C.shape[1] - 1 > MAX_DEGREE:
        raise DegreeTooLarge("polynomial degree beyond the precision budget")
    with mp.workdps(DPS):
        def table(e):
            zs = [mp.mpf(e) * mp.mpf(s + 1) / (4 * k) for s in range(k)]
            return _poly_table_mp(C_mp, zs)

        T1 = table(eps)
        if richardson:
            T2 = table(eps / 2.0)
            out = [[2 * T2[j][h] - T1[j][h] for h in range(C.shape[0])]
                   for j in range(k)]
        else:
            out = T1
        return np.array([[complex(v) for v in row] for row in out])
