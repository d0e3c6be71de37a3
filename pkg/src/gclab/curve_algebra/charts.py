"""Local chart expansions of the quadratic-differential basis.

Every point of the curve gets one canonical chart with parameter zeta:

- generic finite point:   zeta = x - x0 on the point's sheet;
- finite branch point:    zeta = w = y, with x - x_b recovered from the
                          series reversion of v = f(x_b + u), v = w^2;
- infinity, deg f even:   zeta = t = 1/x on the chosen sheet;
- infinity, deg f odd:    zeta = tau with x = 1/tau^2, y = u(tau)/tau^{2g+1}.

chart_series returns, for each basis element s_h, the truncated series
a_h(zeta) with s_h = a_h(zeta) dzeta^2. All basis elements are holomorphic
in these charts (that is the content of the degree bookkeeping: the common
zero-divisor degree is 4(g-1)).

An optional parameter rescale zeta = s * zeta' exhibits chart covariance:
a(zeta) dzeta^2 = s^2 a(s zeta') dzeta'^2, so order-k coefficients pick up
s^{k+2}; ratios of basis elements lose the s^2 and transform by s^k only,
which is why span/rank decisions downstream are chart-independent.
"""

import numpy as np

from ..errors import PoleAt
from .series import (
    poly_taylor_shift,
    ps_compose,
    ps_derivative,
    ps_even_substitute,
    ps_mul,
    ps_pow,
    ps_reciprocal,
    ps_reversion,
    ps_shift_mul_w,
    ps_sqrt,
    ps_zero,
)

NTERMS = 12  # internal jet cap (orders 0..NTERMS-1); callers use <= 9


def chart_series(curve, point, nterms=NTERMS, scale=1.0):
    """(n_basis x nterms) array of local series for the basis at `point`."""
    if point.kind == "generic":
        out = _generic_chart(curve, point, nterms)
    elif point.kind == "branch":
        out = _branch_chart(curve, point, nterms)
    elif point.kind == "infinity_even":
        out = _infinity_even_chart(curve, point, nterms)
    elif point.kind == "infinity_odd":
        out = _infinity_odd_chart(curve, nterms)
    else:
        raise ValueError("unknown point kind %r" % point.kind)
    if scale != 1.0:
        # zeta = scale * zeta': a dzeta^2 = scale^2 a(scale zeta') dzeta'^2
        pw = scale ** (2 + np.arange(nterms))
        out = out * pw[None, :]
    return out


def _basis_rows(curve, nterms, x_ser, inv_y2_ser, inv_y_ser):
    """Assemble all basis series given the chart series of x, 1/y^2, 1/y
    (the latter two already multiplied by the dx^2 Jacobian factor)."""
    g = curve.genus
    rows = []
    xp = [None] * (2 * g - 1)
    acc = ps_zero(nterms)
    acc[0] = 1.0
    for j in range(2 * g - 1):
        xp[j] = acc
        acc = ps_mul(acc, x_ser, nterms)
    for j in range(2 * g - 1):
        rows.append(ps_mul(xp[j], inv_y2_ser, nterms))
    for j in range(g - 2):
        rows.append(ps_mul(xp[j], inv_y_ser, nterms))
    return np.array(rows)


def _generic_chart(curve, point, nterms):
    x0 = complex(point.x)
    f_ser = poly_taylor_shift(curve.coeffs, x0, nterms)
    if f_ser[0] == 0:
        raise PoleAt("generic chart requested at a branch point")
    y_ser = ps_sqrt(f_ser, nterms)
    if abs(y_ser[0] - point.y) > abs(y_ser[0] + point.y):
        y_ser = -y_ser
    x_ser = ps_zero(nterms)
    x_ser[0] = x0
    x_ser[1] = 1.0
    # dx^2 = dzeta^2, so the Jacobian factor is 1
    inv_y2 = ps_reciprocal(f_ser, nterms)
    inv_y = ps_reciprocal(y_ser, nterms)
    return _basis_rows(curve, nterms, x_ser, inv_y2, inv_y)


def _branch_chart(curve, point, nterms):
    xb = complex(point.x)
    # f(x_b + u) = c1 u + c2 u^2 + ... ; c0 is machine noise after polishing
    c = poly_taylor_shift(curve.coeffs, xb, nterms)
    c[0] = 0.0
    u_of_v = ps_reversion(c, nterms)           # x - x_b as a series in v = w^2
    du = ps_derivative(u_of_v, nterms)
    # dx^2 = 4 w^2 u'(w^2)^2 dw^2
    du_w = ps_even_substitute(du, nterms)
    jac = 4.0 * ps_mul(du_w, du_w, nterms)     # dx^2/y^2 factor: 4 u'(w^2)^2
    x_ser = ps_even_substitute(u_of_v, nterms)
    x_ser[0] = xb
    inv_y2 = jac                                # (y^2 = w^2 cancels one w^2)
    inv_y = ps_shift_mul_w(jac, nterms)         # one power of w survives
    return _basis_rows(curve, nterms, x_ser, inv_y2, inv_y)


def _infinity_even_chart(curve, point, nterms):
    g = curve.genus
    F = np.zeros(nterms, dtype=complex)
    rev = curve.coeffs[::-1]                    # F(t) = t^{2g+2} f(1/t)
    F[:min(len(rev), nterms)] = rev[:nterms]
    v = ps_sqrt(F, nterms)                      # y = sheet * x^{g+1} v(t)
    sheet = 1.0 if point.sheet >= 0 else -1.0
    invF = ps_reciprocal(F, nterms)
    invv = ps_reciprocal(v, nterms) * sheet
    # x^j dx^2/y^2 = t^{2g-2-j}/F ;  x^j dx^2/y = sheet * t^{g-3-j}/v
    rows = []
    for j in range(2 * g - 1):
        rows.append(ps_shift_mul_w(invF, nterms, power=2 * g - 2 - j))
    for j in range(g - 2):
        rows.append(ps_shift_mul_w(invv, nterms, power=g - 3 - j))
    return np.array(rows)


def _infinity_odd_chart(curve, nterms):
    g = curve.genus
    G = np.zeros(nterms, dtype=complex)
    rev = curve.coeffs[::-1]                    # G(v) = v^{2g+1} f(1/v), v = tau^2
    G[:min(len(rev), nterms)] = rev[:nterms]
    invG_w = ps_even_substitute(ps_reciprocal(G, nterms), nterms)
    u = ps_even_substitute(ps_sqrt(G, nterms), nterms)   # y = u(tau)/tau^{2g+1}
    invu = ps_reciprocal(u, nterms)
    # x^j dx^2/y^2 = 4 tau^{4g-4-2j}/G(tau^2); x^j dx^2/y = 4 tau^{2g-5-2j}/u
    rows = []
    for j in range(2 * g - 1):
        rows.append(4.0 * ps_shift_mul_w(invG_w, nterms, power=4 * g - 4 - 2 * j))
    for j in range(g - 2):
        rows.append(4.0 * ps_shift_mul_w(invu, nterms, power=2 * g - 5 - 2 * j))
    return np.array(rows)
