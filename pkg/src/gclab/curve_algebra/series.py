"""Truncated complex power series on fixed-length coefficient arrays.

c[k] is the coefficient of zeta^k. All routines take an explicit truncation
length n and return arrays of that length. Degrees involved are tiny (n <=
16), so the O(n^2)/O(n^3) recurrences below are the right tool.
"""

import numpy as np


def ps_zero(n):
    return np.zeros(n, dtype=complex)


def ps_const(c, n):
    out = ps_zero(n)
    out[0] = c
    return out


def ps_mul(a, b, n=None):
    n = n or len(a)
    out = ps_zero(n)
    for k in range(min(len(a), n)):
        if a[k] == 0:
            continue
        top = min(len(b), n - k)
        out[k:k + top] += a[k] * b[:top]
    return out


def ps_pow(a, m, n):
    out = ps_const(1.0, n)
    for _ in range(m):
        out = ps_mul(out, a, n)
    return out


def ps_reciprocal(a, n):
    """1/a for a[0] != 0."""
    if a[0] == 0:
        raise ZeroDivisionError("series has vanishing constant term")
    out = ps_zero(n)
    out[0] = 1.0 / a[0]
    for k in range(1, n):
        acc = 0.0
        for i in range(1, min(k, len(a) - 1) + 1):
            acc += a[i] * out[k - i]
        out[k] = -acc / a[0]
    return out


def ps_sqrt(a, n):
    """Principal sqrt for a[0] != 0 (s[0] = principal sqrt of a[0])."""
    if a[0] == 0:
        raise ZeroDivisionError("sqrt of series with vanishing constant term")
    out = ps_zero(n)
    out[0] = np.sqrt(complex(a[0]))
    for k in range(1, n):
        acc = complex(a[k]) if k < len(a) else 0.0
        for i in range(1, k):
            acc -= out[i] * out[k - i]
        out[k] = acc / (2.0 * out[0])
    return out


def ps_derivative(a, n=None):
    n = n or len(a)
    out = ps_zero(n)
    m = min(len(a) - 1, n)
    out[:m] = a[1:m + 1] * np.arange(1, m + 1)
    return out


def ps_compose(c, u, n):
    """c(u(v)) truncated; requires u[0] = 0."""
    if u[0] != 0:
        raise ValueError("inner series must have zero constant term")
    out = ps_zero(n)
    for m in range(min(len(c), n) - 1, -1, -1):
        out = ps_mul(out, u, n)
        out[0] += c[m]
    return out


def ps_even_substitute(a, n):
    """a(v) -> a(w^2) as a series in w (interleave zeros)."""
    out = ps_zero(n)
    top = (n + 1) // 2
    out[0:2 * top:2] = a[:top]
    return out


def ps_shift_mul_w(a, n, power=1):
    """Multiply by w^power (shift coefficients up)."""
    out = ps_zero(n)
    out[power:] = a[:n - power]
    return out


def ps_reversion(c, n):
    """Compositional inverse u(v) of v = c(u) with c[0] = 0, c[1] != 0.

    Coefficient-by-coefficient Newton matching; exact for truncated input.
    """
    if c[0] != 0:
        raise ValueError("reversion needs zero constant term")
    if c[1] == 0:
        raise ValueError("reversion needs nonzero linear term")
    u = ps_zero(n)
    u[1] = 1.0 / c[1]
    for k in range(2, n):
        r = ps_compose(c, u, k + 1)
        # r should equal v to order k; push the defect into u[k]
        u[k] = -r[k] / c[1]
    return u


def poly_taylor_shift(coeffs, x0, n):
    """Taylor series of the polynomial sum_k coeffs[k] x^k around x0,
    i.e. p(x0 + zeta) as a series in zeta, truncated to n terms.

    Horner in the series ring; coeffs ascending.
    """
    base = ps_zero(n)
    base[0] = x0
    if n > 1:
        base[1] = 1.0
    out = ps_zero(n)
    for c in coeffs[::-1]:
        out = ps_mul(out, base, n)
        out[0] += c
    return out
