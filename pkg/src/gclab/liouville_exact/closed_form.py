"""Closed-form planar Liouville solutions with two simple zeros.

The two-parameter family

    psi(z) = ln( 8|A|^2 / (|z|^2 + |A z^2 + B z + A|^2)^2 ),   A != 0,

solves  -Delta psi = |z^2 - 1|^2 e^psi  on the whole plane with total mass
16 pi. It is the projection of the rational developing map

    f(z) = A (z + 1/z) + B,

whose critical points sit exactly at the zeros z = +-1 of the weight: the
smooth Liouville field phi = ln( 8 |f'|^2 / (1 + |f|^2)^2 ) satisfies
phi = psi + 2 ln|z^2 - 1| away from the critical points. Post-composition of
f with a Fubini-Study rotation (an SU(2) Moebius map) leaves phi, and hence
psi, unchanged.

Everything here is vectorized over numpy arrays of complex points.
"""

import numpy as np


def _as_complex_array(z):
    return np.asarray(z, dtype=complex)


class PlanarSolutionPsi:
    """One member of the closed-form family, fixed by (A, B)."""

    def __init__(self, A, B=0.0):
        A = complex(A)
        if A == 0:
            raise ValueError("A = 0 degenerates the family (f is constant)")
        self.A = A
        self.B = complex(B)

    def value(self, z):
        """psi(z), stable in log form for |z| anywhere in double range."""
        z = _as_complex_array(z)
        q = self.A * z * z + self.B * z + self.A
        denom = np.abs(z) ** 2 + np.abs(q) ** 2
        return np.log(8.0 * abs(self.A) ** 2) - 2.0 * np.log(denom)

    def density(self, z):
        """e^psi."""
        return np.exp(self.value(z))

    def weight(self, z):
        """W(z) = |z^2 - 1|^2, the two-simple-zeros weight."""
        z = _as_complex_array(z)
        return np.abs(z * z - 1.0) ** 2

    def weighted_density(self, z):
        """W e^psi, the curvature density whose plane integral is 16 pi."""
        return self.weight(z) * self.density(z)

    def inversion_residual(self, z):
        """| psi(1/z) - psi(z) - 8 ln|z| |.

        Zero identically in (A, B): the palindromic coefficient pattern
        (A, B, A) makes |A/z^2 + B/z + A| = |A z^2 + B z + A| / |z|^2.
        """
        z = _as_complex_array(z)
        return np.abs(self.value(1.0 / z) - self.value(z)
                      - 8.0 * np.log(np.abs(z)))

    def developing_map(self):
        return DevelopingMap(self.A, self.B)


class DevelopingMap:
    """f(z) = A (z + 1/z) + B, optionally post-composed with an SU(2)
    Moebius map  w -> (g w + e) / (-conj(e) w + conj(g)),  |g|^2+|e|^2 = 1.

    The SU(2) part acts on the target sphere and is stored as a 2x2 matrix;
    post-composition composes matrices, so the family is closed.
    """

    def __init__(self, A, B=0.0, mobius=None):
        A = complex(A)
        if A == 0:
            raise ValueError("A = 0 gives a constant map")
        self.A = A
        self.B = complex(B)
        self.mobius = np.eye(2, dtype=complex) if mobius is None else \
            np.asarray(mobius, dtype=complex)

    def _base(self, z):
        return self.A * (z + 1.0 / z) + self.B

    def _base_derivative(self, z):
        return self.A * (1.0 - 1.0 / (z * z))

    def value(self, z):
        z = _as_complex_array(z)
        w = self._base(z)
        m = self.mobius
        return (m[0, 0] * w + m[0, 1]) / (m[1, 0] * w + m[1, 1])

    def derivative(self, z):
        # chain rule; det(m) = 1 collapses the Moebius derivative to
        # 1/(m10 w + m11)^2
        z = _as_complex_array(z)
        w = self._base(z)
        m = self.mobius
        return self._base_derivative(z) / (m[1, 0] * w + m[1, 1]) ** 2

    def postcompose(self, g, e):
        """Rotate the target sphere: f -> (g f + e)/(-conj(e) f + conj(g)).

        (g, e) is normalized to |g|^2 + |e|^2 = 1 so the map is in SU(2).
        """
        g = complex(g)
        e = complex(e)
        n = np.sqrt(abs(g) ** 2 + abs(e) ** 2)
        if n == 0:
            raise ValueError("(g, e) = (0, 0) is not a rotation")
        g, e = g / n, e / n
        rot = np.array([[g, e], [-np.conj(e), np.conj(g)]], dtype=complex)
        return DevelopingMap(self.A, self.B, mobius=rot @ self.mobius)

    def liouville_value(self, z):
        """phi(z) = ln( 8 |f'|^2 / (1 + |f|^2)^2 ).

        Diverges to -inf at the critical points z = +-1 and is indeterminate
        at z = 0 (pole of f); callers sample away from those three points.
        """
        z = _as_complex_array(z)
        fp = np.abs(self.derivative(z))
        fv = np.abs(self.value(z))
        return np.log(8.0) + 2.0 * np.log(fp) - 2.0 * np.log1p(fv * fv)


def bubble_value(z, lam=1.0):
    """The radial entire-plane bubble  u(z) = ln( 8 lam^2 / (1+lam^2|z|^2)^2 ),
    solving -Delta u = e^u with mass 8 pi; developing map f(z) = lam z."""
    z = _as_complex_array(z)
    r2 = np.abs(z) ** 2
    return np.log(8.0 * lam * lam) - 2.0 * np.log1p(lam * lam * r2)


def collapsing_zeros_value(z, t, A=1.0, B=0.0):
    """xi_t(z) = psi(z/t) - 6 ln t  solves  -Delta xi_t = |z^2 - t^2|^2 e^xi_t
    with the two simple zeros at +-t; the canonical collapsing family."""
    psi = PlanarSolutionPsi(A, B)
    return psi.value(_as_complex_array(z) / t) - 6.0 * np.log(t)
