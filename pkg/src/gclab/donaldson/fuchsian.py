"""Fuchsian uniformization of the maximally symmetric genus-2 surface.

The surface is presented as the unit-disk quotient by a cocompact group
generated by four hyperbolic elements whose isometric circles bound a
regular hyperbolic octagon.  Group elements are stored as ``(alpha, beta)``
pairs representing the SU(1,1) matrix ``[[alpha, beta], [conj(beta),
conj(alpha)]]`` with ``|alpha|^2 - |beta|^2 = 1``, so products and inverses
stay exactly on the group variety instead of drifting off it the way raw
2x2 float matrices do.

Everything downstream (series summation, quadrature, ghost closure of
finite-difference stencils) consumes this module through three surfaces:
membership tests against the octagon, the side-pairing reduction that
folds an outside point back into the fundamental domain, and the finite
group ball used to truncate Poincare series.
"""

import math
from functools import lru_cache

import numpy as np

from ..errors import ConfigInvalid, MaxIterations

# Trace coordinates of the generators: alpha = 1 + sqrt(2) on the diagonal,
# |beta|^2 = alpha^2 - 1 off it, with the four off-diagonal phases at
# multiples of pi/4.
_ALPHA = 1.0 + math.sqrt(2.0)
_ABS_BETA = math.sqrt(2.0 + 2.0 * math.sqrt(2.0))

# One relator presents the genus-2 group: the alternating product of the
# generators and their inverses around the octagon closes up to +/- identity.
RELATOR = ("p0", "i1", "p2", "i3", "i0", "p1", "i2", "p3")


def su_product(m1, m2):
    """Product of two SU(1,1) elements in (alpha, beta) coordinates."""
    a1, b1 = m1
    a2, b2 = m2
    return (a1 * a2 + b1 * np.conjugate(b2), a1 * b2 + b1 * np.conjugate(a2))


def su_inverse(m):
    """Inverse of an SU(1,1) element in (alpha, beta) coordinates."""
    a, b = m
    return (np.conjugate(a), -b)


def mobius_apply(m, z):
    """Evaluate the disk automorphism of ``m`` at ``z`` (scalar or array)."""
    a, b = m
    return (a * z + b) / (np.conjugate(b) * z + np.conjugate(a))


def mobius_derivative(m, z):
    """Derivative of the disk automorphism of ``m`` at ``z``."""
    a, b = m
    den = np.conjugate(b) * z + np.conjugate(a)
    return 1.0 / (den * den)


def _canon_key(a, b):
    # Matrices m and -m act identically on the disk; normalize the sign so
    # the BFS ball never stores a Mobius map twice.
    if a.real < -1e-12 or (abs(a.real) <= 1e-12 and a.imag < 0.0):
        a, b = -a, -b
    return (round(a.real, 9), round(a.imag, 9),
            round(b.real, 9), round(b.imag, 9))


class FuchsianSurface:
    """Genus-2 disk quotient with its octagonal fundamental domain.

    The constructor takes no shape parameters: this class models the single
    maximally symmetric point of the genus-2 moduli space, whose rotational
    and hyperelliptic symmetries the rest of the package relies on.  The
    hyperbolic structure is carried by the conformal density
    ``lambda_X(z) = 4 / (1 - |z|^2)^2`` playing the role of ``e^{2 u_X}``.
    """

    genus = 2

    def __init__(self):
        phases = [np.exp(1j * math.pi * k / 4.0) for k in range(4)]
        self.gens = [(complex(_ALPHA), _ABS_BETA * p) for p in phases]
        self.gen_invs = [su_inverse(g) for g in self.gens]

        # Octagon geometry: side m lies on the circle of radius 1/|beta|
        # centered at (alpha/|beta|) e^{i m pi/4}; centers satisfy
        # |c|^2 - r^2 = 1, so the circles meet the unit circle at right
        # angles (they are geodesics).  Opposite centers are stored as exact
        # negatives so that membership tests are bitwise symmetric under
        # z -> -z, which the involution diagnostics rely on.
        self.center_radius = _ALPHA / _ABS_BETA
        self.circle_radius = 1.0 / _ABS_BETA
        half = self.center_radius * np.exp(1j * math.pi * np.arange(4) / 4.0)
        self.centers = np.concatenate([half, -half])

        # Vertex m sits between sides m and m+1 at angle (m + 1/2) pi/4.
        cos8 = math.cos(math.pi / 8.0)
        c = cos8 * self.center_radius
        self.vertex_radius = c - math.sqrt(c * c - 1.0)
        vhalf = self.vertex_radius * np.exp(
            1j * math.pi * (np.arange(4) + 0.5) / 4.0)
        self.vertices = np.concatenate([vhalf, -vhalf])

        # Ghosts inside circle m return to the domain via the pairing map of
        # side m; sides m and m+4 are identified.
        self.side_maps = [self.gen_invs[m] for m in range(4)]
        self.side_maps += [self.gens[m] for m in range(4)]

    # -- metric ----------------------------------------------------------

    @staticmethod
    def lambda_X(z):
        """Hyperbolic conformal density 4 / (1 - |z|^2)^2."""
        zz = np.abs(np.asarray(z)) ** 2
        return 4.0 / (1.0 - zz) ** 2

    # -- invariants ------------------------------------------------------

    def relator_residual(self):
        """Max-abs deviation of the defining relator word from +/- identity."""
        m = (complex(1.0), complex(0.0))
        for token in RELATOR:
            g = self.gens[int(token[1])]
            m = su_product(m, g if token[0] == "p" else su_inverse(g))
        a, b = m
        dev_plus = max(abs(a - 1.0), abs(b))
        dev_minus = max(abs(a + 1.0), abs(b))
        return min(dev_plus, dev_minus)

    def interior_angles(self):
        """Interior angle of the octagon at each vertex.

        The domain lies outside both circles meeting at a vertex, so the
        interior angle is pi minus the angle between the outward circle
        normals there.
        """
        angles = np.empty(8)
        for m in range(8):
            v = self.vertices[m]
            n1 = (v - self.centers[m]) / self.circle_radius
            n2 = (v - self.centers[(m + 1) % 8]) / self.circle_radius
            dot = n1.real * n2.real + n1.imag * n2.imag
            angles[m] = math.pi - math.acos(min(1.0, max(-1.0, dot)))
        return angles

    def area(self):
        """Hyperbolic area of the fundamental domain by angle defect."""
        return 6.0 * math.pi - float(np.sum(self.interior_angles()))

    def side_pairing_residual(self, samples=64):
        """Consistency of the pairing maps: points sampled on side m must
        land on the circle of side m+4 (mod 8), and pairing twice must
        return to the start."""
        worst = 0.0
        for m in range(8):
            th = self._side_arc(m, samples)
            z = self.centers[m] + self.circle_radius * np.exp(1j * th)
            w = mobius_apply(self.side_maps[m], z)
            partner = (m + 4) % 8
            dist = np.abs(np.abs(w - self.centers[partner])
                          - self.circle_radius)
            back = mobius_apply(self.side_maps[partner], w)
            worst = max(worst, float(dist.max()),
                        float(np.abs(back - z).max()))
        return worst

    def _side_arc(self, m, samples):
        # Parameter range of side m on its circle, between the two vertices,
        # shrunk slightly so samples stay off the corners.
        c = self.centers[m]
        th0 = np.angle(self.vertices[m - 1] - c)
        th1 = np.angle(self.vertices[m] - c)
        d = (th1 - th0 + math.pi) % (2.0 * math.pi) - math.pi
        return th0 + d * np.linspace(0.05, 0.95, samples)

    # -- membership and folding ------------------------------------------

    def boundary_distance(self, z):
        """Signed distance proxy: min over sides of |z - c_m| - r.

        Positive inside the octagon, negative in the ghost shell outside.
        """
        z = np.asarray(z, dtype=complex)
        d = np.abs(z[..., None] - self.centers) - self.circle_radius
        return d.min(axis=-1)

    def inside(self, z, margin=0.0):
        """True where z lies in the open fundamental domain."""
        return self.boundary_distance(z) > margin

    def reduce_to_domain(self, z, max_steps=32):
        """Fold points into the fundamental domain by the pairing maps.

        Each pass maps every outside point by the side map of its most
        deeply violated circle; nearby ghosts converge in one or two steps.
        Returns the folded points.
        """
        z = np.array(np.asarray(z, dtype=complex), copy=True)
        flat = z.reshape(-1)
        for _ in range(max_steps):
            d = np.abs(flat[:, None] - self.centers) - self.circle_radius
            worst = d.min(axis=1)
            out = worst <= 0.0
            if not out.any():
                return z
            side = d[out].argmin(axis=1)
            w = flat[out]
            for m in range(8):
                sel = side == m
                if sel.any():
                    w[sel] = mobius_apply(self.side_maps[m], w[sel])
            flat[out] = w
        raise MaxIterations(
            "side-pairing reduction did not reach the fundamental domain "
            "in %d passes" % max_steps)

    # -- group ball --------------------------------------------------------

    @lru_cache(maxsize=8)
    def _ball(self, beta_cap, depth):
        seen = {_canon_key(1.0 + 0.0j, 0.0j): (1.0 + 0.0j, 0.0j)}
        frontier = [(1.0 + 0.0j, 0.0j)]
        steps = self.gens + self.gen_invs
        for _ in range(depth):
            nxt = []
            for m in frontier:
                for g in steps:
                    p = su_product(m, g)
                    if abs(p[1]) > beta_cap:
                        continue
                    key = _canon_key(*p)
                    if key not in seen:
                        seen[key] = p
                        nxt.append(p)
            if not nxt:
                break
            frontier = nxt
        alpha = np.array([v[0] for v in seen.values()])
        beta = np.array([v[1] for v in seen.values()])
        order = np.lexsort((np.angle(alpha), np.angle(beta), np.abs(beta)))
        return alpha[order], beta[order]

    def group_ball(self, beta_cap=25.0, depth=8):
        """Deterministically ordered finite group ball.

        Returns (alpha, beta) arrays for every element reachable in at most
        ``depth`` generator steps whose every prefix stays within
        ``|beta| <= beta_cap``.  The cap controls the truncation error of
        Poincare series; the listing order is fixed by (|beta|, arg(beta),
        arg(alpha)) so that group sums are bitwise reproducible.
        """
        if beta_cap <= 0 or depth < 1:
            raise ConfigInvalid("group ball needs beta_cap > 0 and depth >= 1")
        return self._ball(float(beta_cap), int(depth))

    def __hash__(self):
        return hash((type(self).__name__, self.genus))

    def __eq__(self, other):
        return type(other) is type(self)


def bolza_surface():
    """The maximally symmetric genus-2 surface (its standard octagon model)."""
    return FuchsianSurface()
