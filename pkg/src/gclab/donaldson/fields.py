"""Tensor fields on the octagon surface: Beltrami forms, the conformal
Hodge star, and the gauge-potential basis.

Conventions fixed here and validated by the invariant tests:

* hyperbolic factor ``e^{2 u_X} = 4 / (1 - |z|^2)^2``;
* a quadratic differential ``q = h dz^2`` has pointwise norm
  ``2 |h| e^{-2 u_X}``;
* a Beltrami form ``beta = b dzbar (x) d/dz`` has pointwise norm ``|b|``
  and transforms as ``b(gz) conj(g') / g' = b(z)``;
* the star operator pairs them antilinearly:
  ``star_E beta = -(i/2) conj(b) e^{2 u_X} dz^2``, with inverse
  ``b = -2 i conj(h) e^{-2 u_X}``.

The sign of the star is a convention; what the package guarantees (and
tests) is the invariant package: the round trip is the identity, the star
preserves pointwise norms, it is antilinear, and pairing a form against
its own star integrates to a positive squared norm.
"""

import numpy as np

from ..errors import ConfigInvalid
from .fuchsian import mobius_apply, mobius_derivative
from .series import PoincareSeries


def conformal_factor(z):
    """e^{2 u_X}: hyperbolic area density against the flat one."""
    return 4.0 / (1.0 - np.abs(np.asarray(z)) ** 2) ** 2


def u_X(z):
    """Conformal exponent u_X with e^{2 u_X} the hyperbolic density."""
    return np.log(2.0 / (1.0 - np.abs(np.asarray(z)) ** 2))


def dzbar_u_X(z):
    """Wirtinger zbar-derivative of u_X."""
    z = np.asarray(z)
    return z / (1.0 - np.abs(z) ** 2)


def star_E_coefficient(b_values, z):
    """Quadratic-differential coefficient of star_E applied to a Beltrami
    form with coefficient values ``b_values`` at points ``z``."""
    return -0.5j * np.conjugate(b_values) * conformal_factor(z)


class BeltramiClass:
    """Harmonic Beltrami form dual to a holomorphic quadratic differential.

    Harmonicity is structural: the coefficient is
    ``b = -2 i conj(h) e^{-2 u_X}`` with h holomorphic, which is exactly the
    image of the inverse star operator.  The pointwise norms of b and of
    the source differential agree identically.
    """

    def __init__(self, surface, quad):
        if not isinstance(quad, PoincareSeries) or quad.weight != 2:
            raise ConfigInvalid("a Beltrami class is built from a weight-2 "
                                "series")
        self.surface = surface
        self.quad = quad

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        h = self.quad.value(z).reshape(z.shape)
        return -2.0j * np.conjugate(h) / conformal_factor(z)

    def norm_value(self, z):
        """Pointwise metric norm, equal to |b| for this form type."""
        return np.abs(self.value(z))

    def automorphy_residual(self):
        """Max over generators and samples of
        ``|b(gz) conj(g') / g' - b(z)|`` (the Beltrami weight)."""
        z = self.quad._sample_points()
        base = self.value(z)
        worst = 0.0
        maps = list(self.surface.gens) + list(self.surface.gen_invs)
        for g in maps:
            w = mobius_apply(g, z)
            gp = mobius_derivative(g, z)
            pulled = self.value(w) * np.conjugate(gp) / gp
            worst = max(worst, float(np.abs(pulled - base).max()))
        return worst


def hodge_star_inverse(surface, quad):
    """Harmonic Beltrami representative of the class dual to ``quad``."""
    return BeltramiClass(surface, quad)


class EtaBasis:
    """Finite gauge-potential basis of automorphic vector fields.

    Each element is ``eta = e^{-6 u_X} conj(sigma) q`` with sigma a weight-3
    and q a weight-2 truncated group average; such a product transforms as
    ``eta(gz) = eta(z) g'(z)``, the vector-field weight.  The dbar
    derivative of each element is analytic in the series data:

        dbar eta = e^{-6 u_X} q (conj(sigma') - 6 conj(sigma) dzbar_u_X),

    so no numerical differentiation enters the Beltrami perturbations.
    """

    def __init__(self, surface, beta_cap=45.0, depth=8,
                 sigma_seeds=((1.0,), (0.0, 1.0)),
                 q_seeds=((1.0,), (0.0, 1.0), (0.0, 0.0, 1.0))):
        self.surface = surface
        self.sigmas = [PoincareSeries(surface, s, 3, beta_cap, depth)
                       for s in sigma_seeds]
        self.quads = [PoincareSeries(surface, s, 2, beta_cap, depth)
                      for s in q_seeds]
        self.pairs = [(i, j) for i in range(len(self.sigmas))
                      for j in range(len(self.quads))]

    def __len__(self):
        return len(self.pairs)

    def _factors(self, z):
        z = np.asarray(z, dtype=complex).reshape(-1)
        svals, sders = zip(*(s.value_and_derivative(z) for s in self.sigmas))
        qvals = [q.value(z) for q in self.quads]
        return z, svals, sders, qvals

    def eta_values(self, z):
        """(npoints, nbasis) matrix of eta element values."""
        z, svals, _, qvals = self._factors(z)
        w6 = np.exp(-6.0 * u_X(z))
        cols = [w6 * np.conjugate(svals[i]) * qvals[j]
                for i, j in self.pairs]
        return np.stack(cols, axis=1)

    def dbar_values(self, z):
        """(npoints, nbasis) matrix of dbar(eta) Beltrami coefficients."""
        z, svals, sders, qvals = self._factors(z)
        w6 = np.exp(-6.0 * u_X(z))
        du = dzbar_u_X(z)
        cols = [w6 * qvals[j] * (np.conjugate(sders[i])
                                 - 6.0 * du * np.conjugate(svals[i]))
                for i, j in self.pairs]
        return np.stack(cols, axis=1)

    def matrices(self, z):
        """(eta_values, dbar_values) from a single series evaluation pass."""
        z, svals, sders, qvals = self._factors(z)
        w6 = np.exp(-6.0 * u_X(z))
        du = dzbar_u_X(z)
        eta_cols, dbar_cols = [], []
        for i, j in self.pairs:
            cs = np.conjugate(svals[i])
            eta_cols.append(w6 * cs * qvals[j])
            dbar_cols.append(w6 * qvals[j] * (np.conjugate(sders[i])
                                              - 6.0 * du * cs))
        return np.stack(eta_cols, axis=1), np.stack(dbar_cols, axis=1)

    def pullback_signs(self):
        """Diagonal action of the hyperelliptic involution on the basis.

        The pullback of a vector field under z -> -z is -eta(-z); for seeds
        of definite parity each basis element is an eigenvector with
        eigenvalue -(-1)^(parity sum).  Mixed-parity seeds are rejected.
        """
        signs = np.empty(len(self.pairs))
        for k, (i, j) in enumerate(self.pairs):
            pa = self.sigmas[i].seed_parity
            pb = self.quads[j].seed_parity
            if pa is None or pb is None:
                raise ConfigInvalid("involution pullback needs definite "
                                    "parity seeds")
            signs[k] = -((-1.0) ** (pa + pb))
        return signs
