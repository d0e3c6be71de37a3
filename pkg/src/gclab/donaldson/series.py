"""Automorphic forms on the octagon surface via truncated group averages.

A weight-k series sums ``H(gz) g'(z)^k`` over a finite ball of group
elements, where ``H`` is a polynomial seed.  The result transforms with
weight k under every generator up to the truncation tail, and that
measured automorphy defect is the convergence certificate: it is reported,
never assumed.  Weight 2 gives holomorphic quadratic differentials (the
objects dual to Beltrami forms); weight 3 supplies the auxiliary factors
from which the gauge-potential basis is built.

Values and z-derivatives are computed in one pass by a compiled kernel;
the group ball has a fixed deterministic order, so every sum here is
bitwise reproducible.
"""

import math

import numba
import numpy as np

from ..errors import ConfigInvalid
from .fuchsian import mobius_apply, mobius_derivative


@numba.njit(parallel=True, cache=True)
def _group_sum(z, alpha, beta, coeffs, weight):
    n = z.shape[0]
    val = np.zeros(n, dtype=numba.complex128)
    der = np.zeros(n, dtype=numba.complex128)
    for j in numba.prange(n):
        zz = z[j]
        acc = 0.0 + 0.0j
        dacc = 0.0 + 0.0j
        for i in range(alpha.shape[0]):
            den = np.conj(beta[i]) * zz + np.conj(alpha[i])
            w = (alpha[i] * zz + beta[i]) / den
            dp = 1.0 / (den * den)
            ddp = -2.0 * np.conj(beta[i]) / (den * den * den)
            h = 0.0 + 0.0j
            hp = 0.0 + 0.0j
            for c in range(coeffs.shape[0] - 1, -1, -1):
                hp = hp * w + h
                h = h * w + coeffs[c]
            dpk = dp ** weight
            acc += h * dpk
            dacc += hp * dp * dpk + weight * h * (dpk / dp) * ddp
        val[j] = acc
        der[j] = dacc
    return val, der


def _seed_parity(coeffs):
    # Parity of the seed under z -> -z: 0 even, 1 odd, None mixed.
    nz = np.flatnonzero(np.abs(coeffs) > 0.0)
    if nz.size == 0 or not (nz % 2 - nz[0] % 2 == 0).all():
        return None
    return int(nz[0] % 2)


class PoincareSeries:
    """Weight-k automorphic form from a polynomial seed.

    Parameters
    ----------
    surface : FuchsianSurface
    seed : sequence of complex
        Polynomial coefficients of H, ascending in z.
    weight : int
        Automorphy weight k >= 2.  Weight 2 sits at the slowest-converging
        edge; its residual is the one worth watching.
    beta_cap, depth : truncation of the group ball.
    """

    def __init__(self, surface, seed, weight, beta_cap=45.0, depth=8):
        seed = np.asarray(seed, dtype=complex)
        if seed.ndim != 1 or seed.size == 0:
            raise ConfigInvalid("series seed must be a nonempty 1-d "
                                "coefficient list")
        if weight < 2:
            raise ConfigInvalid("automorphic weight must be >= 2")
        self.surface = surface
        self.seed = seed
        self.weight = int(weight)
        self.beta_cap = float(beta_cap)
        self.alpha, self.beta = surface.group_ball(beta_cap, depth)
        self.seed_parity = _seed_parity(seed)

    def value_and_derivative(self, z):
        z = np.ascontiguousarray(np.asarray(z, dtype=complex).reshape(-1))
        return _group_sum(z, self.alpha, self.beta, self.seed, self.weight)

    def value(self, z):
        return self.value_and_derivative(z)[0]

    def _sample_points(self):
        # Fixed interior sample set for certificates: rings well inside the
        # octagon, filtered by membership.
        r = np.linspace(0.15, 0.78, 7)
        th = np.linspace(0.0, 2.0 * math.pi, 17)[:-1]
        z = (r[:, None] * np.exp(1j * th)[None, :]).reshape(-1)
        return z[self.surface.inside(z, margin=1e-9)]

    def automorphy_residual(self):
        """Max over generators and interior samples of
        ``|Theta(gz) g'(z)^k - Theta(z)|``.

        This is the truncation certificate for the group-ball cutoff; it is
        small but not zero, and shrinks as beta_cap grows.
        """
        z = self._sample_points()
        base = self.value(z)
        worst = 0.0
        maps = list(self.surface.gens) + list(self.surface.gen_invs)
        for g in maps:
            w = mobius_apply(g, z)
            fac = mobius_derivative(g, z) ** self.weight
            worst = max(worst, float(np.abs(self.value(w) * fac - base).max()))
        return worst

    def sup_sample(self):
        """Max-abs of the series over the fixed interior sample set."""
        return float(np.abs(self.value(self._sample_points())).max())


class AutomorphicQuadDiff(PoincareSeries):
    """Holomorphic quadratic differential ``q = h(z) dz^2`` (weight 2).

    The coefficient h is the truncated group average of the seed.  The
    class refuses seeds whose average collapses to the zero differential,
    since a vanishing q carries no Beltrami data.
    """

    def __init__(self, surface, seed, beta_cap=45.0, depth=8):
        super().__init__(surface, seed, weight=2,
                         beta_cap=beta_cap, depth=depth)
        if self.sup_sample() <= 1e-12:
            raise ConfigInvalid("seed averages to the zero quadratic "
                                "differential at this truncation")
