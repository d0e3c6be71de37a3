"""Cartesian discretization of the octagon fundamental domain.

The octagon is covered by a uniform grid clipped to its interior.  Two
pieces of structure make the quotient geometry exact at the discrete
level:

* **Ghost closure.**  Stencil legs that step outside the domain land on
  ghost nodes; each ghost is folded back inside by the side-pairing maps
  and its value is defined as a 4x4 polynomial interpolant of interior
  nodes there.  For automorphic scalars this closure is consistent to the
  interpolation order, and it reproduces constants exactly because the
  interpolation weights sum to one.

* **Symmetric quadrature.**  Node weights are clipped cell areas (exact
  for full cells, subcell-sampled on the boundary strip, orphaned boundary
  area reassigned to the nearest interior node) and then symmetrized under
  z -> -z, so integrals of even/odd integrands keep the involution
  symmetry to machine precision.

The grid axis is built antisymmetric to the bit, and the octagon's
opposite circle centers are exact negatives, so the interior mask is
exactly invariant under negation and ``neg_perm`` is a true permutation
of the interior nodes.
"""

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigInvalid, OutOfDomain

DEFAULT_N = 301
DEFAULT_BOX = 0.86

_LAGRANGE_OFFSETS = [(dx, dy) for dx in range(-3, 4) for dy in range(-3, 4)]
_LAGRANGE_OFFSETS.sort(key=lambda o: (o[0] * o[0] + o[1] * o[1], o))


def _lagrange_weights(xi, nodes):
    w = np.ones(len(nodes))
    for i in range(len(nodes)):
        for j in range(len(nodes)):
            if i != j:
                w[i] *= (xi - nodes[j]) / (nodes[i] - nodes[j])
    return w


class SurfaceGrid:
    """Uniform grid on the octagon with folded ghost closure.

    Parameters
    ----------
    surface : FuchsianSurface
    n : odd int
        Nodes per axis of the bounding square (odd keeps a node at the
        origin and makes the axis exactly antisymmetric).
    box : float
        Half-width of the bounding square; must contain the octagon.
    """

    def __init__(self, surface, n=DEFAULT_N, box=DEFAULT_BOX):
        if n < 31 or n % 2 == 0:
            raise ConfigInvalid("grid needs an odd node count >= 31")
        if box <= surface.vertex_radius:
            raise ConfigInvalid("bounding box does not contain the octagon")
        self.surface = surface
        self.n = int(n)
        self.box = float(box)

        half = (n - 1) // 2
        pos = self.box * np.arange(1, half + 1) / half
        self.axis = np.concatenate([-pos[::-1], [0.0], pos])
        self.h = float(self.axis[1] - self.axis[0])

        zgrid = self.axis[None, :] + 1j * self.axis[:, None]
        self.mask = surface.inside(zgrid)
        self.idx = -np.ones((n, n), dtype=np.int64)
        self.idx[self.mask] = np.arange(int(self.mask.sum()))
        self.size = int(self.mask.sum())
        self.z = zgrid[self.mask]

        rr, cc = np.nonzero(self.mask)
        self.neg_perm = self.idx[n - 1 - rr, n - 1 - cc]
        if (self.neg_perm < 0).any():
            raise ConfigInvalid("interior mask is not symmetric under "
                                "negation; grid axis or octagon data are "
                                "inconsistent")

        self._build_ghosts(zgrid)
        self._build_laplacian()
        self._build_weights(zgrid)

        self.e2ux = surface.lambda_X(self.z)
        self.wh = self.w * self.e2ux
        self.area_flat = float(self.w.sum())
        self.area_hyp = float(self.wh.sum())

    # -- ghost closure -----------------------------------------------------

    def _build_ghosts(self, zgrid):
        n = self.n
        pad = np.zeros((n + 2, n + 2), dtype=bool)
        pad[1:-1, 1:-1] = self.mask
        nb = (pad[:-2, 1:-1] | pad[2:, 1:-1] | pad[1:-1, :-2] | pad[1:-1, 2:])
        ghost_mask = nb & ~self.mask
        self.ghost_idx = -np.ones((n, n), dtype=np.int64)
        self.ghost_idx[ghost_mask] = np.arange(int(ghost_mask.sum()))
        self.ghost_z = zgrid[ghost_mask]
        self.n_ghost = int(ghost_mask.sum())

        folded = self.surface.reduce_to_domain(self.ghost_z)
        rows, cols, vals = [], [], []
        for k in range(self.n_ghost):
            cidx, wts = self._interp_stencil(folded[k])
            rows.extend([k] * len(cidx))
            cols.extend(cidx)
            vals.extend(wts)
        self.G = sp.csr_matrix(
            (vals, (rows, cols)), shape=(self.n_ghost, self.size))
        self.ghost_folded = folded

    def _interp_stencil(self, zp):
        # Tensor Lagrange block near zp with every node interior.  The
        # canonical block is 4x4; when the domain is too thin for that
        # (corner wedges), the block slides and then degrades to 3x3 and
        # 2x2.  Weights always sum to one, so constants close exactly no
        # matter which block is chosen.  Extrapolation distance is capped
        # per size to keep the weights well conditioned.
        n, h = self.n, self.h
        bx = int(np.floor((zp.real - self.axis[0]) / self.h))
        by = int(np.floor((zp.imag - self.axis[0]) / self.h))
        for size, ext_cap in ((4, 1.5), (3, 2.0), (2, 3.0)):
            best = None
            base_x = bx - (size // 2 - 1) if size > 2 else bx
            base_y = by - (size // 2 - 1) if size > 2 else by
            for dx, dy in _LAGRANGE_OFFSETS:
                x0, y0 = base_x + dx, base_y + dy
                if not (0 <= x0 <= n - size and 0 <= y0 <= n - size):
                    continue
                block = self.idx[y0:y0 + size, x0:x0 + size]
                if (block < 0).any():
                    continue
                ex = max(0.0, self.axis[x0] - zp.real,
                         zp.real - self.axis[x0 + size - 1])
                ey = max(0.0, self.axis[y0] - zp.imag,
                         zp.imag - self.axis[y0 + size - 1])
                dist = max(ex, ey) / h
                if dist > ext_cap:
                    continue
                if best is None or dist < best[0] - 1e-12:
                    best = (dist, x0, y0)
                    if dist == 0.0:
                        break
            if best is not None:
                _, x0, y0 = best
                block = self.idx[y0:y0 + size, x0:x0 + size]
                lx = _lagrange_weights(zp.real, self.axis[x0:x0 + size])
                ly = _lagrange_weights(zp.imag, self.axis[y0:y0 + size])
                wts = (ly[:, None] * lx[None, :]).ravel()
                return block.ravel().tolist(), wts.tolist()
        raise OutOfDomain("no interior interpolation block near "
                          "%g%+gj; grid too coarse" % (zp.real, zp.imag))

    # -- operator ------------------------------------------------------------

    def _build_laplacian(self):
        n = self.n
        rows, cols, vals = [], [], []
        grows, gcols, gvals = [], [], []
        rr, cc = np.nonzero(self.mask)
        for i in range(self.size):
            r, c = rr[i], cc[i]
            rows.append(i)
            cols.append(i)
            vals.append(-4.0)
            for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                r2, c2 = r + dr, c + dc
                j = self.idx[r2, c2]
                if j >= 0:
                    rows.append(i)
                    cols.append(j)
                    vals.append(1.0)
                else:
                    grows.append(i)
                    gcols.append(self.ghost_idx[r2, c2])
                    gvals.append(1.0)
        core = sp.csr_matrix((vals, (rows, cols)),
                             shape=(self.size, self.size))
        bound = sp.csr_matrix((gvals, (grows, gcols)),
                              shape=(self.size, self.n_ghost))
        self.A = ((core + bound @ self.G) / (self.h * self.h)).tocsr()
        self.A.sum_duplicates()

    # -- quadrature ----------------------------------------------------------

    def _build_weights(self, zgrid):
        n, h = self.n, self.h
        surface = self.surface
        # Sagitta bound: a boundary arc can bulge at most this far into a
        # cell whose corners it does not separate, so corner tests with this
        # margin classify full cells exactly.
        sag = h * h / (8.0 * surface.circle_radius) + 1e-12

        corners = zgrid[..., None] + 0.5 * h * np.array(
            [1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])
        cdist = np.stack([surface.boundary_distance(corners[..., k])
                          for k in range(4)], axis=-1)
        full = (cdist > sag).all(axis=-1)
        empty = (cdist < -sag).all(axis=-1) & ~self.mask
        straddle = ~full & ~empty

        w = np.zeros((n, n))
        w[full] = h * h

        srows, scols = np.nonzero(straddle)
        if srows.size:
            # 16x16 midpoint subcells per straddling cell, evaluated in one
            # vectorized membership pass.
            sub = (np.arange(16) + 0.5) / 16.0 - 0.5
            offsets = ((sub[None, :] + 1j * sub[:, None]) * h).reshape(-1)
            pts = (zgrid[srows, scols][:, None] + offsets[None, :]).reshape(-1)
            frac = surface.inside(pts).reshape(-1, 256).mean(axis=1)
            w[srows, scols] = frac * h * h

        # Reassign boundary-cell area whose node is outside to the nearest
        # interior node, so every weight multiplies a solved value.
        wflat = np.zeros(self.size)
        own = self.mask & (w > 0)
        wflat[self.idx[own]] = w[own]
        orows, ocols = np.nonzero(~self.mask & (w > 0))
        for r, c in zip(orows, ocols):
            # nearest interior node within an expanding square window
            found = False
            for rad in range(1, 6):
                cand = []
                for dr in range(-rad, rad + 1):
                    for dc in range(-rad, rad + 1):
                        r2, c2 = r + dr, c + dc
                        if 0 <= r2 < n and 0 <= c2 < n and self.idx[r2, c2] >= 0:
                            cand.append((dr * dr + dc * dc, dr, dc,
                                         self.idx[r2, c2]))
                if cand:
                    cand.sort()
                    wflat[cand[0][3]] += w[r, c]
                    found = True
                    break
            if not found:
                raise OutOfDomain("orphaned boundary cell with no interior "
                                  "node nearby")
        self.w = 0.5 * (wflat + wflat[self.neg_perm])

    # -- integrals and sampling ----------------------------------------------

    def integrate_flat(self, values):
        """Flat-measure integral of a node field."""
        return complex(np.sum(self.w * values)) if np.iscomplexobj(values) \
            else float(np.sum(self.w * values))

    def integrate(self, values):
        """Hyperbolic-measure integral of a node field."""
        return complex(np.sum(self.wh * values)) if np.iscomplexobj(values) \
            else float(np.sum(self.wh * values))

    def mean_hyp(self, values):
        """Hyperbolic area mean of a node field."""
        return float(np.sum(self.wh * values) / self.area_hyp)

    def interp_matrix(self, pts):
        """Sparse interpolation matrix from interior nodes to ``pts``.

        Points outside the octagon are folded in first, so sampling an
        automorphic scalar anywhere in the disk is legitimate.
        """
        pts = np.asarray(pts, dtype=complex).reshape(-1)
        folded = self.surface.reduce_to_domain(pts)
        rows, cols, vals = [], [], []
        for k in range(folded.size):
            cidx, wts = self._interp_stencil(folded[k])
            rows.extend([k] * len(cidx))
            cols.extend(cidx)
            vals.extend(wts)
        return sp.csr_matrix((vals, (rows, cols)),
                             shape=(pts.size, self.size))

    def sample(self, values, pts):
        """Interpolate a node field at arbitrary points (folding applied)."""
        return self.interp_matrix(pts) @ np.asarray(values)


def octagon_quadrature(surface, order=32):
    """Spectral quadrature on the octagon for analytic integrands.

    The domain is split into eight curved wedges joining the origin to one
    boundary arc; each wedge is the smooth image of a square and carries a
    tensor Gauss-Legendre rule.  Series products are analytic on a
    neighborhood of the closed octagon, so this rule converges
    exponentially and serves the pairing integrals at tolerances the
    cell-clipped PDE grid cannot reach.

    Returns (points, weights) for the flat measure dx dy.
    """
    xg, wg = np.polynomial.legendre.leggauss(order)
    s = 0.5 * (xg + 1.0)
    ws = 0.5 * wg
    pts, wts = [], []
    r = surface.circle_radius
    for m in range(8):
        c = surface.centers[m]
        phi0 = np.angle(surface.vertices[(m - 1) % 8] - c)
        phi1 = np.angle(surface.vertices[m] - c)
        dphi = (phi1 - phi0 + np.pi) % (2.0 * np.pi) - np.pi
        phi = phi0 + dphi * s
        bnd = c + r * np.exp(1j * phi)          # boundary curve R(tau)
        dbnd = 1j * r * dphi * np.exp(1j * phi)  # dR/dtau
        # T(sr, tau) = sr * R(tau); area element sr * Im(conj(R) R') .
        jac = np.imag(np.conj(bnd) * dbnd)
        pts.append((s[:, None] * bnd[None, :]).ravel())
        wts.append(((s * ws)[:, None] * (ws * jac)[None, :]).ravel())
    return np.concatenate(pts), np.concatenate(wts)
