"""Local masses, plateau extraction, rescaling, and the Pohozaev residual."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigInvalid, NoPlateau, OutOfDomain
from .grid import DiskGrid, PlanarField

EIGHT_PI = 8.0 * np.pi


@dataclass
class MassReport:
    center: complex
    radii: np.ndarray
    partial_masses: np.ndarray        # m(r) = integral over B_r of W e^xi
    sigma: float                      # plateau value
    plateau_radius: float
    plateau_width: int                # consecutive radii within rel_tol
    quantization_residual: float      # distance from sigma to 8 pi N


def dyadic_radii(r_max, levels=8):
    return np.array([r_max * 2.0 ** (-k) for k in range(levels)])[::-1]


def partial_masses(field, weight, center, radii):
    """Cell-sum quadrature of W e^xi over concentric disks.

    Cells are h^2 boxes at interior nodes; a cell counts when its node lies
    in B_r(center). First-order at the rim, which the plateau tolerances
    absorb.
    """
    grid = field.grid
    z = grid.points()
    mask = grid.inside()
    zc = z[mask] - complex(center)
    dens = np.asarray(weight(z[mask]), dtype=float) \
        * np.exp(field.values[mask])
    cell = grid.h ** 2
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise ConfigInvalid("radii must be positive")
    if np.any(radii > grid.delta + 1e-12):
        raise ConfigInvalid("radii must stay inside the domain")
    order = np.argsort(np.abs(zc))
    rsort = np.abs(zc)[order]
    csum = np.concatenate([[0.0], np.cumsum(dens[order] * cell)])
    k = np.searchsorted(rsort, radii, side="right")
    return csum[k]


def local_mass(field, weight, center, radii, flat_tol=0.05):
    """MassReport with sigma from the flattest point of m against ln r.

    The plateau is where |dm/d ln r| / m is smallest; if even the flattest
    point exceeds flat_tol the mass function has no stable plateau and
    NoPlateau is raised.
    """
    radii = np.sort(np.asarray(radii, dtype=float))
    if len(radii) < 3:
        raise ConfigInvalid("need at least 3 radii for plateau detection")
    m = partial_masses(field, weight, center, radii)
    lnr = np.log(radii)
    dm = np.gradient(m, lnr)
    with np.errstate(divide="ignore", invalid="ignore"):
        flat = np.abs(dm) / np.where(m > 0, m, np.inf)
    i = int(np.argmin(flat))
    if not np.isfinite(flat[i]) or flat[i] > flat_tol:
        raise NoPlateau(
            "m(r) has no flat window: min |dm/dlnr|/m = %.3g over %d radii"
            % (float(np.min(flat)), len(radii)))
    sigma = float(m[i])
    width = 1
    j = i
    while j + 1 < len(m) and abs(m[j + 1] - sigma) <= flat_tol * sigma:
        width += 1
        j += 1
    j = i
    while j - 1 >= 0 and abs(m[j - 1] - sigma) <= flat_tol * sigma:
        width += 1
        j -= 1
    nearest = max(1.0, np.round(sigma / EIGHT_PI))
    return MassReport(center=complex(center), radii=radii, partial_masses=m,
                      sigma=sigma, plateau_radius=float(radii[i]),
                      plateau_width=width,
                      quantization_residual=float(abs(sigma
                                                      - EIGHT_PI * nearest)))


def rescale(field, tau, n, target_delta=None, grid_n=None):
    """phi(z) = xi(tau z) + 2 (n + 1) ln tau on a disk of radius delta/tau.

    Pure zoom: tau <= 1 so the source points tau*z stay inside the original
    domain. Grid-aligned points reproduce stored values exactly aside from
    the additive constant.
    """
    tau = float(tau)
    if not 0 < tau <= 1.0:
        raise ConfigInvalid("tau must lie in (0, 1]")
    delta_out = target_delta or field.grid.delta / tau
    if delta_out * tau > field.grid.delta * (1.0 + 1e-12):
        raise OutOfDomain("target disk reaches outside the source field")
    nn = grid_n or field.grid.n
    out_grid = DiskGrid(nn, delta_out)
    z = out_grid.points()
    src = tau * z
    interp = field.interpolator(method="cubic")
    pts = np.stack([src.imag.ravel(), src.real.ravel()], axis=1)
    vals = interp(pts).reshape(nn, nn) + 2.0 * (n + 1) * np.log(tau)
    if tau == 1.0 and nn == field.grid.n and delta_out == field.grid.delta:
        vals = field.values.copy()
    return PlanarField(out_grid, vals, meta={
        "tau": tau, "n": n, "source_delta": field.grid.delta})


def pohozaev_residual(sigma0, lambda_phi, n):
    """|sigma0^2 - lambda^2 - 8 pi (n+1) (sigma0 - lambda)|."""
    s, lam = float(sigma0), float(lambda_phi)
    return abs(s * s - lam * lam - EIGHT_PI * (n + 1) * (s - lam))
