"""Damped Newton solver for the disk problem -Laplace(xi) = W e^xi - g.

The Jacobian of the discrete residual A xi - b - W e^xi + g is
A - diag(W e^xi), which loses definiteness near blow-up, so steps are
globalized by halving against the residual norm (Armijo on |R| rather than
on the energy, whose Hessian is the same indefinite matrix).

The line search measures progress in the scaled 2-norm while convergence
is declared on the scaled max-norm: a max-norm merit lets a single node
near a weight zero veto steps that contract the residual everywhere else,
which shows up as creep on steep warm-started continuation members.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import splu

from ..errors import LinearSolveFailure, NewtonDiverged
from .grid import DEFAULT_N, DiskGrid, PlanarField, assemble_laplacian, \
    fill_exterior_with_trace


@dataclass
class NewtonCfg:
    """Convergence is judged on the diagonally scaled residual
    max_i |R_i| / A_ii, which is dimensionless and grid-independent; raw
    Shortley-Weller rows at tiny circle-cut legs scale like 2/(theta h^2),
    putting a raw max-norm target below the float64 roundoff floor."""
    tol: float = 1e-10
    max_iter: int = 40
    min_step: float = 2.0 ** -24
    armijo: float = 1e-4


def solve_local(problem, init=None, newton_cfg=None, n=DEFAULT_N):
    """Solve the local problem on an n x n disk grid.

    `init` warm-starts the iteration (grid shapes must match); the returned
    field stores the trace on exterior nodes and solver diagnostics in meta.
    """
    cfg = newton_cfg or NewtonCfg()
    grid = DiskGrid(n, problem.delta)
    A, b, idx, z_in = assemble_laplacian(grid, problem.trace)
    W = problem.weight(z_in)
    g = problem.source_values(z_in)

    if init is not None and init.values.shape == (n, n):
        u = init.values[grid.inside()].astype(float).copy()
    else:
        u = np.zeros(len(z_in))

    inv_diag = 1.0 / A.diagonal()

    def residual(u):
        with np.errstate(over="ignore"):
            r = A @ u - b - W * np.exp(u) + g
        return r

    def scaled_norm(r):
        return float(np.max(np.abs(r * inv_diag)))

    def merit(r):
        return float(np.linalg.norm(r * inv_diag))

    history = []
    r = residual(u)
    rnorm = scaled_norm(r)
    history.append(rnorm)
    it = 0
    while rnorm > cfg.tol:
        if it >= cfg.max_iter:
            raise NewtonDiverged(
                "Newton stalled at residual %.3e after %d iterations"
                % (rnorm, it),
                last_iterate=_to_field(grid, problem, u, idx, history),
                residual_history=history)
        with np.errstate(over="ignore"):
            wexp = W * np.exp(u)
        if not np.all(np.isfinite(wexp)):
            raise NewtonDiverged(
                "iterate left the representable range",
                last_iterate=_to_field(grid, problem, u, idx, history),
                residual_history=history)
        J = A - diags(wexp)
        try:
            step = splu(J.tocsc()).solve(-r)
        except RuntimeError as e:
            raise LinearSolveFailure("sparse factorization failed: %s" % e)
        if not np.all(np.isfinite(step)):
            raise LinearSolveFailure("Newton step is not finite")
        mnorm = merit(r)
        alpha = 1.0
        while True:
            r_try = residual(u + alpha * step)
            ok = np.all(np.isfinite(r_try))
            if ok and merit(r_try) <= (1.0 - cfg.armijo * alpha) * mnorm:
                break
            alpha *= 0.5
            if alpha < cfg.min_step:
                raise NewtonDiverged(
                    "line search failed at residual %.3e" % rnorm,
                    last_iterate=_to_field(grid, problem, u, idx, history),
                    residual_history=history)
        u = u + alpha * step
        r = residual(u)
        rnorm = scaled_norm(r)
        history.append(rnorm)
        it += 1
    return _to_field(grid, problem, u, idx, history)


def _to_field(grid, problem, u, idx, history):
    vals = np.zeros((grid.n, grid.n))
    mask = grid.inside()
    vals[mask] = u
    fill_exterior_with_trace(grid, problem.trace, vals)
    return PlanarField(grid, vals, meta={
        "residual_history": list(history),
        "newton_iterations": max(0, len(history) - 1),
    })
