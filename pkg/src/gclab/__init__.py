"""gclab: a numerical laboratory for three tightly coupled experiments.

- `liouville_exact`: closed-form planar Liouville solutions with two simple
  zeros, their developing maps, and high-accuracy plane integrals of the
  associated densities.
- `curve_algebra`: quadratic differentials on hyperelliptic curves, jet
  evaluation against divisors, vanishing subspaces, the Kodaira-style point
  map, secant-variety membership certificates, and dual decompositions of
  jet functionals.
- `liouville_pde`: a finite-difference solver for the singular mean-field
  equation on a disk, blow-up diagnostics (local masses, plateaus, rescaling
  limits) and a collapsing-zeros continuation family.
- `donaldson`: the constrained scalar-curvature functional on a genus-2
  hyperbolic surface presented by a Fuchsian group, with automorphic field
  assembly by group averaging and an alternating minimization scheme.

The `service` subpackage exposes every operation over HTTP (FastAPI), and
`cli` is a thin client for it.
"""

__all__ = ["errors"]
__version__ = "0.1.0"
