"""Shared exception and warning types.

Every named failure mode raised by the numerical modules lives here so that
the service layer can map them to structured error responses uniformly.
"""


class GclabError(Exception):
    """Base class for all package-specific errors."""


class ConfigInvalid(GclabError):
    """Request/configuration failed validation beyond schema checks."""


class ReferenceVanishes(GclabError):
    """All basis elements vanish at a requested jet point; no reference
    section can be chosen there."""


class RootIsolationFailure(GclabError):
    """Polynomial root clustering could not separate roots at the working
    tolerance."""


class CoincidentPoints(GclabError):
    """Two interpolation/support points coincide relative to the node spread,
    so divided differences (or jet stacking) are ill-posed as stated."""


class SearchBudgetExceeded(GclabError):
    """An optimization/search loop ran out of its iteration budget without
    certifying a result."""


class DegreeTooLarge(GclabError):
    """A polynomial degree exceeds what the routine supports exactly."""


class PoleAt(GclabError):
    """A local expansion was requested where the object has a pole."""


class TailBoundViolated(GclabError):
    """A truncated group sum failed its a-posteriori tail/automorphy bound."""


class NewtonDiverged(GclabError):
    """Damped Newton failed to reduce the residual within its budget.
    Carries the last iterate and the residual-norm history."""

    def __init__(self, msg, last_iterate=None, residual_history=None):
        super().__init__(msg)
        self.last_iterate = last_iterate
        self.residual_history = residual_history or []


class NonConvergedContinuationHint(NewtonDiverged):
    """Newton diverged inside a continuation family; carries the failing
    parameter and a hint that a finer schedule step is needed."""

    def __init__(self, msg, t_failed=None, t_last_good=None, index=None,
                 last_iterate=None, residual_history=None):
        super().__init__(msg, last_iterate, residual_history)
        self.t_failed = t_failed
        self.t_last_good = t_last_good
        self.index = index


class NoPlateau(GclabError):
    """Mass function m(r) has no flat window over the probed radii."""


class OutOfDomain(GclabError):
    """A point lies outside the grid/ball on which a field is defined."""


class NonFiniteIntegrand(GclabError):
    """An integrand evaluated to NaN/inf on the quadrature node set."""


class MaxIterations(GclabError):
    """Generic iteration cap hit (root polishing, folding, BFS, ...).

    Outer optimization loops attach their best iterate and the residuals it
    achieved, so callers can inspect how close the run got."""

    def __init__(self, msg, state=None, residuals=None):
        super().__init__(msg)
        self.state = state
        self.residuals = residuals or {}


class LinearSolveFailure(GclabError):
    """A sparse/dense linear solve failed or returned non-finite values."""


class RankDeficiencyWarning(UserWarning):
    """Jet matrix rank fell below the generic value for the divisor;
    downstream dimensions may differ from the generic count."""
