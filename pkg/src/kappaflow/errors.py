"""Exception hierarchy for kappaflow."""


class KappaflowError(Exception):
    """Base class for all kappaflow errors."""


class InvalidParameterError(KappaflowError):
    """A model or run parameter violates its constraint."""


class NumericalDomainError(KappaflowError):
    """A field evaluation produced a non-finite value."""


class ShapeError(KappaflowError):
    """Input has the wrong structure (degenerate curve, non-normal matrix, ...)."""


class DivergenceError(KappaflowError):
    """Trajectory integration produced a non-finite state."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NoCycleError(KappaflowError):
    """No Poincare-section crossing found within the time budget."""


class NonConvergenceError(KappaflowError):
    """Successive loops did not converge below the closure tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class CoincidentPointError(KappaflowError):
    """Probe point coincides with a reference point."""


class NoValidWError(KappaflowError):
    """Every rotational-component candidate had a negative discriminant."""

    def __init__(self, message, deficit=None):
        super().__init__(message)
        self.deficit = deficit


class SingularKappaError(KappaflowError):
    """kappa with p^2 + w^2 = 0 cannot be inverted."""


class AbortedTraceError(KappaflowError):
    """Level trace aborted mid-way; carries the partial curve."""

    def __init__(self, message, partial_points=None, step=None):
        super().__init__(message)
        self.partial_points = partial_points
        self.step = step


class StagnationError(KappaflowError):
    """Level trace made insufficient winding progress within the step budget."""

    def __init__(self, message, winding=None, steps=None):
        super().__init__(message)
        self.winding = winding
        self.steps = steps


class DegenerateDecompositionError(KappaflowError):
    """kappa_0 vanished (or F_0 failed positive semi-definiteness) at the fixed point."""


class IdentityViolationError(KappaflowError):
    """A Jacobian split failed its reconstruction identity."""


class BranchDomainError(KappaflowError):
    """Potential inversion left the real domain (beta^2 - 4 psi < 0)."""
