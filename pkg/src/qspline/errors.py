"""Exception hierarchy shared by every module in the package."""


class QSplineError(Exception):
    """Base class for all package errors."""


class InputError(QSplineError, ValueError):
    """Malformed or out-of-range input."""


class ResourceError(QSplineError):
    """Request exceeds the dense-simulation limits."""


class DegeneratePostselectionError(QSplineError):
    """A postselected branch carries (numerically) zero probability."""


class BoundInapplicableError(QSplineError, ValueError):
    """An analytic bound is vacuous for the requested parameters."""


class IllConditionedError(QSplineError):
    """Right-hand side has weight outside the well-conditioned subspace."""


class SolverError(QSplineError):
    """A direct solver hit a (numerically) singular pivot."""


class DomainError(QSplineError, ValueError):
    """Evaluation point outside the interpolation range."""


class BoundViolation(QSplineError, AssertionError):
    """A bound that is asserted to hold was observed to fail."""
