"""Exception types shared across the library."""


class ValidationError(ValueError):
    """Structurally invalid input (ordering, signs, inconsistent fields)."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class RangeError(ArithmeticError):
    """A value left the representable floating-point range."""


class FitError(RuntimeError):
    """A least-squares tail fit failed or is degenerate."""


class PoleGuardError(ZeroDivisionError):
    """Evaluation requested at (or too close to) a pole of a ratio formula."""


class GuardError(RuntimeError):
    """A search interval or contour touches a guarded singular point."""


class ConditioningError(ArithmeticError):
    """A denominator or winding computation is too ill-conditioned to trust."""


class IntegrationError(RuntimeError):
    """The ODE integrator failed to reach the requested endpoint."""
