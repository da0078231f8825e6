"""Exception types shared across the package."""


class QvPricerError(Exception):
    """Base class for errors raised by qvpricer."""


class ParameterError(QvPricerError, ValueError):
    """A domain type was constructed with out-of-range fields."""


class ModelValidationError(QvPricerError, ValueError):
    """Model parameters violate a boundary (no-explosion / no-absorption) condition."""


class StripError(QvPricerError, ValueError):
    """A point or contour lies outside the required analyticity strip."""


class EmptyStripError(StripError):
    """Model and payoff strips have empty intersection; no valid contour exists."""


class SingularPointError(QvPricerError, ArithmeticError):
    """A transform was evaluated too close to its singular set."""


class ConvergenceError(QvPricerError, ArithmeticError):
    """An iterative or adaptive scheme did not reach its target accuracy."""

    def __init__(self, message, best=None, est_error=None):
        super().__init__(message)
        self.best = best
        self.est_error = est_error


class SchemaError(QvPricerError, ValueError):
    """A run configuration file does not match the documented schema."""
