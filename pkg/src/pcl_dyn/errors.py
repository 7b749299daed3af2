"""Exception types shared across the package."""


class PclDynError(Exception):
    """Base class for all package errors."""


class ConfigError(PclDynError):
    """Bad or inconsistent configuration input."""


class ValidationError(PclDynError):
    """A structural invariant of a domain object is violated."""


class QuadratureError(PclDynError):
    """Numerical quadrature failed to reach the requested accuracy."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class FitError(PclDynError):
    """Multi-exponential fit failed (rank deficiency or unpairable exponents)."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DivergenceError(PclDynError):
    """Propagation produced non-finite values."""

    def __init__(self, message, time=None, row=None):
        super().__init__(message)
        self.time = time
        self.row = row


class ConvergenceError(PclDynError):
    """Iteration did not converge within its budget."""

    def __init__(self, message, last=None, residual=None):
        super().__init__(message)
        self.last = last
        self.residual = residual
