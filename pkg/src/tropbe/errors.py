"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input violates a mathematical precondition (e.g. c_0 = 0 for tropical analysis)."""


class ParseError(ValueError):
    """Malformed polynomial or root file; message names the file and line."""


class ConvergenceError(RuntimeError):
    """An iterative method failed to converge.

    ``best`` holds the last iterates and ``residuals`` per-root diagnostics
    when available.
    """

    def __init__(self, message, best=None, residuals=None):
        super().__init__(message)
        self.best = best
        self.residuals = residuals


class WitnessError(ArithmeticError):
    """A constructive witness could not be formed (degenerate cancellation)."""


class SingularDerivativeError(ZeroDivisionError):
    """Derivative vanished where a first-order estimate needed to divide by it."""
