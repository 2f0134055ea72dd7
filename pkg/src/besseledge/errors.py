"""Exception hierarchy shared by all modules."""


class BesselEdgeError(Exception):
    """Base class for errors raised by this package."""


class DomainError(BesselEdgeError, ValueError):
    """An argument lies outside the mathematical domain of the function."""


class ValidityError(BesselEdgeError, ValueError):
    """An asymptotic formula was requested outside its validity window."""


class RegimeError(BesselEdgeError, ValueError):
    """Parameters do not satisfy the preconditions of the requested regime."""


class ConvergenceError(BesselEdgeError, RuntimeError):
    """A quadrature or truncation refinement failed to settle."""

    def __init__(self, message, value=None, change=None):
        super().__init__(message)
        self.value = value
        self.change = change


class SpectrumError(BesselEdgeError, RuntimeError):
    """A discretized kernel produced eigenvalues outside [0, 1]."""
