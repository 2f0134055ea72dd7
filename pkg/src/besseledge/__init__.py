"""Numerics for the Bessel point process of large order.

Modules
-------
specfun
    Bessel, Airy, Gamma and Barnes G functions, uniform asymptotics.
kernels
    Bessel and Airy correlation kernels.
fredholm
    Nyström Fredholm determinants: exponential moments, gaps, counting moments.
asympt
    Closed-form large-``r`` predictions.
dppsim
    Exact sampling and Monte-Carlo checks of the CLTs and rigidity.
cli
    Command-line front end.
"""

from .errors import (
    BesselEdgeError,
    ConvergenceError,
    DomainError,
    RegimeError,
    SpectrumError,
    ValidityError,
)

__version__ = "0.1.0"

__all__ = [
    "BesselEdgeError",
    "ConvergenceError",
    "DomainError",
    "RegimeError",
    "SpectrumError",
    "ValidityError",
    "__version__",
]
