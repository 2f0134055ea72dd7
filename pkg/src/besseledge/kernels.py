r"""Bessel and Airy correlation kernels.

Both kernels are integrable kernels of the form

.. math::
    K(x, y) = \frac{f(x) g(y) - g(x) f(y)}{c\,(x - y)},

so a matrix of kernel values only needs the two vectors ``f`` and ``g`` on
the nodes. For the Bessel kernel :math:`f(x) = J_\alpha(\sqrt x)`,
:math:`g(x) = \sqrt x J_\alpha'(\sqrt x)` and :math:`c = 2`; for the Airy
kernel :math:`f = \mathrm{Ai}`, :math:`g = \mathrm{Ai}'` and :math:`c = 1`.

Close to the diagonal the quotient is replaced by the diagonal value at the
midpoint, which is accurate to second order because the kernel is symmetric.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError

NEAR_DIAGONAL = 1e-6


class Family(enum.Enum):
    BESSEL = "bessel"
    AIRY = "airy"


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel to evaluate; ``alpha`` is only used by the Bessel family."""

    family: Family
    alpha: float = 0.0

    def __post_init__(self):
        if self.family is Family.BESSEL and not self.alpha > -1.0:
            raise DomainError(f"Bessel kernel needs alpha > -1, got {self.alpha}")

    @classmethod
    def bessel(cls, alpha):
        return cls(Family.BESSEL, float(alpha))

    @classmethod
    def airy(cls):
        return cls(Family.AIRY)


def _check_domain(spec, x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("kernel arguments must be finite")
    if spec.family is Family.BESSEL and np.any(x < 0):
        raise DomainError("Bessel kernel is defined on [0, inf)")
    return x


def kernel_parts(spec, x):
    """Return ``(f, g, diag)`` on the points ``x``.

    ``diag`` is the kernel on the diagonal. For the Bessel kernel with
    :math:`s = \\sqrt{x}` it equals
    :math:`\\tfrac14\\big(J_\\alpha'(s)^2 + (1 - \\alpha^2/x) J_\\alpha(s)^2\\big)`.
    """
    x = _check_domain(spec, x)
    if spec.family is Family.AIRY:
        ai, aip = specfun.airy_ai(x)
        return ai, aip, aip * aip - x * ai * ai
    alpha = spec.alpha
    s = np.sqrt(x)
    j, jp = specfun.jv_jvp(alpha, s)
    with np.errstate(invalid="ignore"):
        g = s * jp
    if alpha >= 0:
        # s J'(s) ~ alpha (s/2)^alpha / Gamma(alpha + 1) -> 0, even where J' itself is infinite
        g = np.where(x == 0, 0.0, g)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.where(x > 0, alpha * alpha / x, 0.0)
        diag = 0.25 * (jp * jp + (1.0 - ratio) * j * j)
    # x -> 0: K(x,x) -> 1/4 for alpha = 0, -> 0 for alpha > 0, diverges for alpha < 0
    at_zero = x == 0
    if np.any(at_zero):
        diag = np.where(at_zero, 0.25 if alpha == 0 else (0.0 if alpha > 0 else np.inf), diag)
    return j, g, diag


def _assemble(spec, x, fx, gx, dx, y, fy, gy):
    c = 2.0 if spec.family is Family.BESSEL else 1.0
    xx = x[:, None]
    yy = y[None, :]
    diff = xx - yy
    num = fx[:, None] * gy[None, :] - gx[:, None] * fy[None, :]
    near = np.abs(diff) < NEAR_DIAGONAL * np.maximum(1.0, np.maximum(np.abs(xx), np.abs(yy)))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / (c * diff)
    if np.any(near):
        ii, jj = np.nonzero(near)
        mid = 0.5 * (x[ii] + y[jj])
        same = x[ii] == y[jj]
        vals = np.empty(len(ii))
        if np.any(same):
            vals[same] = dx[ii[same]]
        if np.any(~same):
            vals[~same] = kernel_parts(spec, mid[~same])[2]
        out[ii, jj] = vals
    return out


def kernel_matrix(spec, x, y=None):
    """Kernel values ``K(x_i, y_j)`` as a 2-D array.

    With ``y`` omitted the result is the symmetric matrix on ``x``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    fx, gx, dx = kernel_parts(spec, x)
    if y is None:
        return _assemble(spec, x, fx, gx, dx, x, fx, gx)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    fy, gy, _ = kernel_parts(spec, y)
    return _assemble(spec, x, fx, gx, dx, y, fy, gy)


def eval_kernel(spec, x, y):
    """Return K(x, y) for scalar arguments."""
    return float(kernel_matrix(spec, [x], [y])[0, 0])


def eval_kernel_diag(spec, x):
    """Return K(x, x); vectorised over ``x``."""
    d = kernel_parts(spec, np.atleast_1d(x))[2]
    return float(d[0]) if np.ndim(x) == 0 else d
