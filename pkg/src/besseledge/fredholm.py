r"""Nyström evaluation of Fredholm determinants of the Bessel and Airy kernels.

The exponential moment of the counting function,

.. math::
    E_\alpha(\vec t, \vec u) = \mathbb E\Big[\prod_j e^{u_j N(t_j)}\Big]
    = \det\Big(I + \sum_j (s_j - 1) K_\alpha \chi_{(t_{j-1}, t_j)}\Big),
    \qquad s_j = e^{u_j + \dots + u_m},

is the determinant of the identity plus a piecewise-constant multiple of
the kernel, because a point in :math:`(t_{j-1}, t_j]` is counted by
:math:`N(t_j), \dots, N(t_m)`. The operator is discretised as
:math:`A_{ik} = \sqrt{w_i} K(t_i, t_k) \sqrt{w_k}` and the determinant of
:math:`I + \mathrm{diag}(c) A` is taken by partial-pivot LU.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, SpectrumError
from .kernels import KernelSpec, kernel_matrix, kernel_parts
from .quadrature import composite_grid

#: v-width of one Bessel panel; J_alpha(v) oscillates with period ~ 2 pi in v.
BESSEL_PANEL = 6.0
AIRY_PANEL = 30.0
DEFAULT_ORDER = 20
#: Stand-in for u = -inf when cross-checking against gap probabilities.
HARD_NEGATIVE_U = -40.0
SPECTRUM_SLACK = 1e-10


@dataclass(frozen=True)
class ExpMomentQuery:
    """Parameters ``(r, a, x, u)`` of an exponential moment ``E_alpha(r x, u)``."""

    r: float
    a: float
    x_vec: tuple
    u_vec: tuple
    alpha: float = field(init=False)
    s_vec: tuple = field(init=False)
    n_split: int = field(init=False)

    def __post_init__(self):
        x = tuple(float(v) for v in self.x_vec)
        u = tuple(float(v) for v in self.u_vec)
        if not self.r > 0:
            raise DomainError("r must be positive")
        if not self.a >= 0:
            raise DomainError("a must be non-negative")
        if len(x) == 0 or len(x) != len(u):
            raise DomainError("x_vec and u_vec must be non-empty and of equal length")
        if x[0] <= 0 or any(x1 <= x0 for x0, x1 in zip(x, x[1:])):
            raise DomainError("x_vec must be strictly increasing and positive")
        a2 = self.a * self.a
        if any(v == a2 for v in x):
            raise DomainError("x_j = a^2 lies on the regime boundary")
        tails = np.cumsum(np.asarray(u)[::-1])[::-1]
        n = next((j + 1 for j, v in enumerate(x) if v > a2), len(x) + 1)
        object.__setattr__(self, "x_vec", x)
        object.__setattr__(self, "u_vec", u)
        object.__setattr__(self, "alpha", self.a * math.sqrt(self.r))
        object.__setattr__(self, "s_vec", tuple(float(v) for v in np.exp(tails)))
        object.__setattr__(self, "n_split", n)

    @property
    def m(self):
        return len(self.x_vec)

    @classmethod
    def from_alpha(cls, alpha, t_vec, u_vec):
        """Query at unscaled points ``t`` with ``r = 1`` and ``a = alpha``."""
        return cls(1.0, float(alpha), tuple(t_vec), tuple(u_vec))


def bessel_grid(alpha, t_breaks, order, multipliers=None):
    return composite_grid(t_breaks, order, BESSEL_PANEL, sqrt_map=True, multipliers=multipliers)


def airy_grid(lo, hi, order, multipliers=None):
    return composite_grid([lo, hi], order, AIRY_PANEL, multipliers=multipliers)


def nystrom_matrix(spec, grid):
    """Symmetric discretisation ``sqrt(w_i) K(t_i, t_k) sqrt(w_k)``."""
    sw = np.sqrt(grid.weights)
    return sw[:, None] * kernel_matrix(spec, grid.nodes) * sw[None, :]


def check_spectrum(mat, slack=SPECTRUM_SLACK):
    """Eigenvalues of a symmetric Nyström matrix; must lie in [0, 1]."""
    lam = np.linalg.eigvalsh(mat)
    if lam[0] < -slack or lam[-1] > 1.0 + slack:
        raise SpectrumError(f"eigenvalues outside [0,1]: min={lam[0]:.3e}, max={lam[-1]:.3e}")
    return lam


def _logdet(mat_a, mult):
    m = np.eye(len(mult)) + mult[:, None] * mat_a
    sign, val = np.linalg.slogdet(m)
    if sign <= 0:
        raise ConvergenceError("Fredholm determinant is not positive; discretisation failed")
    return float(val)


def _refine(compute, order, tol, what):
    value = compute(order)
    if tol is None:
        return value
    finer = compute(2 * order)
    change = abs(finer - value)
    if change > tol:
        raise ConvergenceError(
            f"{what}: doubling order {order} changed the result by {change:.3e} > {tol:.1e}",
            value=finer,
            change=change,
        )
    return finer


def log_exp_moment(q, order=DEFAULT_ORDER, tol=None):
    """``log E_alpha(r x, u)`` for the Bessel process.

    With ``tol`` given the computation is repeated at ``2*order`` and a
    :class:`ConvergenceError` is raised if the two differ by more than
    ``tol``; otherwise the finer value is returned.
    """
    if order < 8:
        raise ValueError("order must be at least 8")
    if all(u == 0.0 for u in q.u_vec):
        return 0.0
    spec = KernelSpec.bessel(q.alpha)
    breaks = [0.0] + [q.r * x for x in q.x_vec]
    mult = np.asarray(q.s_vec) - 1.0

    def compute(n):
        grid = bessel_grid(q.alpha, breaks, n, mult)
        return _logdet(nystrom_matrix(spec, grid), grid.node_multipliers())

    return _refine(compute, order, tol, "log_exp_moment")


def gap_probability(alpha, s, order=DEFAULT_ORDER, tol=None):
    """P[no Bessel point in [0, s]] = det(I - K chi_[0,s])."""
    if not s > 0:
        raise DomainError("gap interval length must be positive")
    spec = KernelSpec.bessel(alpha)

    def compute(n):
        grid = bessel_grid(alpha, [0.0, s], n, [-1.0])
        return math.exp(_logdet(nystrom_matrix(spec, grid), grid.node_multipliers()))

    return _refine(compute, order, tol, "gap_probability")


def soft_edge_point(alpha, y):
    """``alpha^2 + 2^{2/3} alpha^{4/3} y``: where Bessel gaps approach Airy gaps at ``y``."""
    return alpha * alpha + 2.0 ** (2.0 / 3.0) * alpha ** (4.0 / 3.0) * y


def airy_truncation(y):
    return max(8.0, -y + 12.0)


def airy_gap_probability(y, order=60, tol=None, truncation_tol=1e-9, check_truncation=False):
    """P[no Airy point in [-y, inf)], truncated to ``[-y, T]``.

    ``T = max(8, 12 - y)``. With ``check_truncation`` the window is stretched
    by half its length and a :class:`ConvergenceError` is raised if the value
    moves by more than ``truncation_tol``.
    """
    spec = KernelSpec.airy()
    lo = -float(y)

    def at(hi, n):
        grid = airy_grid(lo, hi, n, [-1.0])
        return math.exp(_logdet(nystrom_matrix(spec, grid), grid.node_multipliers()))

    hi = airy_truncation(y)
    value = _refine(lambda n: at(hi, n), order, tol, "airy_gap_probability")
    if check_truncation:
        wider = at(lo + 1.5 * (hi - lo), order)
        if abs(wider - value) > truncation_tol:
            raise ConvergenceError(
                f"Airy gap sensitive to truncation: change {abs(wider - value):.3e}",
                value=wider,
                change=abs(wider - value),
            )
    return value


def counting_mean(alpha, x_end, order=DEFAULT_ORDER, tol=None):
    """E[N(x_end)] = integral of K(t,t) over [0, x_end]."""
    if x_end < 0:
        raise DomainError("x_end must be non-negative")
    if x_end == 0:
        return 0.0
    spec = KernelSpec.bessel(alpha)

    def compute(n):
        grid = bessel_grid(alpha, [0.0, x_end], n)
        return float(np.dot(grid.weights, kernel_parts(spec, grid.nodes)[2]))

    return _refine(compute, order, tol, "counting_mean")


def counting_var(alpha, x_end, order=DEFAULT_ORDER, tol=None):
    """Var[N(x_end)] = tr(A) - ||A||_F^2 on the window [0, x_end]."""
    if x_end < 0:
        raise DomainError("x_end must be non-negative")
    if x_end == 0:
        return 0.0
    spec = KernelSpec.bessel(alpha)

    def compute(n):
        a = nystrom_matrix(spec, bessel_grid(alpha, [0.0, x_end], n))
        return float(np.trace(a) - np.sum(a * a))

    return _refine(compute, order, tol, "counting_var")


def counting_cov(alpha, x1, x2, order=DEFAULT_ORDER, tol=None):
    """Cov[N(x1), N(x2)] for 0 < x1 <= x2."""
    if not 0 < x1 <= x2:
        raise DomainError("counting_cov needs 0 < x1 <= x2")
    if x1 == x2:
        return counting_var(alpha, x1, order, tol)
    spec = KernelSpec.bessel(alpha)

    def compute(n):
        grid = bessel_grid(alpha, [0.0, x1, x2], n)
        a = nystrom_matrix(spec, grid)
        inner = grid.mask(0)
        return float(np.trace(a[np.ix_(inner, inner)]) - np.sum(a[inner, :] ** 2))

    return _refine(compute, order, tol, "counting_cov")
