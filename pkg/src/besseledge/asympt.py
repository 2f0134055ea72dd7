r"""Closed-form large-:math:`r` predictions for the large-:math:`\alpha` Bessel process.

Coordinates: the process is observed at :math:`r x` with :math:`\alpha = a\sqrt r`.
Functions taking an :class:`EdgeParams` and a scaled point ``x`` return the
statistic at the unscaled point :math:`r x`.

The mean has the closed form

.. math::
    \mu_\alpha(rx) = \frac{\sqrt r}{\pi}\Big(w - a\arctan\frac{w}{a}\Big),
    \qquad w = \sqrt{x - a^2},

which is what :func:`mu_alpha` evaluates (the arctan term is 0 at ``a = 0``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import DomainError, RegimeError
from .fredholm import ExpMomentQuery
from .specfun import EULER_GAMMA, barnes_pair_ln

TWO_PI2 = 2.0 * math.pi**2
#: Constant added to the variance of N: (1 + gamma_E) / (2 pi^2).
VARIANCE_CONSTANT = (1.0 + EULER_GAMMA) / TWO_PI2


class Regime(enum.Enum):
    LARGE_A = "1"
    SMALL_A = "2"
    NEAR_EDGE = "3"
    BOUNDED_ALPHA = "bounded"
    AIRY = "airy"

    @classmethod
    def parse(cls, text):
        for member in cls:
            if str(text).lower() in (member.value, member.name.lower()):
                return member
        raise ValueError(f"unknown regime {text!r}")


@dataclass(frozen=True)
class EdgeParams:
    r: float
    a: float
    alpha: float = field(init=False)
    gamma_euler: float = EULER_GAMMA

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("r must be positive")
        if not self.a >= 0:
            raise DomainError("a must be non-negative")
        object.__setattr__(self, "alpha", self.a * math.sqrt(self.r))


@dataclass(frozen=True)
class AsymptPrediction:
    """An asymptotic value and the size of its error term.

    ``error_order`` is the symbolic tag; ``error_scale`` is that tag evaluated
    at the query (the implied constant is unknown).
    """

    value: float
    regime: Regime
    error_order: str
    error_scale: float
    blocks: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Means, variances, covariances
# ---------------------------------------------------------------------------


def _mu_core(a, x):
    w = math.sqrt(x - a * a)
    return w - (a * math.atan(w / a) if a > 0 else 0.0)


def mu_alpha(p, x):
    """Mean number of points below ``r x`` to leading orders, for ``x >= a^2``."""
    if x < p.a * p.a:
        raise DomainError(f"mu_alpha needs x >= a^2 (x={x}, a={p.a})")
    return math.sqrt(p.r) / math.pi * _mu_core(p.a, x)


def mu_unscaled(alpha, xi):
    """``mu_alpha`` at the unscaled point ``xi >= alpha^2``."""
    if xi < alpha * alpha:
        raise DomainError("mu needs xi >= alpha^2")
    return _mu_core(alpha, xi) / math.pi


def mu_alpha_derivative(alpha, xi):
    """d mu / d xi at the unscaled point ``xi``."""
    return math.sqrt(max(xi - alpha * alpha, 0.0)) / (2.0 * math.pi * xi)


def sigma2_alpha(p, x):
    """Variance scale ``log r/(4 pi^2) + log(4 (x-a^2)^{3/2} / x)/(2 pi^2)``."""
    if x <= p.a * p.a:
        raise DomainError("sigma2_alpha needs x > a^2")
    return math.log(p.r) / (4.0 * math.pi**2) + math.log(4.0 * (x - p.a * p.a) ** 1.5 / x) / TWO_PI2


def sigma2_unscaled(alpha, xi):
    """``log(4 (xi - alpha^2)^{3/2} / xi) / (2 pi^2)`` at the unscaled point."""
    if xi <= alpha * alpha:
        raise DomainError("sigma2 needs xi > alpha^2")
    return math.log(4.0 * (xi - alpha * alpha) ** 1.5 / xi) / TWO_PI2


def cov_sigma_a(a, xj, xk):
    """Covariance kernel of the counting function between two points above ``a^2``."""
    a2 = a * a
    if xj <= a2 or xk <= a2:
        raise DomainError("cov_sigma_a needs both points above a^2")
    if xj == xk:
        raise DomainError("cov_sigma_a diverges for equal points")
    sj, sk = math.sqrt(xj - a2), math.sqrt(xk - a2)
    return math.log((sj + sk) / abs(sj - sk)) / TWO_PI2


def mu_tilde(p, x):
    """Bounded-order mean ``sqrt(r x)/pi - alpha/2``."""
    return math.sqrt(p.r * x) / math.pi - 0.5 * p.alpha


def sigma2_tilde(p, x):
    return math.log(4.0 * math.sqrt(p.r * x)) / TWO_PI2


def cov_sigma_tilde(xj, xk):
    return cov_sigma_a(0.0, xj, xk)


def mu_airy(y):
    if y < 0:
        raise DomainError("mu_airy needs y >= 0")
    return 2.0 / (3.0 * math.pi) * y**1.5


def sigma2_airy(y):
    if y <= 0:
        raise DomainError("sigma2_airy needs y > 0")
    return 3.0 / (4.0 * math.pi**2) * math.log(4.0 * y)


def cov_sigma_airy(yj, yk):
    return cov_sigma_a(0.0, yj, yk)


def mu_alpha_inverse(p, k):
    """Unscaled point ``xi >= alpha^2`` with ``mu(xi) = k``."""
    return mu_inverse_unscaled(p.alpha, k)


def mu_inverse_unscaled(alpha, k):
    if k < 0:
        raise DomainError("mu inverse needs k >= 0")
    a2 = alpha * alpha
    if k == 0:
        return a2
    # mu in terms of w = sqrt(xi - alpha^2) is h(w) = (w - alpha atan(w/alpha))/pi,
    # increasing with h'(w) = w^2 / (pi (w^2 + alpha^2)); bracket then Newton.
    target = math.pi * k

    def h(w):
        return w - (alpha * math.atan(w / alpha) if alpha > 0 else 0.0) - target

    lo, hi = 0.0, target + 0.5 * math.pi * alpha + 1.0
    while h(hi) < 0:
        hi *= 2.0
    w = 0.5 * (lo + hi)
    for _ in range(200):
        fw = h(w)
        if fw > 0:
            hi = w
        else:
            lo = w
        if fw == 0.0:
            break
        dw = (w * w + alpha * alpha) / (w * w) if w > 0 else math.inf
        step = fw * dw
        cand = w - step
        if abs(step) <= 4e-16 * max(w, 1.0):
            w = cand if lo <= cand <= hi else w
            break
        w = cand if lo < cand < hi else 0.5 * (lo + hi)
        if hi - lo <= 4e-16 * max(hi, 1.0):
            break
    return a2 + w * w


# ---------------------------------------------------------------------------
# Exponential-moment predictions
# ---------------------------------------------------------------------------


def _block_sum(u, mean, var, cov):
    """Sum the four blocks over the active indices."""
    m = len(u)
    b_mean = sum(u[j] * mean[j] for j in range(m))
    b_var = sum(0.5 * u[j] ** 2 * var[j] for j in range(m))
    b_cov = sum(u[j] * u[k] * cov(j, k) for j in range(m) for k in range(j + 1, m))
    b_barnes = sum(barnes_pair_ln(uj) for uj in u)
    blocks = {"mean": b_mean, "variance": b_var, "covariance": b_cov, "barnes": b_barnes}
    return b_mean + b_var + b_cov + b_barnes, blocks


def _error_scale_default(r):
    return math.log(r) / math.sqrt(r)


def log_exp_moment_asympt(q, regime):
    """Asymptotic ``log E_alpha(r x, u)`` in a caller-chosen regime.

    Only the points above ``a^2`` contribute; with none of them the
    prediction is 0.
    """
    regime = Regime.parse(regime.value if isinstance(regime, Regime) else regime)
    if regime not in (Regime.LARGE_A, Regime.SMALL_A, Regime.NEAR_EDGE):
        raise RegimeError(f"log_exp_moment_asympt covers regimes 1-3, got {regime}")
    a, r = q.a, q.r
    if a <= 0:
        raise RegimeError("regimes 1-3 need a > 0")
    if regime is Regime.SMALL_A and not a < q.x_vec[0]:
        raise RegimeError("regime 2 needs a < x_1")
    if regime is Regime.NEAR_EDGE and not a * a < q.x_vec[0]:
        raise RegimeError("regime 3 needs a^2 < x_1")
    p = EdgeParams(r, a)
    start = q.n_split - 1
    xs = q.x_vec[start:]
    us = q.u_vec[start:]
    if regime is Regime.NEAR_EDGE:
        gap = q.x_vec[-1] - a * a
        tag, scale = "log r/(|x_m-a^2|^4 sqrt r)", math.log(r) / (gap**4 * math.sqrt(r))
    else:
        tag, scale = "log r/sqrt r", _error_scale_default(r)
    if not xs:
        return AsymptPrediction(0.0, regime, tag, scale, {"mean": 0.0, "variance": 0.0, "covariance": 0.0, "barnes": 0.0})
    value, blocks = _block_sum(
        us,
        [mu_alpha(p, x) for x in xs],
        [sigma2_alpha(p, x) for x in xs],
        lambda j, k: cov_sigma_a(a, xs[j], xs[k]),
    )
    return AsymptPrediction(value, regime, tag, scale, blocks)


def log_exp_moment_bounded_alpha(q):
    """Prediction with the bounded-order mean, variance and covariance."""
    a, r = q.a, q.r
    if not a < q.x_vec[0]:
        raise RegimeError("bounded-alpha matching needs a < x_1")
    p = EdgeParams(r, a)
    value, blocks = _block_sum(
        q.u_vec,
        [mu_tilde(p, x) for x in q.x_vec],
        [sigma2_tilde(p, x) for x in q.x_vec],
        lambda j, k: cov_sigma_tilde(q.x_vec[j], q.x_vec[k]),
    )
    scale = _error_scale_default(r) + a * a * math.sqrt(r)
    return AsymptPrediction(value, Regime.BOUNDED_ALPHA, "log r/sqrt r + a^2 sqrt r", scale, blocks)


def airy_moment_forms(y_vec, u_vec, r_ai):
    """Soft-edge prediction for ``log E_Ai(r_ai y, u)``."""
    y = [float(v) for v in y_vec]
    u = [float(v) for v in u_vec]
    if len(y) != len(u) or not y:
        raise DomainError("y_vec and u_vec must be non-empty and of equal length")
    if y[0] <= 0 or any(b <= c for c, b in zip(y, y[1:])):
        raise DomainError("y_vec must be strictly increasing and positive")
    value, blocks = _block_sum(
        u,
        [mu_airy(r_ai * v) for v in y],
        [sigma2_airy(r_ai * v) for v in y],
        lambda j, k: cov_sigma_airy(y[j], y[k]),
    )
    return AsymptPrediction(value, Regime.AIRY, "log r_Ai / r_Ai^{3/2}", math.log(r_ai) / r_ai**1.5, blocks)


def airy_scaled_points(a, y_vec, r, r_ai):
    """``x_j = a^2 + 2^{2/3} a^{4/3} r_ai y_j / r^{1/3}``."""
    c = 2.0 ** (2.0 / 3.0) * a ** (4.0 / 3.0) * r_ai / r ** (1.0 / 3.0)
    return tuple(a * a + c * y for y in y_vec)


@dataclass(frozen=True)
class AiryMatchingReport:
    x_vec: tuple
    bessel: AsymptPrediction
    airy: AsymptPrediction
    mean_rel_diff: tuple
    var_diff: tuple
    cov_diff: tuple
    mean_rel_tag: float
    error_tag: float
    sandwich: tuple


def airy_matching_check(a, y_vec, u_vec, r, r_ai, m_r=1.0):
    """Compare the near-edge Bessel prediction with the Airy one.

    The points are ``x_j = a^2 + 2^{2/3} a^{4/3} r_ai y_j / r^{1/3}``. The
    report carries componentwise differences of means (relative),
    variances and covariances, and the two error tags
    ``r_ai / r^{1/3}`` and ``r^{5/6} log r / r_ai^4``.

    Raises
    ------
    RegimeError
        If ``m_r r^{5/24} (log r)^{1/4} <= r_ai <= r^{1/3} / m_r`` fails.
    """
    low = m_r * r ** (5.0 / 24.0) * math.log(r) ** 0.25
    high = r ** (1.0 / 3.0) / m_r
    if not low <= r_ai <= high:
        raise RegimeError(f"r_ai={r_ai} violates the window [{low:.4g}, {high:.4g}]")
    xs = airy_scaled_points(a, y_vec, r, r_ai)
    q = ExpMomentQuery(r, a, xs, tuple(u_vec))
    bes = log_exp_moment_asympt(q, Regime.NEAR_EDGE)
    ai = airy_moment_forms(y_vec, u_vec, r_ai)
    p = EdgeParams(r, a)
    mean_rel = tuple(mu_alpha(p, x) / mu_airy(r_ai * y) - 1.0 for x, y in zip(xs, y_vec))
    var_d = tuple(sigma2_alpha(p, x) - sigma2_airy(r_ai * y) for x, y in zip(xs, y_vec))
    m = len(xs)
    cov_d = tuple(
        cov_sigma_a(a, xs[j], xs[k]) - cov_sigma_airy(y_vec[j], y_vec[k]) for j in range(m) for k in range(j + 1, m)
    )
    return AiryMatchingReport(
        xs,
        bes,
        ai,
        mean_rel,
        var_d,
        cov_d,
        r_ai / r ** (1.0 / 3.0),
        r ** (5.0 / 6.0) * math.log(r) / r_ai**4,
        (low, high),
    )
