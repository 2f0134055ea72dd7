r"""Special functions needed by the Bessel and Airy kernels.

Contents
--------
* ``gamma_ln``, ``barnes_g_ln``, ``barnes_pair_ln``: log-Gamma and the Barnes
  G-function, the latter through the functional equation
  :math:`G(z+1) = \Gamma(z) G(z)` and a fixed large-argument series.
* ``jv``, ``jv_jvp``, ``bessel_j``: Bessel functions of the first kind for
  real order :math:`\nu > -1` by power series or Miller backward recurrence.
* ``bessel_j_debye``: large-order Debye expansion of :math:`J_\nu`, for
  cross-checks away from the turning point.
* ``bessel_ik_uniform``: large-order uniform expansions of
  :math:`I_\alpha(\alpha z)`, :math:`K_\alpha(\alpha z)` and their
  derivatives in terms of :math:`p(z)` and :math:`\xi(z)`.
* ``airy_ai``: Ai and Ai'.

All routines are pure functions of their arguments.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special as sc

from .errors import DomainError, ValidityError

EPS = np.finfo(float).eps

#: Euler's constant, 20 digits.
EULER_GAMMA = 0.57721566490153286061

#: zeta'(-1) = 1/12 - log(Glaisher's constant).
ZETA_PRIME_M1 = -0.16542114370045092921

LOG_2PI = math.log(2.0 * math.pi)

# Coefficients B_{2k+2} / (4 k (k+1)), k = 1..6, of the large-z series
#   log G(1+z) = z^2/2 log z - 3 z^2/4 + z/2 log(2 pi) - log(z)/12
#                + zeta'(-1) + sum_k c_k z^{-2k}.
# B_4 = -1/30, B_6 = 1/42, B_8 = -1/30, B_10 = 5/66, B_12 = -691/2730, B_14 = 7/6.
_BARNES_SERIES = (
    -1.0 / 240.0,
    1.0 / 1008.0,
    -1.0 / 1440.0,
    1.0 / 1056.0,
    -691.0 / 327600.0,
    1.0 / 144.0,
)
_BARNES_SHIFT_TO = 11.0
#: Below this t = |u|/2pi the pair is summed from its Taylor series (no cancellation).
_PAIR_SERIES_RADIUS = 0.5


@dataclass(frozen=True)
class SpecialValue:
    """A function value with a conservative absolute error estimate."""

    value: float
    abs_err_est: float

    def __float__(self):
        return float(self.value)


class UniformAsymptParams(NamedTuple):
    """Olver variables ``p(z) = 1/sqrt(1+z^2)`` and ``xi(z)``."""

    z: float
    p_val: float
    xi_val: float


class UniformIK(NamedTuple):
    r"""Result of :func:`bessel_ik_uniform`.

    The ``*_scaled`` fields strip the exponential factor
    :math:`e^{\pm\alpha\xi(z)}`; ``log_scale`` is :math:`\alpha\xi(z)`. The
    unscaled properties overflow for large :math:`\alpha z`.
    """

    i_scaled: float
    k_scaled: float
    ip_scaled: float
    kp_scaled: float
    log_scale: float
    abs_rel_err_est: float

    @property
    def I_val(self):
        return self.i_scaled * math.exp(self.log_scale)

    @property
    def K_val(self):
        return self.k_scaled * math.exp(-self.log_scale)

    @property
    def Ip_val(self):
        return self.ip_scaled * math.exp(self.log_scale)

    @property
    def Kp_val(self):
        return self.kp_scaled * math.exp(-self.log_scale)


# ---------------------------------------------------------------------------
# Gamma and Barnes G
# ---------------------------------------------------------------------------


def gamma_ln(x):
    """Return log Gamma(x) for real x > 0."""
    if not x > 0:
        raise DomainError(f"gamma_ln requires x > 0, got {x!r}")
    v = math.lgamma(x)
    return SpecialValue(v, 4.0 * EPS * abs(v) + 1e-16)


def _log_barnes_large(z):
    """log G(1+z) from the asymptotic series; z real or complex, |z| >= 7."""
    logz = np.log(z)
    s = 0.5 * z * z * logz - 0.75 * z * z + 0.5 * z * LOG_2PI - logz / 12.0 + ZETA_PRIME_M1
    zinv2 = 1.0 / (z * z)
    term = 1.0
    for c in _BARNES_SERIES:
        term = term * zinv2
        s = s + c * term
    return s


def _log_barnes(z):
    # Push z right until Re z >= 11, then undo with log G(z) = log G(z+n) - sum log Gamma(z+k).
    shift = max(0, math.ceil(_BARNES_SHIFT_TO - np.real(z)))
    acc = 0.0
    for k in range(shift):
        acc = acc + sc.loggamma(z + k)
    return _log_barnes_large(z + shift - 1) - acc


def barnes_g_ln(x):
    """Return log G(x) for real x > 0, where G is Barnes' G-function."""
    if not x > 0:
        raise DomainError(f"barnes_g_ln requires x > 0, got {x!r}")
    v = float(np.real(_log_barnes(float(x))))
    return SpecialValue(v, 1e-13 * (abs(v) + 1.0))


def barnes_pair_ln(u):
    r"""Return :math:`\log[G(1+u/2\pi i)\,G(1-u/2\pi i)]` (a real number).

    With :math:`t = u/2\pi` the pair is :math:`G(1-it)G(1+it)`, whose
    logarithm is :math:`2\,\mathrm{Re}\log G(1+it)`.
    """
    u = float(u)
    if not math.isfinite(u):
        raise DomainError("barnes_pair_ln requires finite u")
    if u == 0.0:
        return 0.0
    t = abs(u) / (2.0 * math.pi)
    if t < _PAIR_SERIES_RADIUS:
        return _barnes_pair_series(t)
    return 2.0 * float(np.real(_log_barnes(complex(1.0, t))))


def _barnes_pair_series(t):
    # Maclaurin series of log G(1+z) at z = +-it; odd powers cancel in the pair:
    # (1 + gamma) t^2 + 2 sum_{j>=2} (-1)^(j+1) zeta(2j-1) t^(2j) / (2j)
    total = (1.0 + EULER_GAMMA) * t * t
    t2 = t * t
    power = t2
    for j in range(2, 80):
        power *= t2
        term = 2.0 * sc.zeta(2 * j - 1) * power / (2 * j)
        total += term if j % 2 else -term
        if term < 1e-18 * total:
            break
    return total


# ---------------------------------------------------------------------------
# Bessel J
# ---------------------------------------------------------------------------


def _jv_series(nu, x):
    # sum_k (-1)^k (x/2)^{2k+nu} / (k! Gamma(nu+k+1)); caller keeps x^2 <= 8(nu+1)
    x = np.asarray(x, dtype=float)
    q = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 200):
        term = term * q / (k * (nu + k))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.exp(nu * np.log(0.5 * x) - math.lgamma(nu + 1.0))
    if nu == 0.0:
        lead = np.ones_like(x)
    return lead * total


def _miller_start(n, xmax):
    return int(n + 2 + max(xmax, 1.0) + 12.0 * max(xmax, 1.0) ** (1.0 / 3.0) + 30)


def _jv_pair_miller(nu, x):
    """Return (J_nu(x), J_{nu+1}(x)) by backward recurrence; x > 0 array."""
    x = np.asarray(x, dtype=float)
    n = int(math.floor(nu)) if nu >= 0 else 0
    nu0 = nu - n
    top = _miller_start(n, float(np.max(x)))
    big, small = 1e250, 1e-250

    f_next = np.zeros_like(x)  # f_{k+1}
    f_cur = np.full_like(x, 1e-30)  # f_k with k = top
    norm = np.zeros_like(x)
    keep_n = np.zeros_like(x)
    keep_n1 = np.zeros_like(x)

    # g_k = Gamma(nu0 + k)/k!, coefficient of f_{2k} in the Neumann sum is (nu0 + 2k) g_k.
    g = np.empty(top // 2 + 2)
    g[1] = math.gamma(nu0 + 1.0)
    for j in range(2, len(g)):
        g[j] = g[j - 1] * (nu0 + j - 1) / j

    for k in range(top, -1, -1):
        if k == n + 1:
            keep_n1 = f_cur.copy()
        if k == n:
            keep_n = f_cur.copy()
        if k % 2 == 0:
            j = k // 2
            coef = math.gamma(nu0 + 1.0) if j == 0 else (nu0 + 2 * j) * g[j]
            norm = norm + coef * f_cur
        if k > 0:
            f_prev = (2.0 * (nu0 + k) / x) * f_cur - f_next
            f_next, f_cur = f_cur, f_prev
            over = np.abs(f_cur) > big
            if np.any(over):
                f_cur = np.where(over, f_cur * small, f_cur)
                f_next = np.where(over, f_next * small, f_next)
                norm = np.where(over, norm * small, norm)
                keep_n = np.where(over, keep_n * small, keep_n)
                keep_n1 = np.where(over, keep_n1 * small, keep_n1)
    scale = np.power(0.5 * x, nu0) / norm
    return keep_n * scale, keep_n1 * scale


def jv_pair(nu, x):
    """Vectorised (J_nu(x), J_{nu+1}(x)) for nu > -1 and x >= 0."""
    if not nu > -1.0:
        raise DomainError(f"order must exceed -1, got {nu!r}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("Bessel J requires finite x >= 0")
    shape = x.shape
    x = x.ravel()
    j0 = np.empty_like(x)
    j1 = np.empty_like(x)
    use_series = x * x <= 8.0 * (nu + 1.0)
    if np.any(use_series):
        xs = x[use_series]
        j0[use_series] = _jv_series(nu, xs)
        j1[use_series] = _jv_series(nu + 1.0, xs)
    rest = ~use_series
    if np.any(rest):
        j0[rest], j1[rest] = _jv_pair_miller(nu, x[rest])
    return j0.reshape(shape), j1.reshape(shape)


def jv(nu, x):
    """Vectorised J_nu(x)."""
    return jv_pair(nu, x)[0]


def jv_jvp(nu, x):
    """Vectorised (J_nu(x), J_nu'(x)); x must be > 0 where nu < 1."""
    j0, j1 = jv_pair(nu, x)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        jp = (nu / x) * j0 - j1
    if nu == 0.0:
        jp = -j1
    elif nu == 1.0:
        jp = np.where(x == 0.0, 0.5, jp)
    elif nu > 1.0:
        jp = np.where(x == 0.0, 0.0, jp)
    return j0, jp


def bessel_j(nu, x):
    """Return J_nu(x) for nu >= 0, x >= 0 with an absolute error estimate."""
    if x < 0:
        raise DomainError(f"bessel_j requires x >= 0, got {x!r}")
    if nu < 0:
        raise DomainError(f"bessel_j requires nu >= 0, got {nu!r}")
    v = float(jv(nu, np.array([x]))[0])
    if x > nu:
        envelope = math.sqrt(2.0 / (math.pi * max(x, 1.0)))
    else:
        envelope = abs(v)
    return SpecialValue(v, 1e-13 * max(abs(v), envelope) + 1e-300)


# ---------------------------------------------------------------------------
# Debye polynomials and large-order expansions
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def debye_u(k):
    """Debye polynomial u_k(t) as a numpy Polynomial."""
    if k == 0:
        return Polynomial([1.0])
    prev = debye_u(k - 1)
    t = Polynomial([0.0, 1.0])
    integrand = Polynomial([1.0, 0.0, -5.0]) * prev
    return 0.5 * t**2 * (1 - t**2) * prev.deriv() + 0.125 * integrand.integ()


@functools.lru_cache(maxsize=None)
def debye_v(k):
    """Polynomial v_k(t) of the derivative expansions."""
    if k == 0:
        return Polynomial([1.0])
    t = Polynomial([0.0, 1.0])
    prev = debye_u(k - 1)
    return debye_u(k) + t * (t**2 - 1) * (0.5 * prev + t * prev.deriv())


def uniform_params(z):
    """p(z) and xi(z) for real z > 0."""
    if not z > 0:
        raise DomainError(f"uniform parameters need z > 0, got {z!r}")
    root = math.hypot(1.0, z)
    p = 1.0 / root
    # log(z/(1+root)) written as -asinh(1/z) to avoid cancellation for large z
    xi = root - math.asinh(1.0 / z)
    return UniformAsymptParams(z, p, xi)


def bessel_ik_uniform(alpha, z, n_terms=2):
    r"""Uniform large-order approximations of I, K, I', K' at :math:`\alpha z`.

    With ``n_terms=2`` this is the two-term form with corrections
    :math:`\pm(3p-5p^3)/(24\alpha)` and :math:`\mp(9p-7p^3)/(24\alpha)`;
    larger ``n_terms`` append further Debye terms.

    Raises
    ------
    ValidityError
        If ``alpha < 20`` or ``alpha * z < 50``.
    """
    if not (alpha >= 20.0 and alpha * z >= 50.0):
        raise ValidityError(
            f"outside asymptotic validity: need alpha >= 20 and alpha*z >= 50 (alpha={alpha}, z={z})"
        )
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    params = uniform_params(z)
    p = params.p_val
    s_i = s_k = s_ip = s_kp = 0.0
    power = 1.0
    last = 0.0
    for k in range(n_terms):
        uk = float(debye_u(k)(p)) / power
        vk = float(debye_v(k)(p)) / power
        sign = -1.0 if k % 2 else 1.0
        s_i += uk
        s_k += sign * uk
        s_ip += vk
        s_kp += sign * vk
        power *= alpha
    last = max(abs(float(debye_u(n_terms)(p))), abs(float(debye_v(n_terms)(p)))) / power
    quarter = (1.0 + z * z) ** 0.25
    pre_i = 1.0 / (math.sqrt(2.0 * math.pi * alpha) * quarter)
    pre_k = math.sqrt(math.pi / (2.0 * alpha)) / quarter
    pre_ip = quarter / (math.sqrt(2.0 * math.pi * alpha) * z)
    pre_kp = -math.sqrt(math.pi / (2.0 * alpha)) * quarter / z
    return UniformIK(
        pre_i * s_i,
        pre_k * s_k,
        pre_ip * s_ip,
        pre_kp * s_kp,
        alpha * params.xi_val,
        2.0 * last + 4.0 * EPS * alpha * params.xi_val,
    )


def bessel_j_debye(nu, x, n_terms=6):
    r"""Debye expansion of :math:`J_\nu(x)` for large order.

    Valid for ``nu >= 50`` away from the turning point; the caller gets a
    :class:`ValidityError` when :math:`|x-\nu| < 4\nu^{1/3}`. The error
    estimate is the size of the first omitted term.
    """
    if nu < 50:
        raise ValidityError(f"Debye expansion needs nu >= 50, got {nu}")
    if x <= 0:
        raise DomainError("bessel_j_debye needs x > 0")
    if abs(x - nu) < 4.0 * nu ** (1.0 / 3.0):
        raise ValidityError("x is inside the turning-point zone of the Debye expansion")
    if x < nu:
        # x = nu sech(beta)
        beta = math.acosh(nu / x)
        th = math.tanh(beta)
        t = 1.0 / th
        total = 0.0
        for k in range(n_terms):
            total += float(debye_u(k)(t)) / nu**k
        omitted = abs(float(debye_u(n_terms)(t))) / nu**n_terms
        lead = math.exp(nu * (th - beta)) / math.sqrt(2.0 * math.pi * nu * th)
        return SpecialValue(lead * total, lead * omitted + EPS * abs(lead * total))
    # x = nu sec(beta)
    beta = math.acos(nu / x)
    tb = math.tan(beta)
    it = 1j / tb
    even = odd = 0.0
    for k in range(n_terms):
        term = complex(debye_u(k)(it)) / nu**k
        if k % 2 == 0:
            even += term.real
        else:
            odd += (-1j * term).real
    omitted = abs(complex(debye_u(n_terms)(it))) / nu**n_terms
    phase = nu * (tb - beta) - math.pi / 4.0
    amp = math.sqrt(2.0 / (math.pi * nu * tb))
    # -i sin(phase) * odd_complex = sin(phase) * (-i * odd_complex); odd was stored as (-i*u_k).real
    value = amp * (math.cos(phase) * even + math.sin(phase) * odd)
    return SpecialValue(value, amp * omitted + EPS * amp)


# ---------------------------------------------------------------------------
# Airy
# ---------------------------------------------------------------------------


def airy_ai(x):
    """Return (Ai(x), Ai'(x)); vectorised over array input."""
    ai, aip, _, _ = sc.airy(x)
    return ai, aip
