r"""Exact sampling of the Bessel process on a window and Monte-Carlo checks.

Sampling follows the spectral algorithm of Hough, Krishnapur, Peres and
Virág. The kernel restricted to ``[0, R]`` is discretised on a Nyström grid
and diagonalised, each eigenfunction is kept with probability equal to its
eigenvalue, and the resulting projection process is sampled one point at a
time. Eigenfunctions are extended off the grid by the Nyström formula

.. math::
    \phi_k(t) = \frac{1}{\lambda_k}\sum_j K(t, t_j)\sqrt{w_j}\,V_{jk},

tabulated on a fine uniform grid in :math:`v = \sqrt t` and interpolated
linearly in between. Each point is drawn by inverting the CDF of the
piecewise-linear conditional density.

Restricting a determinantal process to a window gives the determinantal
process of the restricted kernel, so counts below ``R`` are unbiased.

Every trial owns a Philox counter-based stream keyed by ``(seed, trial)``,
so results do not depend on how trials are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import asympt
from .errors import DomainError, RegimeError, SpectrumError
from .fredholm import DEFAULT_ORDER, bessel_grid, nystrom_matrix
from .kernels import KernelSpec, kernel_matrix

SPECTRUM_SLACK = 1e-8
FINE_STEP = 0.05
EIG_CUTOFF = 1e-12
MAX_DISCARD_RATE = 0.01


def trial_rng(seed, trial):
    """Philox stream for one trial, keyed by ``(seed, trial)``."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class PointSample:
    points: np.ndarray
    seed: int
    window_end: float

    def count_below(self, t):
        return int(np.searchsorted(self.points, t, side="right"))

    def __len__(self):
        return len(self.points)


class BesselSampler:
    """Spectral sampler for the Bessel process restricted to ``[0, R]``.

    Construction does all the linear algebra; :meth:`draw` is cheap.
    """

    def __init__(self, alpha, R, order=DEFAULT_ORDER, fine_step=FINE_STEP):
        if not R > 0:
            raise DomainError("window end R must be positive")
        self.alpha = float(alpha)
        self.R = float(R)
        self.order = order
        spec = KernelSpec.bessel(alpha)
        grid = bessel_grid(alpha, [0.0, R], order)
        a = nystrom_matrix(spec, grid)
        lam, vec = np.linalg.eigh(a)
        if lam[0] < -SPECTRUM_SLACK or lam[-1] > 1.0 + SPECTRUM_SLACK:
            raise SpectrumError(f"Nyström eigenvalues outside [0,1]: [{lam[0]:.3e}, {lam[-1]:.3e}]")
        keep = lam > EIG_CUTOFF
        self.eigenvalues = np.clip(lam[keep], 0.0, 1.0)
        vec = vec[:, keep]

        vmax = math.sqrt(R)
        n_fine = max(2, int(math.ceil(vmax / fine_step))) + 1
        v = np.linspace(0.0, vmax, n_fine)
        kf = kernel_matrix(spec, v * v, grid.nodes)
        phi = (kf * np.sqrt(grid.weights)[None, :]) @ vec / lam[keep][None, :]
        psi = phi * np.sqrt(2.0 * v)[:, None]
        # drop the leading stretch where no eigenfunction carries mass
        mass = (psi * psi) @ self.eigenvalues
        live = np.nonzero(mass > 1e-300)[0]
        start = max(0, live[0] - 1) if len(live) else 0
        self.v = v[start:]
        self.psi = np.ascontiguousarray(psi[start:])

    @property
    def expected_count(self):
        return float(np.sum(self.eigenvalues))

    def _draw_v(self, rng):
        chosen = rng.random(len(self.eigenvalues)) < self.eigenvalues
        y = self.psi[:, chosen].copy()
        k = y.shape[1]
        out = np.empty(k)
        v = self.v
        h = np.diff(v)
        for i in range(k):
            dens = np.einsum("ij,ij->i", y, y)
            cell = 0.5 * h * (dens[:-1] + dens[1:])
            cdf = np.cumsum(cell)
            target = rng.random() * cdf[-1]
            c = min(int(np.searchsorted(cdf, target, side="right")), len(cell) - 1)
            rem = target - (cdf[c - 1] if c > 0 else 0.0)
            d0, d1 = dens[c], dens[c + 1]
            # solve d0 s + (d1 - d0) s^2 / (2 h) = rem for s in [0, h]
            slope = (d1 - d0) / h[c]
            if abs(slope) * h[c] < 1e-12 * max(d0, d1, 1e-300):
                s = rem / d0 if d0 > 0 else 0.5 * h[c]
            else:
                disc = max(d0 * d0 + 2.0 * slope * rem, 0.0)
                s = (math.sqrt(disc) - d0) / slope
            s = min(max(s, 0.0), h[c])
            theta = s / h[c]
            out[i] = v[c] + s
            row = (1.0 - theta) * y[c] + theta * y[c + 1]
            nrm = np.linalg.norm(row)
            if nrm == 0.0:
                continue
            e = row / nrm
            y -= np.outer(y @ e, e)
        return np.sort(out)

    def draw(self, rng):
        """One sample, as sorted points in ``[0, R]``."""
        v = self._draw_v(rng)
        return np.minimum(v * v, self.R)


def sample(alpha, R, order=DEFAULT_ORDER, seed=0):
    """A single draw of the Bessel process on ``[0, R]``."""
    if R <= 0:
        return PointSample(np.empty(0), int(seed), float(R))
    sampler = BesselSampler(alpha, R, order)
    return PointSample(sampler.draw(trial_rng(seed, 0)), int(seed), float(R))


def run_trials(sampler, n_trials, seed, statistic, workers=1):
    """Apply ``statistic`` to ``n_trials`` independent draws, in trial order."""

    def one(t):
        return statistic(sampler.draw(trial_rng(seed, t)))

    if workers <= 1:
        return [one(t) for t in range(n_trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(n_trials)))


def ks_critical_1pct(n):
    """Asymptotic 1% critical value 1.63/sqrt(n) of the one-sample KS statistic."""
    return 1.63 / math.sqrt(n)


def _ks_normal(values):
    return float(stats.kstest(values, "norm").statistic)


@dataclass(frozen=True)
class CLTReport:
    statistics: np.ndarray
    ks: tuple
    critical: float
    correlation: np.ndarray
    counts: np.ndarray = field(repr=False)
    n_discarded: int = 0

    @property
    def passed(self):
        return all(d < self.critical for d in self.ks)


def _check_clt_config(p, x_vec):
    x = [float(v) for v in x_vec]
    if not x or any(b <= a for a, b in zip(x, x[1:])):
        raise DomainError("x_vec must be strictly increasing")
    if not 0 < p.a < x[0]:
        raise RegimeError("CLT configuration needs 0 < a < x_1")
    return x


def clt_experiment(p, x_vec, n_trials, seed, order=DEFAULT_ORDER, margin=0.1, window=None, workers=1):
    """Normalised counts ``(N(r x_j) - mu) / sigma`` over independent draws."""
    x = _check_clt_config(p, x_vec)
    R = p.r * x[-1] * (1.0 + margin) if window is None else float(window)
    if R < p.r * x[-1]:
        raise DomainError("window must contain r * x_m")
    sampler = BesselSampler(p.alpha, R, order)
    ts = [p.r * v for v in x]

    def counts(pts):
        return np.searchsorted(pts, ts, side="right")

    n = np.array(run_trials(sampler, n_trials, seed, counts, workers), dtype=float)
    mu = np.array([asympt.mu_alpha(p, v) for v in x])
    sd = np.sqrt([asympt.sigma2_alpha(p, v) for v in x])
    z = (n - mu) / sd
    corr = np.corrcoef(z, rowvar=False) if len(x) > 1 else np.ones((1, 1))
    return CLTReport(z, tuple(_ks_normal(z[:, j]) for j in range(len(x))), ks_critical_1pct(n_trials), np.atleast_2d(corr), n)


def nearest_integer(x):
    """Round half up: floor(x + 1/2)."""
    return int(math.floor(x + 0.5))


def classical_location_experiment(p, x_vec, n_trials, seed, order=DEFAULT_ORDER, window=None, workers=1):
    """Fluctuations of the ``k_j``-th point around ``mu^{-1}(k_j)``.

    ``k_j = [mu(r x_j)]``; each statistic is
    ``(mu(xi_k) - k) / sqrt(sigma^2(mu^{-1}(k)))``. Trials with fewer than
    ``k_m`` points in the window are discarded and counted.
    """
    x = _check_clt_config(p, x_vec)
    alpha = p.alpha
    ks = [nearest_integer(asympt.mu_alpha(p, v)) for v in x]
    if ks[0] < 1:
        raise RegimeError("k_1 must be at least 1")
    scale = np.sqrt([asympt.sigma2_unscaled(alpha, asympt.mu_inverse_unscaled(alpha, k)) for k in ks])
    if window is None:
        spread = 6.0 * max(scale) + 3.0
        window = 1.1 * max(p.r * x[-1], asympt.mu_inverse_unscaled(alpha, ks[-1] + spread))
    sampler = BesselSampler(alpha, window, order)

    def locate(pts):
        if len(pts) < ks[-1]:
            return None
        return [asympt.mu_unscaled(alpha, max(pts[k - 1], alpha * alpha)) - k for k in ks]

    raw = run_trials(sampler, n_trials, seed, locate, workers)
    kept = [row for row in raw if row is not None]
    dropped = n_trials - len(kept)
    if dropped > MAX_DISCARD_RATE * n_trials:
        raise DomainError(f"{dropped} of {n_trials} trials had too few points; enlarge the window")
    y = np.array(kept) / scale[None, :]
    corr = np.corrcoef(y, rowvar=False) if len(x) > 1 else np.ones((1, 1))
    return CLTReport(y, tuple(_ks_normal(y[:, j]) for j in range(len(x))), ks_critical_1pct(len(kept)), np.atleast_2d(corr), np.array(ks), dropped)


@dataclass(frozen=True)
class RigidityReport:
    stat_max: float
    k_range: tuple
    threshold: float
    passed: bool
    n_trials: int
    n_pass: int
    trial_stats: np.ndarray = field(repr=False)
    n_discarded: int = 0

    @property
    def pass_frequency(self):
        return self.n_pass / self.n_trials if self.n_trials else float("nan")

    def to_dict(self):
        return {
            "stat_max": self.stat_max,
            "k_lo": self.k_range[0],
            "k_hi": self.k_range[1],
            "threshold": self.threshold,
            "pass": self.passed,
            "n_trials": self.n_trials,
            "n_pass": self.n_pass,
            "n_discarded": self.n_discarded,
            "pass_frequency": self.pass_frequency,
        }


def rigidity_k_range(r, delta, k_max):
    """Integers strictly inside ``(delta sqrt r, K sqrt r)``."""
    lo = delta * math.sqrt(r)
    hi = k_max * math.sqrt(r)
    k_lo = math.floor(lo) + 1
    k_hi = math.ceil(hi) - 1
    return k_lo, k_hi


def rigidity_statistic(points, alpha, k_lo, k_hi, centering="mu"):
    """``max_k |c(xi_k) - k| / log k`` with ``c = mu`` or the bounded-order centering."""
    k = np.arange(k_lo, k_hi + 1)
    xi = np.asarray(points)[k - 1]
    if centering == "mu":
        c = np.array([asympt.mu_unscaled(alpha, max(t, alpha * alpha)) for t in xi])
    elif centering == "bounded":
        c = np.sqrt(xi) / math.pi - 0.5 * alpha
    else:
        raise ValueError(f"unknown centering {centering!r}")
    return float(np.max(np.abs(c - k) / np.log(k)))


def rigidity_threshold(eps):
    return math.sqrt(1.0 + eps) / math.pi


def rigidity_experiment(p, delta, k_max, eps, n_trials, seed, order=DEFAULT_ORDER, centering="mu", window=None, workers=1):
    """Frequency with which the rigidity statistic stays below ``sqrt(1+eps)/pi``."""
    k_lo, k_hi = rigidity_k_range(p.r, delta, k_max)
    if delta * math.sqrt(p.r) < 2.0:
        raise RegimeError("need delta sqrt(r) >= 2 so that log k > 0")
    if k_hi < k_lo:
        raise RegimeError("empty k range")
    if window is None:
        window = 1.1 * asympt.mu_inverse_unscaled(p.alpha, k_max * math.sqrt(p.r))
    sampler = BesselSampler(p.alpha, window, order)

    def stat(pts):
        if len(pts) < k_hi:
            return math.nan
        return rigidity_statistic(pts, p.alpha, k_lo, k_hi, centering)

    values = np.array(run_trials(sampler, n_trials, seed, stat, workers))
    ok = ~np.isnan(values)
    dropped = int(np.sum(~ok))
    if dropped > MAX_DISCARD_RATE * n_trials:
        raise DomainError(f"{dropped} of {n_trials} trials had fewer than {k_hi} points")
    thr = rigidity_threshold(eps)
    kept = values[ok]
    n_pass = int(np.sum(kept <= thr))
    stat_max = float(np.max(kept)) if len(kept) else math.nan
    return RigidityReport(stat_max, (k_lo, k_hi), thr, bool(stat_max <= thr), len(kept), n_pass, kept, dropped)


def deterministic_rigidity_points(alpha, k_hi):
    """Points placed exactly at their classical locations ``mu^{-1}(k)``."""
    return np.array([asympt.mu_inverse_unscaled(alpha, k) for k in range(1, k_hi + 1)])
