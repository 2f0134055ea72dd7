"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``. Every test prints its
measurements before asserting, so a failing criterion still reports what
was observed.
"""

import math
import time

import mpmath
import numpy as np
import pytest
from scipy import integrate, special

from besseledge import asympt as am
from besseledge import dppsim as ds
from besseledge import fredholm as fr
from besseledge import specfun as sf


def report(n, ok, detail):
    print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} | {detail}")
    return ok


def loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# ---------------------------------------------------------------------------
# 1. special functions
# ---------------------------------------------------------------------------


def barnes_integral_lhs(t):
    # beta = i t: integral of x d/dx log(Gamma(1+x)/Gamma(1-x)) along [0, i t]
    val, _ = integrate.quad(lambda s: -2.0 * s * special.digamma(1 + 1j * s).real, 0.0, t, epsabs=1e-14, epsrel=1e-13)
    return val


def test_criterion_1_special_functions():
    t0 = time.perf_counter()
    g_err = max(
        abs(math.exp(sf.barnes_g_ln(n).value) - v) / v for n, v in zip(range(1, 7), (1, 1, 1, 2, 12, 288))
    )
    # right side: beta^2 + log G(1+beta)G(1-beta) with beta = i t
    id_err = max(
        abs(barnes_integral_lhs(t) - (-(t * t) + sf.barnes_pair_ln(2 * math.pi * t))) for t in (0.2, 0.5, 1.0)
    )
    w_err = 0.0
    w_err_two_term = 0.0
    for alpha in (20.0, 50.0, 100.0, 200.0):
        for az in np.geomspace(50.0, 5000.0, 12):
            z = az / alpha
            ext = sf.bessel_ik_uniform(alpha, z, n_terms=10)
            w = ext.i_scaled * ext.kp_scaled - ext.ip_scaled * ext.k_scaled
            w_err = max(w_err, abs(w * az + 1.0))
            two = sf.bessel_ik_uniform(alpha, z)
            w2 = two.i_scaled * two.kp_scaled - two.ip_scaled * two.k_scaled
            w_err_two_term = max(w_err_two_term, abs(w2 * az + 1.0))
    elapsed = time.perf_counter() - t0
    ok = g_err <= 1e-12 and id_err <= 1e-8 and w_err <= 1e-10 and elapsed < 5.0
    report(
        1,
        ok,
        f"G(1..6) rel err {g_err:.1e}; Barnes identity err {id_err:.1e}; "
        f"Wronskian rel residual {w_err:.1e} (two-term form alone {w_err_two_term:.1e}); {elapsed:.2f} s",
    )
    assert ok


# ---------------------------------------------------------------------------
# 2. uniform asymptotics
# ---------------------------------------------------------------------------


def uniform_oracle(alpha, z):
    """Scaled I, K, I', K' at alpha z in 40-digit arithmetic."""
    with mpmath.workdps(40):
        a = mpmath.mpf(alpha)
        zz = mpmath.mpf(z)
        x = a * zz
        xi = mpmath.sqrt(1 + zz * zz) + mpmath.log(zz / (1 + mpmath.sqrt(1 + zz * zz)))
        up, down = mpmath.exp(-a * xi), mpmath.exp(a * xi)
        ip = (mpmath.besseli(a - 1, x) + mpmath.besseli(a + 1, x)) / 2
        kp = -(mpmath.besselk(a - 1, x) + mpmath.besselk(a + 1, x)) / 2
        return (
            float(mpmath.besseli(a, x) * up),
            float(mpmath.besselk(a, x) * down),
            float(ip * up),
            float(kp * down),
        )


def test_criterion_2_uniform_asymptotics():
    t0 = time.perf_counter()
    azs = np.array([100.0, 500.0, 2000.0])
    names = ("I", "K", "I'", "K'")
    slopes = {}
    for alpha in (20.0, 50.0, 100.0):
        errs = np.zeros((4, 3))
        for i, az in enumerate(azs):
            r = sf.bessel_ik_uniform(alpha, az / alpha)
            ref = uniform_oracle(alpha, az / alpha)
            got = (r.i_scaled, r.k_scaled, r.ip_scaled, r.kp_scaled)
            errs[:, i] = [abs(g / f - 1.0) for g, f in zip(got, ref)]
        for j, name in enumerate(names):
            slopes[(alpha, name)] = loglog_slope(azs, errs[j, :])
    elapsed = time.perf_counter() - t0
    bad = {k: v for k, v in slopes.items() if abs(v + 2.0) > 0.3}
    ok = not bad and elapsed < 30.0
    detail = "; ".join(f"a={int(a)} {n}:{s:+.2f}" for (a, n), s in slopes.items() )
    report(2, ok, f"log-log slopes {detail}; {len(bad)} of {len(slopes)} outside -2+-0.3; {elapsed:.1f} s")
    assert ok


# ---------------------------------------------------------------------------
# 3. Fredholm self-convergence
# ---------------------------------------------------------------------------


def test_criterion_3_self_convergence():
    t0 = time.perf_counter()
    changes = []

    def both(f, *args):
        changes.append(abs(f(*args, order=20) - f(*args, order=40)))

    for s in (0.5, 5.0, 40.0):
        both(fr.gap_probability, 0.0, s)
    for s in (10.0, 100.0, 400.0):
        both(fr.gap_probability, 5.0, s)
    for y in (-1.0, 0.0, 1.0):
        both(fr.gap_probability, 100.0, fr.soft_edge_point(100.0, y))
    queries = [
        fr.ExpMomentQuery.from_alpha(0.0, (10.0, 30.0), (0.5, -0.3)),
        fr.ExpMomentQuery.from_alpha(5.0, (60.0, 200.0), (0.5, -0.3)),
        fr.ExpMomentQuery.from_alpha(100.0, (2e4, 4e4), (0.5, -0.3)),
        fr.ExpMomentQuery.from_alpha(100.0, (1.2e4,), (fr.HARD_NEGATIVE_U,)),
    ]
    for q in queries:
        both(fr.log_exp_moment, q)
    elapsed = time.perf_counter() - t0
    worst = max(changes)
    ok = worst < 1e-8 and elapsed < 120.0
    report(3, ok, f"max change on doubling order 20 -> 40: {worst:.1e} over {len(changes)} cases; {elapsed:.1f} s")
    assert ok


# ---------------------------------------------------------------------------
# 4. soft-edge limit of gap probabilities
# ---------------------------------------------------------------------------


def test_criterion_4_gap_limit():
    t0 = time.perf_counter()
    ys = (-1.0, 0.0, 1.0)
    airy = {y: fr.airy_gap_probability(y) for y in ys}
    diff = {}
    for alpha in (50.0, 100.0):
        for y in ys:
            diff[(alpha, y)] = abs(fr.gap_probability(alpha, fr.soft_edge_point(alpha, y)) - airy[y])
    elapsed = time.perf_counter() - t0
    within = all(diff[(100.0, y)] <= 1e-2 for y in ys)
    shrinks = all(diff[(100.0, y)] < diff[(50.0, y)] for y in ys)
    ok = within and shrinks and elapsed < 300.0
    detail = ", ".join(f"y={y:+.0f}: {diff[(50.0, y)]:.6f} -> {diff[(100.0, y)]:.6f}" for y in ys)
    report(4, ok, f"|Bessel - Airy| alpha 50 -> 100: {detail}; bound 1e-2 {'met' if within else 'missed'}; {elapsed:.1f} s")
    assert ok


# ---------------------------------------------------------------------------
# 5. exponential moment at desk scale
# ---------------------------------------------------------------------------


def test_criterion_5_exponential_moment():
    rs = (100.0, 400.0, 1600.0)
    resid, resid_no_barnes = [], []
    for r in rs:
        q = fr.ExpMomentQuery(r, 1.0, (2.0, 4.0), (0.5, -0.3))
        num = fr.log_exp_moment(q, tol=1e-10)
        pred = am.log_exp_moment_asympt(q, am.Regime.LARGE_A)
        resid.append(abs(num - pred.value))
        resid_no_barnes.append(abs(num - (pred.value - pred.blocks["barnes"])))
    monotone = resid[0] > resid[1] > resid[2]
    ok_with = monotone and resid[-1] < 0.05
    ok_without = resid_no_barnes[0] > resid_no_barnes[1] > resid_no_barnes[2] and resid_no_barnes[-1] < 0.05
    ok = ok_with and not ok_without
    report(
        5,
        ok,
        "residual " + ", ".join(f"{v:.5f}" for v in resid)
        + "; without Barnes block " + ", ".join(f"{v:.5f}" for v in resid_no_barnes)
        + f" ({'breaks' if not ok_without else 'does not break'} the bound)",
    )
    assert ok


# ---------------------------------------------------------------------------
# 6. moment constants
# ---------------------------------------------------------------------------


def test_criterion_6_moment_constants():
    a, x = 1.0, 2.0
    var_res, mean_res = [], []
    for r in (100.0, 400.0, 1600.0):
        p = am.EdgeParams(r, a)
        var_res.append(abs(fr.counting_var(p.alpha, r * x, tol=1e-10) - am.sigma2_alpha(p, x) - am.VARIANCE_CONSTANT))
        mean_res.append(abs(fr.counting_mean(p.alpha, r * x, tol=1e-10) - am.mu_alpha(p, x)))
    p = am.EdgeParams(400.0, a)
    cov_res = abs(fr.counting_cov(p.alpha, 400.0 * 2.0, 400.0 * 10.0, tol=1e-10) - am.cov_sigma_a(a, 2.0, 10.0))
    ok_var = var_res[0] > var_res[1] > var_res[2] and var_res[2] < 0.05
    ok_mean = max(mean_res) < 0.15
    ok_cov = cov_res < 0.05
    ok = ok_var and ok_mean and ok_cov
    report(
        6,
        ok,
        "variance residual " + ", ".join(f"{v:.5f}" for v in var_res)
        + "; mean residual " + ", ".join(f"{v:.5f}" for v in mean_res)
        + f"; covariance residual {cov_res:.5f}",
    )
    assert ok


# ---------------------------------------------------------------------------
# 7. central limit theorems
# ---------------------------------------------------------------------------


def test_criterion_7_clt():
    t0 = time.perf_counter()
    p = am.EdgeParams(400.0, 1.0)
    counts = ds.clt_experiment(p, (2.0, 4.0), 2000, 20240, workers=2)
    located = ds.classical_location_experiment(p, (2.0, 4.0), 2000, 20240, workers=2)
    elapsed = time.perf_counter() - t0
    ok = counts.passed and located.passed and elapsed < 900.0
    report(
        7,
        ok,
        f"KS counts {counts.ks[0]:.4f}, {counts.ks[1]:.4f}; classical locations {located.ks[0]:.4f}, "
        f"{located.ks[1]:.4f}; critical {counts.critical:.4f}; discarded {located.n_discarded}; {elapsed:.1f} s",
    )
    assert ok


# ---------------------------------------------------------------------------
# 8. rigidity
# ---------------------------------------------------------------------------


def test_criterion_8_rigidity():
    t0 = time.perf_counter()
    freq = {}
    for r in (400.0, 900.0):
        rep = ds.rigidity_experiment(am.EdgeParams(r, 1.0), 0.2, 4.0, 0.5, 200, 31337)
        freq[r] = rep.pass_frequency
    elapsed = time.perf_counter() - t0
    ok = freq[900.0] >= 0.9 and freq[400.0] <= freq[900.0]
    report(
        8,
        ok,
        f"pass frequency r=400: {freq[400.0]:.3f}, r=900: {freq[900.0]:.3f} (needs >= 0.9 and non-decreasing); {elapsed:.0f} s",
    )
    assert ok


# ---------------------------------------------------------------------------
# 9. matching corollaries
# ---------------------------------------------------------------------------


def test_criterion_9_matching():
    r = 1e4
    a_vals = (0.01, 0.02, 0.04)
    diffs = []
    for a in a_vals:
        q = fr.ExpMomentQuery(r, a, (1.0, 2.0), (0.5, -0.3))
        diffs.append(abs(am.log_exp_moment_bounded_alpha(q).value - am.log_exp_moment_asympt(q, am.Regime.SMALL_A).value))
    slope = loglog_slope(a_vals, diffs)
    cov_gap = 0.0
    ys = (0.5, 1.0, 2.5, 4.0)
    for a, rr, r_ai in ((1.0, 1e6, 50.0), (0.5, 1e8, 100.0), (3.0, 1e10, 300.0)):
        xs = am.airy_scaled_points(a, ys, rr, r_ai)
        for j in range(len(ys)):
            for k in range(j + 1, len(ys)):
                cov_gap = max(cov_gap, abs(am.cov_sigma_a(a, xs[j], xs[k]) - am.cov_sigma_airy(ys[j], ys[k])))
    ok = abs(slope - 2.0) <= 0.3 and cov_gap <= 1e-12
    report(9, ok, f"bounded vs large-alpha slope in a: {slope:.3f}; max |Sigma_a - Sigma_Ai| = {cov_gap:.1e}")
    assert ok
