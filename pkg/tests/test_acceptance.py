"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run on its own with ``pytest -v -s tests/test_acceptance.py`` or
``python3 tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest
import sympy

from dirichlet_zeros.expected import (
    C0_ANCHORS,
    RealInterval,
    calibrate_c0,
    expected_zero_count,
    expected_zero_count_expansion,
    leading_term,
)
from dirichlet_zeros.general import (
    FrequencySet,
    expected_zero_count_alpha,
    gamma_function,
    integral_J,
    kac_integrand_alpha,
)
from dirichlet_zeros.expected import kac_integrand
from dirichlet_zeros.series import expansion_coefficients, stieltjes_symbols, symbolic_expansion
from dirichlet_zeros.simulate import (
    SimulationConfig,
    dyadic_points,
    estimate_moments,
    jackknife_mean,
    orthant_indicator_correlation,
    run_simulation,
    sample_sign_statistics,
    series_correlation,
    tail_probability,
    trial_rng,
)
from dirichlet_zeros.zeta import stieltjes_constants

INV_2PI = 1.0 / (2.0 * math.pi)


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return _report


def test_criterion_01_c2_identity(report):
    tab = stieltjes_constants(9)  # cached table
    start = time.perf_counter()
    polys = symbolic_expansion(10)
    g = stieltjes_symbols(10)
    symbolic_ok = sympy.expand(polys[2] - (2 * g[1] + g[0] ** 2) / 2) == 0
    c2 = expansion_coefficients(10).coefficient(2)
    elapsed = time.perf_counter() - start
    closed = (2 * tab[1] + tab[0] ** 2) / (2 * math.pi)
    ok = symbolic_ok and abs(c2 - closed) < 1e-10 and elapsed < 1.0
    report(1, ok, f"symbolic={symbolic_ok} c2={c2:.15g} |diff|={abs(c2 - closed):.2e} "
                  f"time={elapsed:.2f}s")


def test_criterion_02_leading_term(report):
    ts = (1e-4, 1e-6, 1e-8)
    ratios = [expected_zero_count(RealInterval(0.5 + t)).value / math.log(1 / t) for t in ts]
    gaps = [abs(r - INV_2PI) for r in ratios]
    monotone = gaps[0] > gaps[1] > gaps[2]
    last = gaps[2] / INV_2PI
    ok = monotone and last < 0.01
    report(2, ok, f"ratios={[round(r, 6) for r in ratios]} monotone={monotone} "
                  f"last off by {100 * last:.2f}% (limit 1%)")


def test_criterion_03_expansion_vs_quadrature(report):
    worst = 0.0
    for k in range(3, 9):
        t = 10.0**-k
        q = expected_zero_count(RealInterval(0.5 + t)).value
        worst = max(worst, abs(expected_zero_count_expansion(0.5 + t) - q))
    coeffs = expansion_coefficients(10)
    c0s = [expected_zero_count(RealInterval(0.5 + t), 1e-11).value - leading_term(t)
           - coeffs.tail(t) for t in C0_ANCHORS]
    spread = max(c0s) - min(c0s)
    ok = worst < 1e-6 and spread < 1e-8
    report(3, ok, f"max|expansion-quadrature|={worst:.2e} c0={calibrate_c0():.12f} "
                  f"anchor spread={spread:.2e}")


def test_criterion_04_monte_carlo(report):
    iv = RealInterval(0.6, 1.0)
    cfg = SimulationConfig(iv, trials=10**4, seed=2024)
    res = run_simulation(cfg)
    mean, se = jackknife_mean(res.refined_counts)
    q = expected_zero_count(iv).value
    z = abs(mean - q) / se
    ok = z < 3 and res.suspect_rate < 0.01
    N = cfg.effective_truncation
    report(4, ok, f"mean={mean:.4f} se={se:.4f} quadrature={q:.5f} ({z:.2f} SE) "
                  f"suspect={res.suspect_rate:.4f} N={'untruncated' if N is None else N}")


def test_criterion_05_orthant(report):
    parts, ok = [], True
    for i, rho in enumerate((-0.5, 0.5, 0.9)):
        z = trial_rng(55, i).standard_normal((2, 10**6))
        x, y = z[0], rho * z[0] + math.sqrt(1 - rho * rho) * z[1]
        a, b = (x > 0).astype(float), (y > 0).astype(float)
        r = float(np.corrcoef(a, b)[0, 1])
        prod = (a - a.mean()) * (b - b.mean()) / (a.std() * b.std())
        se = float(np.std(prod) / math.sqrt(prod.size))
        closed = orthant_indicator_correlation(rho)
        ok &= abs(r - closed) < 3 * se
        parts.append(f"rho={rho}: {closed:.5f} vs {r:.5f}+-{se:.5f}")
    exact = abs(orthant_indicator_correlation(0.5) - 1 / 3) < 1e-15
    report(5, ok and exact, "; ".join(parts) + f"; rho=1/2 exact={exact}")


def test_criterion_06_correlation_decay(report):
    sig = dyadic_points(25)
    worst = max(abs(series_correlation(sig[k], sig[l])) * math.sqrt(2) ** abs(k - l)
                for k in range(25) for l in range(25))
    report(6, worst <= 3.0, f"max |corr| * sqrt(2)^|k-l| = {worst:.4f} (bound 3)")


def test_criterion_07_tau_factor(report):
    tau = FrequencySet.tau_weighted()
    devs = [abs(kac_integrand_alpha(s, tau) / kac_integrand(s) - math.sqrt(2))
            for s in (0.51, 0.6, 1.0, 2.0)]
    report(7, max(devs) < 1e-9, f"max |ratio - sqrt 2| = {max(devs):.2e}")


def test_criterion_08_regimes(report):
    ts = np.geomspace(1e-8, 1e-4, 5)
    parts, ok = [], True
    for alpha, fs in ((0, FrequencySet.integers()), (1, FrequencySet.log_power(1)),
                      (3, FrequencySet.log_power(3))):
        vals = [expected_zero_count_alpha(RealInterval(0.5 + t), fs).value for t in ts]
        slope = np.polyfit(np.log(1 / ts), vals, 1)[0]
        target = math.sqrt(1 + alpha) / (2 * math.pi)
        rel = abs(slope / target - 1)
        ok &= rel < 0.05
        parts.append(f"alpha={alpha}: slope={slope:.6f} ({100 * rel:.3f}%)")
    t = 1e-8
    v = expected_zero_count_alpha(RealInterval(0.5 + t), FrequencySet.primes()).value
    crit = v / math.sqrt(math.log(1 / t)) * math.pi
    ok &= abs(crit - 1) < 0.15
    parts.append(f"primes: ratio to 1/pi = {crit:.4f}")
    report(8, ok, "; ".join(parts))


def test_criterion_09_integral_J(report):
    exact = all(integral_J(0.0, s) == pytest.approx(2 ** (1 - 2 * s) / (2 * s - 1), rel=1e-14)
                for s in (0.51, 0.75, 1.0, 2.0))
    sigma = 0.5 + 1e-8
    h = 2 * sigma - 1
    ratios = [h ** (g + 1) * integral_J(g, sigma) / gamma_function(g + 1) for g in (0.5, 1.0, 2.0)]
    crit = integral_J(-1.0, sigma) / math.log(1 / (sigma - 0.5))
    ok = exact and all(abs(r - 1) < 0.02 for r in ratios) and abs(crit - 1) < 0.05
    report(9, ok, f"J(0) exact={exact} gamma ratios={[round(r, 6) for r in ratios]} "
                  f"J(-1)/log={crit:.4f}")


def test_criterion_10_moment_shape_and_signs(report):
    parts, ok = [], True
    for T in (0.55, 0.6, 0.7):
        cfg = SimulationConfig(RealInterval(T, 1.0), trials=3000, seed=10)
        L = math.log(1 / (T - 0.5))
        for k in (1, 2, 3):
            m, _ = estimate_moments(cfg, k)
            ok &= m <= (10 * k * L) ** k
        parts.append(f"T={T}: E N^3={m:.3f}")
    cfg = SimulationConfig(RealInterval(0.6, 1.0), trials=10**4, seed=10)
    logs = []
    for lam in (1.0, 2.0, 3.0):
        p, _ = tail_probability(cfg, lam)
        logs.append(math.log(p) if p > 0 else -math.inf)
    trend = all(a > b or (a == b == -math.inf) for a, b in zip(logs, logs[1:]))
    ok &= trend
    parts.append(f"log tail={[round(x, 3) for x in logs]}")
    frac = sample_sign_statistics(20, 1000, seed=100)[:, -1] / 20
    mean, se = jackknife_mean(frac)
    signs = abs(mean - 0.5) < 3 * se
    ok &= signs
    parts.append(f"S+(20)/20={mean:.4f}+-{se:.4f}")
    report(10, ok, "; ".join(parts))


if __name__ == "__main__":
    raise SystemExit(pytest.main(["-q", __file__]))
