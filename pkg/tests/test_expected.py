import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirichlet_zeros.errors import DomainError, PrecisionError
from dirichlet_zeros.expected import (
    EXPANSION_RADIUS,
    RealInterval,
    calibrate_c0,
    default_coefficients,
    expansion_radius_scan,
    expected_zero_count,
    expected_zero_count_expansion,
    integer_tail_bound,
    kac_integrand,
    leading_term,
)
from dirichlet_zeros.series import expansion_coefficients
from dirichlet_zeros.zeta import zeta_derivative

import oracles

C0 = 0.12408985267801044


def test_kac_integrand_near_half_line():
    for t in (1e-4, 1e-6, 1e-8):
        sigma = 0.5 + t
        assert (2 * sigma - 1) * math.pi * kac_integrand(sigma) == pytest.approx(1.0, abs=1e-3)


def test_kac_integrand_far_right():
    assert kac_integrand(20.0) == pytest.approx(math.log(2) * 2.0**-20 / math.pi, rel=1e-2)


def test_kac_integrand_at_one_against_direct_sums():
    z0 = oracles.partial_sum_with_tail(2.0, 0)
    z1 = oracles.partial_sum_with_tail(2.0, 1)
    z2 = oracles.partial_sum_with_tail(2.0, 2)
    expected = math.sqrt(z2 / z0 - (z1 / z0) ** 2) / math.pi
    assert kac_integrand(1.0) == pytest.approx(expected, rel=1e-9)
    z, d1, d2 = (zeta_derivative(2.0, k).value for k in (0, 1, 2))
    core = math.sqrt(d2 / z - (d1 / z) ** 2)
    assert kac_integrand(1.0) == pytest.approx(core / math.pi, rel=1e-12)


def test_kac_integrand_domain():
    with pytest.raises(DomainError):
        kac_integrand(0.5)
    with pytest.raises(DomainError):
        kac_integrand(np.array([0.7, 0.4]))


def test_kac_integrand_vectorised():
    s = np.array([0.6, 1.0, 3.0])
    assert np.allclose(kac_integrand(s), [kac_integrand(x) for x in s], rtol=0, atol=0)


@given(st.floats(min_value=0.5 + 1e-9, max_value=50.0))
def test_kac_integrand_positive(sigma):
    assert kac_integrand(sigma) > 0


def test_interval_validation():
    with pytest.raises(DomainError):
        RealInterval(0.5, 1.0)
    with pytest.raises(DomainError):
        RealInterval(0.8, 0.7)
    with pytest.raises(DomainError):
        RealInterval(0.6, float("nan"))


def test_empty_interval_is_zero():
    r = expected_zero_count(RealInterval(0.7, 0.7))
    assert r.value == 0.0 and r.abs_err_estimate == 0.0


def test_tol_must_be_positive():
    with pytest.raises(DomainError):
        expected_zero_count(RealInterval(0.6), tol=0.0)


def test_unreachable_tolerance_raises():
    with pytest.raises(PrecisionError):
        expected_zero_count(RealInterval(0.5 + 1e-6, 2.0), tol=1e-18)


def test_tail_bound_dominates_integral():
    for sigma in (1.5, 3.0, 10.0):
        tail = expected_zero_count(RealInterval(sigma), tol=1e-13).value
        assert tail <= integer_tail_bound(sigma)
    assert integer_tail_bound(1.0) == math.inf


def test_monotone_in_left_endpoint():
    Ts = [0.5 + 1e-6, 0.5 + 1e-3, 0.55, 0.6, 0.8, 1.0, 2.0]
    vals = [expected_zero_count(RealInterval(T)).value for T in Ts]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 0


@settings(max_examples=15)
@given(st.floats(0.501, 0.8), st.floats(0.01, 0.5), st.floats(0.01, 1.0))
def test_additivity(T, d1, d2):
    U, V = T + d1, T + d1 + d2
    a = expected_zero_count(RealInterval(T, U))
    b = expected_zero_count(RealInterval(U, V))
    c = expected_zero_count(RealInterval(T, V))
    slack = a.abs_err_estimate + b.abs_err_estimate + c.abs_err_estimate + 1e-14
    assert abs(a.value + b.value - c.value) <= slack


def test_error_estimate_respects_tolerance():
    for tol in (1e-6, 1e-10):
        r = expected_zero_count(RealInterval(0.5 + 1e-5), tol)
        assert 0 <= r.abs_err_estimate <= tol


def test_value_at_one_millionth():
    r = expected_zero_count(RealInterval(0.5 + 1e-6))
    assert r.value == pytest.approx(math.log(1e6) / (2 * math.pi) + calibrate_c0(), abs=1e-5)


def test_reference_value_on_unit_strip():
    # independent value computed with mpmath quadrature of the same integrand
    r = expected_zero_count(RealInterval(0.6, 1.0))
    assert r.value == pytest.approx(0.25096, abs=5e-5)


def test_c0_stable_across_anchors():
    coeffs = expansion_coefficients(10)
    vals = []
    for t in (1e-5, 1e-6, 1e-7):
        q = expected_zero_count(RealInterval(0.5 + t), 1e-11).value
        vals.append(q - leading_term(t) - coeffs.tail(t))
    assert max(vals) - min(vals) < 1e-8


def test_c0_regression_constant():
    assert calibrate_c0() == pytest.approx(C0, abs=1e-9)
    assert math.isfinite(calibrate_c0())


def test_c0_instability_is_reported():
    with pytest.raises(PrecisionError):
        calibrate_c0(tol=1e-20)
    with pytest.raises(DomainError):
        calibrate_c0(tol=0)


def test_expansion_matches_quadrature_at_small_offset():
    t = 1e-4
    q = expected_zero_count(RealInterval(0.5 + t)).value
    assert abs(expected_zero_count_expansion(0.5 + t) - q) < 1e-6


def test_expansion_agreement_over_range():
    for t in np.geomspace(1e-8, 1e-3, 11):
        q = expected_zero_count(RealInterval(0.5 + t))
        e = expected_zero_count_expansion(0.5 + t)
        assert abs(q.value - e) < max(1e-6, 10 * q.abs_err_estimate)


def test_expansion_leading_ratio_trend():
    ratios = [expected_zero_count_expansion(0.5 + t) / math.log(1 / t) for t in (1e-2, 1e-4, 1e-6)]
    assert all(abs(a - 1 / (2 * math.pi)) > abs(b - 1 / (2 * math.pi)) for a, b in zip(ratios, ratios[1:]))


def test_second_order_term_near_c2():
    t = 1e-2
    coeffs = default_coefficients()
    q = expected_zero_count(RealInterval(0.5 + t), 1e-12).value
    rest = q - leading_term(t) - coeffs.c0
    assert rest == pytest.approx(coeffs.coefficient(2) * t**2, rel=0.2)
    e = expected_zero_count_expansion(0.5 + t)
    assert e - leading_term(t) - coeffs.c0 == pytest.approx(coeffs.coefficient(2) * t**2, rel=0.2)


def test_expansion_outside_radius():
    with pytest.raises(DomainError):
        expected_zero_count_expansion(0.5 + 2 * EXPANSION_RADIUS)
    with pytest.raises(DomainError):
        expected_zero_count_expansion(0.5)


def test_frozen_radius_reproduced_by_scan():
    radii = [1e-3, 3e-3, 1e-2, 2e-2, 3e-2, 4e-2, 5e-2]
    assert expansion_radius_scan(radii) == EXPANSION_RADIUS


def test_expansion_with_uncalibrated_coefficients():
    coeffs = expansion_coefficients(10)
    assert coeffs.c0 is None
    v = expected_zero_count_expansion(0.5 + 1e-3, coeffs)
    assert v == pytest.approx(expected_zero_count_expansion(0.5 + 1e-3), abs=1e-15)
