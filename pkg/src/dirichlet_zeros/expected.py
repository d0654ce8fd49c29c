"""Expected number of real zeros of the random series sum X_n n^(-sigma).

The expected count on [T, U] is (1/pi) int_T^U sqrt(K(2 sigma)) d sigma with
K = (log zeta)''.  Writing x = 2 sigma - 1 = exp(-u) turns the integral into

    (1/(2 pi)) int g(u) du,    g(u) = x sqrt(K(1 + x)),

and g(u) -> 1 as u -> infinity, so the logarithmic growth near sigma = 1/2
becomes the length of a u-interval.  Positive u is integrated as g - 1 plus
the exact length, which keeps the absolute error flat in T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import DomainError, PrecisionError
from .quadrature import QuadratureResult, integrate
from .series import DEFAULT_ORDER, ExpansionCoefficients, expansion_coefficients
from .zeta import log_zeta_second_derivative_with_bound

DEFAULT_TOL = 1e-10
# largest T - 1/2 where the ten-term expansion was checked against quadrature
# to 1e-6; the scan in the test suite reproduces it
EXPANSION_RADIUS = 5e-2
C0_ANCHORS = (1e-5, 1e-6, 1e-7)
TWO_PI = 2.0 * math.pi

Kernel = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class RealInterval:
    """[T, U] with 1/2 < T <= U; U may be math.inf."""

    T: float
    U: float = math.inf

    def __post_init__(self):
        if not (self.T > 0.5) or math.isnan(self.U):
            raise DomainError(f"interval needs T > 1/2, got T={self.T}")
        if self.U < self.T:
            raise DomainError(f"interval needs T <= U, got [{self.T}, {self.U}]")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.U)


def _checked(kernel: Kernel, s: np.ndarray) -> np.ndarray:
    value, bound = kernel(s)
    if np.any(~(value > 0)) or np.any(bound > 1e-8 * value):
        raise PrecisionError("second log-derivative not certified to 1e-8 relative")
    return value


def kac_integrand(sigma, kernel: Kernel = log_zeta_second_derivative_with_bound):
    """(1/pi) sqrt(K(2 sigma)) for scalar or array sigma > 1/2."""
    arr = np.asarray(sigma, dtype=float)
    if np.any(~(arr > 0.5)):
        raise DomainError("kac_integrand requires sigma > 1/2")
    out = np.sqrt(_checked(kernel, 2.0 * arr)) / math.pi
    return float(out) if out.ndim == 0 else out


def scaled_integrand(u, kernel: Kernel = log_zeta_second_derivative_with_bound):
    """g(u) = x sqrt(K(1 + x)) with x = exp(-u)."""
    u = np.asarray(u, dtype=float)
    s = 1.0 + np.exp(-u)
    # s - 1 is exact, so x matches the argument actually evaluated; g is flat
    # in u near sigma = 1/2 and the shift of u is harmless
    x = s - 1.0
    return x * np.sqrt(_checked(kernel, s))


def integer_tail_bound(sigma: float) -> float:
    """Bound on (1/pi) int_sigma^inf sqrt((log zeta)''(2t)) dt.

    Uses sqrt(sum Lambda(n) log n n^(-2t)) <= sum log n n^(-t), whose
    integral over [sigma, inf) is sum_{n>=2} n^(-sigma).
    """
    if sigma <= 1.0:
        return math.inf
    return (2.0 ** -sigma + 2.0 ** (1.0 - sigma) / (sigma - 1.0)) / math.pi


def cutoff_sigma(tail_bound: Callable[[float], float], tol: float) -> float:
    """Smallest convenient sigma_max with tail_bound(sigma_max) <= tol."""
    hi = 2.0
    while not tail_bound(hi) <= tol:
        hi *= 2.0
        if hi > 1e6:
            raise PrecisionError("no finite cutoff reaches the requested tail bound")
    lo = 1.0 + 1e-12 if tail_bound(1.0 + 1e-12) > tol else 0.5 + 1e-12
    if lo >= hi:
        return hi
    root = optimize.brentq(lambda s: math.log(tail_bound(s)) - math.log(tol), lo, hi,
                           xtol=1e-6)
    return root + 1e-3


def count_integral(interval: RealInterval, tol: float, kernel: Kernel,
                   tail_bound: Callable[[float], float]) -> QuadratureResult:
    """Shared quadrature driver for any log-covariance kernel."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    T, U = interval.T, interval.U
    if T == U:
        return QuadratureResult(0.0, 0.0, 0)
    tail = 0.0
    if not math.isfinite(U):
        sigma_max = cutoff_sigma(tail_bound, 0.25 * tol)
        if sigma_max <= T:
            return QuadratureResult(0.0, tail_bound(T), 0)
        U = sigma_max
        tail = tail_bound(U)
    budget = (tol - tail) * TWO_PI
    u_lo = -math.log(2.0 * U - 1.0)
    u_hi = -math.log(2.0 * T - 1.0)

    def g(u):
        return scaled_integrand(u, kernel)

    def g_minus_one(u):
        return scaled_integrand(u, kernel) - 1.0

    pieces = []
    if u_lo < 0.0:
        pieces.append(integrate(g, u_lo, min(u_hi, 0.0), 0.5 * budget))
    if u_hi > 0.0:
        a = max(u_lo, 0.0)
        r = integrate(g_minus_one, a, u_hi, 0.5 * budget)
        pieces.append(QuadratureResult(r.value + (u_hi - a), r.abs_err_estimate, r.subdivisions))
    total = pieces[0]
    for p in pieces[1:]:
        total = total + p
    return QuadratureResult(total.value / TWO_PI, total.abs_err_estimate / TWO_PI + tail,
                            total.subdivisions)


def expected_zero_count(interval: RealInterval, tol: float = DEFAULT_TOL) -> QuadratureResult:
    """E N(T, U) for the integer series by adaptive quadrature."""
    return count_integral(interval, tol, log_zeta_second_derivative_with_bound,
                          integer_tail_bound)


def leading_term(t: float) -> float:
    return math.log(1.0 / t) / TWO_PI


@lru_cache(maxsize=8)
def _c0_at(t: float, tol: float, order: int) -> float:
    coeffs = expansion_coefficients(order)
    q = expected_zero_count(RealInterval(0.5 + t), tol)
    return q.value - leading_term(t) - coeffs.tail(t)


def calibrate_c0(tol: float = 1e-8, order: int = DEFAULT_ORDER,
                 quad_tol: float = 1e-11) -> float:
    """c0 from quadrature at T - 1/2 = 1e-6, checked at 1e-5 and 1e-7."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    values = [_c0_at(t, quad_tol, order) for t in C0_ANCHORS]
    spread = max(values) - min(values)
    if spread > tol:
        raise PrecisionError(f"c0 unstable across anchors: spread {spread:.3g} > {tol:.3g}")
    return values[1]


@lru_cache(maxsize=4)
def default_coefficients(order: int = DEFAULT_ORDER) -> ExpansionCoefficients:
    return expansion_coefficients(order).with_c0(calibrate_c0(order=order))


def expected_zero_count_expansion(T: float, coeffs: ExpansionCoefficients | None = None,
                                  radius: float = EXPANSION_RADIUS) -> float:
    """(1/2pi) log(1/(T-1/2)) + c0 + sum_n c_n (T-1/2)^n."""
    t = T - 0.5
    if not (0.0 < t <= radius):
        raise DomainError(f"T - 1/2 = {t:.3g} outside the validated radius (0, {radius}]")
    if coeffs is None:
        coeffs = default_coefficients()
    elif coeffs.c0 is None:
        coeffs = coeffs.with_c0(calibrate_c0(order=coeffs.order))
    return leading_term(t) + coeffs.c0 + coeffs.tail(t)


def expansion_radius_scan(radii, threshold: float = 1e-6,
                          coeffs: ExpansionCoefficients | None = None) -> float:
    """Largest r in ``radii`` such that every scanned t <= r agrees to ``threshold``."""
    coeffs = coeffs or default_coefficients()
    best = 0.0
    for t in sorted(radii):
        q = expected_zero_count(RealInterval(0.5 + t), 1e-11).value
        e = expected_zero_count_expansion(0.5 + t, coeffs, radius=math.inf)
        if abs(q - e) >= threshold:
            break
        best = t
    return best
