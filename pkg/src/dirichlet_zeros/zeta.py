"""Riemann zeta function and relatives on the real half-line s > 1.

Everything here is built on one Euler-Maclaurin engine for the sums

    S(s, beta) = sum_{n >= 1} (log n)**beta * n**(-s),

so that zeta^(k)(s) = (-1)**k S(s, k).  The engine returns a value together
with a certified bound on the truncation remainder plus a floating-point
rounding allowance.  The same machinery, evaluated at s = 1 with the
divergent integral regularised, gives the Stieltjes constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError, PrecisionError

EPS = float(np.finfo(float).eps)

# (N, p) pairs tried in order by the scalar API; later entries cost more.
_BUDGETS = ((8, 6), (16, 8), (32, 10), (64, 12), (128, 14), (512, 16), (4096, 18))

DEFAULT_N = 16
DEFAULT_P = 8


@dataclass(frozen=True)
class ZetaEvaluation:
    s: float
    order: int
    value: float
    error_bound: float


@dataclass(frozen=True)
class StieltjesTable:
    values: tuple[float, ...]
    precision: float

    def __getitem__(self, n: int) -> float:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m (convention B_1 = -1/2)."""
    table = [Fraction(1)]
    for j in range(1, m + 1):
        acc = Fraction(0)
        for k in range(j):
            acc += math.comb(j + 1, k) * table[k]
        table.append(-acc / (j + 1))
    return table[m]


@lru_cache(maxsize=None)
def _em_weights(p: int) -> np.ndarray:
    # B_{2j} / (2j)! for j = 1..p
    return np.array([float(bernoulli(2 * j) / math.factorial(2 * j)) for j in range(1, p + 1)])


def _is_integer(beta: float) -> bool:
    return float(beta).is_integer()


def _log_power_integral(h, L, beta):
    """int_N^inf (log x)**beta x**(-1-h) dx with L = log N, h > 0 (array)."""
    if _is_integer(beta):
        b = int(beta)
        acc = np.zeros_like(h)
        for j in range(b + 1):
            acc = acc + (math.factorial(b) / math.factorial(j)) * L**j / h ** (b + 1 - j)
        return np.exp(-h * L) * acc
    a = beta + 1.0
    return special.gammaincc(a, h * L) * special.gamma(a) / h**a


def _derivative_coefficients(s, beta, mmax):
    """Coefficients c[m][i] with f^(m)(x) = x**(-s-m) sum_i c[m][i] (log x)**(beta-i).

    f(x) = (log x)**beta x**(-s).  Returned as a list of arrays of shape
    (i_count, len(s)).
    """
    coeffs = [np.ones((1,) + s.shape)]
    integer = _is_integer(beta)
    for m in range(mmax):
        prev = coeffs[-1]
        width = prev.shape[0] + 1
        if integer:
            width = min(width, int(beta) + 1)
        nxt = np.zeros((width,) + s.shape)
        keep = min(prev.shape[0], width)
        nxt[:keep] += (-s - m) * prev[:keep]
        for i in range(prev.shape[0]):
            if i + 1 < width:
                nxt[i + 1] += (beta - i) * prev[i]
        coeffs.append(nxt)
    return coeffs


def log_power_sum(s, beta: float = 0.0, N: int = DEFAULT_N, p: int = DEFAULT_P,
                  start: int = 1, regularize_at_one: bool = False):
    """Euler-Maclaurin evaluation of sum_{n >= start} (log n)**beta n**(-s).

    Returns ``(value, truncation_bound, rounding_bound)`` as float arrays
    shaped like ``s``.  Terms n < N are summed directly, the rest by the
    Euler-Maclaurin formula with p Bernoulli corrections.  With
    ``regularize_at_one`` (requires s == 1) the divergent integral is
    replaced by -(log N)**(beta+1)/(beta+1), which yields the Stieltjes
    constant gamma_beta.
    """
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    if N < 3:
        raise ValueError("N must be at least 3")
    if beta < 0:
        raise DomainError("beta must be nonnegative")
    if not regularize_at_one and np.any(s <= 1.0):
        raise DomainError("s must exceed 1")

    n = np.arange(start, N, dtype=float)
    if n.size:
        logn = np.log(n)
        terms = np.power(logn[None, :], beta) * np.power(n[None, :], -s[:, None])
        head = terms.sum(axis=1)
        # per-term evaluation error plus pairwise summation
        head_err = np.abs(terms).sum(axis=1) * (0.5 * beta + 3.0 + math.log2(n.size))
    else:
        head = np.zeros_like(s)
        head_err = np.zeros_like(s)

    L = math.log(N)
    if regularize_at_one:
        integral = np.full_like(s, -L ** (beta + 1) / (beta + 1))
    else:
        integral = _log_power_integral(s - 1.0, L, beta)

    coeffs = _derivative_coefficients(s, beta, 2 * p)
    Lpow = np.array([L ** (beta - i) for i in range(coeffs[-1].shape[0])])

    def deriv(m):
        c = coeffs[m]
        scale = N ** (-s - m)
        return (scale * np.einsum("i...,i->...", c, Lpow[: c.shape[0]]),
                scale * np.einsum("i...,i->...", np.abs(c), Lpow[: c.shape[0]]))

    # ulps lost evaluating c_i L^(beta-i); the coefficient recursion itself is
    # exact while s is an integer, otherwise it loses about 2 ulps per order
    exact_s = bool(np.all(s == np.round(s)))

    def ulps(m):
        width = coeffs[m].shape[0]
        return 0.5 * beta + 4.0 + math.log2(width) + (0.0 if exact_s else 2.0 * m)

    f_N, f_env = deriv(0)
    weights = _em_weights(p)
    corr = np.zeros_like(s)
    corr_err = 0.5 * ulps(0) * f_env
    for j in range(1, p + 1):
        d, env = deriv(2 * j - 1)
        corr = corr - weights[j - 1] * d
        corr_err = corr_err + ulps(2 * j - 1) * abs(weights[j - 1]) * env

    # |R_p| <= |B_2p|/(2p)! * int_N^inf |f^(2p)|, with
    # |f^(2p)(x)| <= x^(-s-2p) (log x)^beta * sum_i |c_i| L^(-i)  for x >= N.
    c2p = coeffs[2 * p]
    inv = np.array([L ** (-i) for i in range(c2p.shape[0])])
    envelope = np.einsum("i...,i->...", np.abs(c2p), inv)
    tail_int = _log_power_integral(s - 1.0 + 2 * p, L, beta)
    truncation = abs(weights[p - 1]) * envelope * tail_int

    value = head + integral + 0.5 * f_N + corr
    # first-order rounding model: each component carries a relative error of
    # a few ulp times the number of operations feeding it
    rounding = EPS * (head_err
                      + (0.5 * beta + 4.0) * np.abs(integral)
                      + corr_err
                      + 4.0 * (np.abs(head) + np.abs(integral) + np.abs(corr)))
    if not _is_integer(beta):
        rounding = rounding + 1e-13 * np.abs(integral)
    if scalar:
        return float(value[0]), float(truncation[0]), float(rounding[0])
    return value, truncation, rounding


def _check_s(s: float) -> None:
    if not (s > 1.0) or not math.isfinite(s):
        raise DomainError(f"zeta is only evaluated for real s > 1, got {s!r}")


def _certified(s: float, beta: float, sign: float, target_abs_err: float | None,
               start: int = 1) -> tuple[float, float]:
    best = None
    for N, p in _BUDGETS:
        value, trunc, rnd = log_power_sum(s, beta, N, p, start=start)
        bound = trunc + rnd
        goal = target_abs_err if target_abs_err is not None else 1e-13 * abs(value)
        if bound <= goal:
            return sign * value, bound
        if best is None or bound < best[1]:
            best = (sign * value, bound)
    raise PrecisionError(
        f"cannot certify |error| <= {target_abs_err} at s={s} (best bound {best[1]:.3g})")


def zeta(s: float, target_abs_err: float | None = None) -> ZetaEvaluation:
    """zeta(s) for real s > 1.

    ``target_abs_err=None`` asks for a relative accuracy of 1e-13.
    """
    _check_s(s)
    if target_abs_err is not None and not target_abs_err > 0:
        raise DomainError("target_abs_err must be positive")
    value, bound = _certified(s, 0.0, 1.0, target_abs_err)
    return ZetaEvaluation(s, 0, value, bound)


def zeta_derivative(s: float, k: int, target_abs_err: float | None = None) -> ZetaEvaluation:
    """k-th derivative (-1)**k sum (log n)**k n**(-s), any integer k >= 0."""
    _check_s(s)
    if k < 0 or int(k) != k:
        raise DomainError("derivative order must be a nonnegative integer")
    if target_abs_err is not None and not target_abs_err > 0:
        raise DomainError("target_abs_err must be positive")
    value, bound = _certified(s, float(k), (-1.0) ** k, target_abs_err)
    return ZetaEvaluation(s, int(k), value, bound)


def zeta_minus_one(s: float, target_abs_err: float | None = None) -> ZetaEvaluation:
    """zeta(s) - 1 without the cancellation, useful for large s."""
    _check_s(s)
    value, bound = _certified(s, 0.0, 1.0, target_abs_err, start=2)
    return ZetaEvaluation(s, 0, value, bound)


def zeta_triplet(s, N: int = DEFAULT_N, p: int = DEFAULT_P):
    """Vectorised (zeta, zeta', zeta'') with per-entry error bounds.

    Returns ``(values, bounds)`` each of shape (3,) + shape(s).
    """
    s = np.asarray(s, dtype=float)
    if np.any(~(s > 1.0)):
        raise DomainError("s must exceed 1")
    vals, bnds = [], []
    for k in range(3):
        v, t, r = log_power_sum(s, float(k), N, p)
        vals.append((-1.0) ** k * v)
        bnds.append(t + r)
    return np.array(vals), np.array(bnds)


def log_ratio_second_derivative(z0, z1, z2, b0=0.0, b1=0.0, b2=0.0):
    """(log Z)'' = Z''/Z - (Z'/Z)**2 with a first-order error bound."""
    q1 = z1 / z0
    value = z2 / z0 - q1 * q1
    bound = (b2 / np.abs(z0) + np.abs(z2) * b0 / z0**2
             + 2.0 * np.abs(q1) * (b1 / np.abs(z0) + np.abs(z1) * b0 / z0**2))
    bound = bound + 8.0 * EPS * (np.abs(z2 / z0) + q1 * q1)
    return value, bound


def log_zeta_second_derivative_with_bound(s):
    vals, bnds = zeta_triplet(s)
    return log_ratio_second_derivative(*vals, *bnds)


def log_zeta_second_derivative(s):
    """(log zeta)''(s) = zeta''/zeta - (zeta'/zeta)**2, for scalar or array s > 1."""
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr > 1.0)):
        raise DomainError("log_zeta_second_derivative requires s > 1")
    value, bound = log_zeta_second_derivative_with_bound(arr)
    if np.any(bound > 1e-10 * np.abs(value)):
        raise PrecisionError("relative accuracy 1e-10 not certified")
    if arr.ndim == 0:
        return float(value)
    return value


def von_mangoldt(n: int) -> float:
    """log p if n is a power of the prime p, else 0.  Trial division."""
    n = int(n)
    if n < 1:
        raise DomainError("von Mangoldt function needs n >= 1")
    if n == 1:
        return 0.0
    p = None
    if n % 2 == 0:
        p = 2
    else:
        f = 3
        while f * f <= n:
            if n % f == 0:
                p = f
                break
            f += 2
        if p is None:
            return math.log(n)
    m = n
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


# Candidate (N, p) pairs for the Stieltjes sums.  Small N keeps the
# cancellation between the partial sum and (log N)^(n+1)/(n+1) mild.
_STIELTJES_BUDGETS = tuple((N, p) for N in (4, 6, 8, 10, 12, 16, 24, 32, 48, 64)
                           for p in (8, 12, 16, 20, 24))


def _stieltjes_single(n: int) -> tuple[float, float]:
    best = None
    for N, p in _STIELTJES_BUDGETS:
        value, trunc, rnd = log_power_sum(1.0, float(n), N, p, regularize_at_one=True)
        bound = trunc + rnd
        if best is None or bound < best[1]:
            best = (value, bound)
    return best


@lru_cache(maxsize=None)
def _stieltjes_cached(n: int) -> tuple[float, float]:
    return _stieltjes_single(n)


def stieltjes_constants(M: int, precision: float = 1e-12) -> StieltjesTable:
    """gamma_0 .. gamma_M, each certified to ``precision``."""
    if M < 0:
        raise DomainError("M must be nonnegative")
    if not precision > 0:
        raise DomainError("precision must be positive")
    values = []
    for n in range(M + 1):
        value, bound = _stieltjes_cached(n)
        if bound > precision:
            raise PrecisionError(
                f"gamma_{n} only certified to {bound:.3g} > {precision:.3g}")
        values.append(value)
    return StieltjesTable(tuple(values), precision)
