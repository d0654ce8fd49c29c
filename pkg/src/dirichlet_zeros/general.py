"""Random Dirichlet series over general frequency sets.

For a set p_1 < p_2 < ... with optional weights a_p the covariance kernel is
Z(s) = sum a_p^2 p^(-s) and the expected count on [T, U] is the same
quadrature as for the integers with (log Z)'' in place of (log zeta)''.

Supported kinds:

* ``integers``     a_n = 1, Z = zeta
* ``primes``       Z = P, the prime zeta function
* ``tau``          a_n^2 = tau(n), Z = zeta^2
* ``log-power``    a_n^2 = (log n)^m, Z = (-1)^m zeta^(m); regularity exponent m
* ``explicit``     user-supplied elements and weights, finite or with a tail
                   estimated from the declared exponent
* ``subcritical``  p_n = n (log(n+2))^(-alpha) for alpha < -1

Where Z is dominated by its first term (large s) the kernel is computed as
(log(1 + R))'' with R = Z / (a_1^2 p_1^(-s)) - 1, which avoids the
cancellation in Z''/Z - (Z'/Z)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from .errors import DomainError, PrecisionError, ResourceError
from .expected import RealInterval, count_integral, integer_tail_bound
from .quadrature import QuadratureResult
from .zeta import EPS, ZetaEvaluation, log_power_sum, log_zeta_second_derivative_with_bound

PRIME_LIMIT_CAP = 10**9
_DIRECT_PRIME_LIMIT = 2_000_000  # primes used for the large-s prime route
_PRIME_SWITCH = 4.0             # Moebius route below, direct sums above
_LOG_POWER_SWITCH = 6.0
_LOG_POWER_TERMS = 10_000
_SUBCRITICAL_TERMS = 200_000


# -- special functions ----------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_function(x: float) -> float:
    """Euler's Gamma for real x > 0 by the Lanczos approximation (g = 7, n = 9)."""
    x = float(x)
    if not x > 0:
        raise DomainError("gamma_function is defined here for x > 0 only")
    if x < 0.5:
        return gamma_function(x + 1.0) / x
    z = x - 1.0
    a = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        a += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * math.exp((z + 0.5) * math.log(t) - t) * a


def upper_gamma(s: float, a: float) -> float:
    """Upper incomplete gamma Gamma(s, a) for real s and a > 0."""
    if not a > 0:
        raise DomainError("upper_gamma needs a > 0")
    if s > 0:
        return float(special.gammaincc(s, a)) * gamma_function(s)
    if s == 0:
        return float(special.exp1(a))
    k = math.ceil(-s) if s != math.floor(s) else int(-s)
    base = s + k
    value = upper_gamma(base, a)
    # Gamma(s, a) = (Gamma(s+1, a) - a^s e^-a) / s, stepping down from base
    for j in range(k - 1, -1, -1):
        sj = s + j
        value = (value - a**sj * math.exp(-a)) / sj
    return value


def log_power_tail(h: float, X: float, beta: float) -> float:
    """int_X^inf (log x)^beta x^(-1-h) dx for h > 0, X > 1."""
    L = math.log(X)
    return upper_gamma(beta + 1.0, h * L) / h ** (beta + 1.0)


def integral_J(gamma: float, sigma: float) -> float:
    """int_2^inf (log x)^gamma x^(-2 sigma) dx = Gamma(gamma+1, (2s-1) log 2)/(2s-1)^(gamma+1)."""
    if not sigma > 0.5:
        raise DomainError("integral_J needs sigma > 1/2")
    h = 2.0 * sigma - 1.0
    return upper_gamma(gamma + 1.0, h * math.log(2.0)) / h ** (gamma + 1.0)


# -- primes -----------------------------------------------------------------------

def _small_sieve(limit: int) -> np.ndarray:
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, int(math.isqrt(limit)) + 1):
        if is_p[p]:
            is_p[p * p::p] = False
    return np.nonzero(is_p)[0]


def iter_prime_segments(limit: int, segment: int = 1 << 20):
    """Yield arrays of the primes <= limit, one sieve segment at a time."""
    if limit > PRIME_LIMIT_CAP:
        raise ResourceError(f"prime limit {limit} exceeds the cap {PRIME_LIMIT_CAP}")
    if limit < 2:
        return
    base = _small_sieve(int(math.isqrt(limit)) + 1)
    lo = 2
    while lo <= limit:
        hi = min(lo + segment, limit + 1)
        mark = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            mark[start - lo::p] = False
        yield np.nonzero(mark)[0] + lo
        lo = hi


@lru_cache(maxsize=8)
def _primes_cached(limit: int) -> np.ndarray:
    out = np.concatenate(list(iter_prime_segments(limit)) or [np.zeros(0, dtype=np.int64)])
    out.setflags(write=False)
    return out


def generate_primes(limit: int) -> np.ndarray:
    """All primes <= limit by a segmented sieve (read-only cached array)."""
    if limit > PRIME_LIMIT_CAP:
        raise ResourceError(f"prime limit {limit} exceeds the cap {PRIME_LIMIT_CAP}")
    return _primes_cached(int(limit))


@lru_cache(maxsize=1)
def _mobius_table(M: int = 128) -> np.ndarray:
    mu = np.ones(M + 1, dtype=int)
    mu[0] = 0
    for p in _small_sieve(M):
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


def _prime_moebius(s: np.ndarray):
    """(P, P', P'', bounds) from P(s) = sum_m mu(m)/m log zeta(ms)."""
    mu = _mobius_table()
    smin = float(np.min(s))
    mmax = min(len(mu) - 1, int(math.ceil(60.0 / smin)) + 1)
    P = np.zeros_like(s)
    P1 = np.zeros_like(s)
    P2 = np.zeros_like(s)
    err = np.zeros((3,) + s.shape)
    for m in range(1, mmax + 1):
        if mu[m] == 0:
            continue
        ms = m * s
        zm1, t0, r0 = log_power_sum(ms, 0.0, start=2)
        s1, t1, r1 = log_power_sum(ms, 1.0)
        s2, t2, r2 = log_power_sum(ms, 2.0)
        z0 = 1.0 + zm1
        q = s1 / z0
        lz = s2 / z0 - q * q
        P += mu[m] / m * np.log1p(zm1)
        P1 -= mu[m] * q
        P2 += mu[m] * m * lz
        b0, b1, b2 = t0 + r0, t1 + r1, t2 + r2
        err[0] += (b0 / z0 + EPS * np.abs(np.log1p(zm1))) / m
        err[1] += b1 / z0 + np.abs(q) * b0 / z0 + EPS * np.abs(q)
        err[2] += m * (b2 / z0 + 2 * np.abs(q) * (b1 + np.abs(q) * b0) / z0
                       + 4 * EPS * (s2 / z0 + q * q))
    return P, P1, P2, err


def _lead_factored(s: np.ndarray, ratios: np.ndarray, logs: np.ndarray,
                   tails=None):
    """R, R', R'' for R(s) = sum_i c_i exp(-s * l_i), l_i > 0, plus tails."""
    E = ratios[None, :] * np.exp(-s[:, None] * logs[None, :])
    R = E.sum(axis=1)
    R1 = -(E * logs[None, :]).sum(axis=1)
    R2 = (E * (logs**2)[None, :]).sum(axis=1)
    tail = np.zeros((3,) + s.shape) if tails is None else tails
    return R + tail[0], R1 - tail[1], R2 + tail[2], tail


def _kernel_from_R(R, R1, R2, rel_err):
    one = 1.0 + R
    value = (R2 * one - R1 * R1) / (one * one)
    bound = rel_err * (R2 * one + R1 * R1) / (one * one) + 8 * EPS * np.abs(value)
    return value, bound


# -- frequency sets -------------------------------------------------------------

@dataclass(frozen=True)
class FrequencySet:
    """A frequency set {p_1 < p_2 < ...} with regularity exponent alpha.

    ``elements`` and ``weights`` (the a_p, not their squares) are only
    stored for explicit sets; ``complete`` marks an explicit list that is
    the whole (finite) set rather than a prefix of an infinite one.
    """

    kind: str
    alpha: float
    elements: tuple[float, ...] | None = None
    weights: tuple[float, ...] | None = None
    complete: bool = False
    power: int = 0
    name: str = ""
    _arrays: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind not in {"integers", "primes", "tau", "log-power", "explicit", "subcritical"}:
            raise DomainError(f"unknown frequency-set kind {self.kind!r}")
        if self.kind == "explicit":
            e = np.asarray(self.elements, dtype=float)
            if e.size == 0 or e[0] < 1 or np.any(np.diff(e) <= 0):
                raise DomainError("explicit elements must be >= 1 and strictly increasing")
            w = np.ones_like(e) if self.weights is None else np.asarray(self.weights, float)
            if w.shape != e.shape or np.any(w < 0):
                raise DomainError("weights must be nonnegative, one per element")
            if w[0] == 0:
                raise DomainError("the first element needs a positive weight")
            self._arrays["e"], self._arrays["w2"] = e, w * w
        if self.kind == "subcritical" and not self.alpha < -1:
            raise DomainError("subcritical sets need alpha < -1")

    # constructors
    @classmethod
    def integers(cls) -> FrequencySet:
        return cls("integers", 0.0, name="integers")

    @classmethod
    def primes(cls) -> FrequencySet:
        return cls("primes", -1.0, name="primes")

    @classmethod
    def tau_weighted(cls) -> FrequencySet:
        return cls("tau", 0.0, name="tau-weighted")

    @classmethod
    def log_power(cls, m: int) -> FrequencySet:
        if m < 1 or int(m) != m:
            raise DomainError("log-power weights need a positive integer power")
        return cls("log-power", float(m), power=int(m), name=f"log-power:{m}")

    @classmethod
    def subcritical(cls, alpha: float) -> FrequencySet:
        return cls("subcritical", float(alpha), name=f"subcritical:{alpha}")

    @classmethod
    def explicit(cls, elements, weights=None, alpha: float = 0.0,
                 complete: bool = False, name: str = "explicit") -> FrequencySet:
        return cls("explicit", float(alpha), tuple(float(x) for x in elements),
                   None if weights is None else tuple(float(x) for x in weights),
                   complete, name=name)

    @classmethod
    def from_file(cls, path: str | Path, alpha: float = 0.0, complete: bool = False) -> FrequencySet:
        """One element per line, optionally followed by its weight."""
        elements, weights = [], []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            try:
                elements.append(float(parts[0]))
                weights.append(float(parts[1]) if len(parts) > 1 else 1.0)
            except (ValueError, IndexError):
                raise DomainError(f"{path}:{lineno}: cannot parse {line!r}") from None
        if not elements:
            raise DomainError(f"{path}: no elements")
        return cls.explicit(elements, weights, alpha, complete, name=f"file:{path}")

    # behaviour
    def kernel(self, s):
        """(log Z)''(s) with an error bound, s > 1 (array)."""
        return _KERNELS[self.kind](self, np.asarray(s, dtype=float))

    def tail_bound(self, sigma: float) -> float:
        return _TAILS[self.kind](self, sigma)


def _check_s(s: np.ndarray) -> None:
    if np.any(~(s > 1.0)):
        raise DomainError("s must exceed 1")


def _integer_kernel(fs, s):
    _check_s(s)
    return log_zeta_second_derivative_with_bound(s)


def _tau_kernel(fs, s):
    v, b = _integer_kernel(fs, s)
    return 2.0 * v, 2.0 * b


def _prime_tails(s, X):
    h = s - 1.0
    return np.array([[2.0**si * log_power_tail(hi, X, k) for si, hi in zip(s, h)]
                     for k in range(3)])


def _prime_kernel(fs, s):
    _check_s(s)
    value = np.empty_like(s)
    bound = np.empty_like(s)
    low = s < _PRIME_SWITCH
    if np.any(low):
        P, P1, P2, err = _prime_moebius(s[low])
        value[low] = P2 / P - (P1 / P) ** 2
        bound[low] = (err[2] / P + np.abs(P2) * err[0] / P**2
                      + 2 * np.abs(P1 / P) * (err[1] / P + np.abs(P1) * err[0] / P**2)
                      + 8 * EPS * (np.abs(P2 / P) + (P1 / P) ** 2))
    if np.any(~low):
        sh = s[~low]
        p = generate_primes(_DIRECT_PRIME_LIMIT)[1:].astype(float)
        logs = np.log(p / 2.0)
        X = float(p[-1])
        tails = _prime_tails(sh, X)
        R, R1, R2, _ = _lead_factored(sh, np.ones_like(logs), logs, tails)
        v, b = _kernel_from_R(R, R1, R2, 8 * EPS * math.log2(p.size))
        value[~low] = v
        bound[~low] = b + (tails[2] + 2 * np.abs(R1) * tails[1]) / (1 + R)
    return value, bound


def _log_power_kernel(fs, s):
    _check_s(s)
    m = fs.power
    value = np.empty_like(s)
    bound = np.empty_like(s)
    low = s < _LOG_POWER_SWITCH
    if np.any(low):
        sl = s[low]
        S = [log_power_sum(sl, float(m + j)) for j in range(3)]
        s0, s1, s2 = (x[0] for x in S)
        b0, b1, b2 = (x[1] + x[2] for x in S)
        q = s1 / s0
        value[low] = s2 / s0 - q * q
        bound[low] = (b2 / s0 + s2 * b0 / s0**2 + 2 * q * (b1 / s0 + s1 * b0 / s0**2)
                      + 8 * EPS * (s2 / s0 + q * q))
    if np.any(~low):
        sh = s[~low]
        n = np.arange(3, _LOG_POWER_TERMS + 1, dtype=float)
        ratios = (np.log(n) / math.log(2.0)) ** m
        logs = np.log(n / 2.0)
        X = float(_LOG_POWER_TERMS)
        scale = 1.0 / math.log(2.0) ** m
        tails = np.array([[scale * 2.0**si * log_power_tail(si - 1.0, X, m + k) for si in sh]
                          for k in range(3)])
        R, R1, R2, _ = _lead_factored(sh, ratios, logs, tails)
        v, b = _kernel_from_R(R, R1, R2, 8 * EPS * math.log2(n.size))
        value[~low] = v
        bound[~low] = b + (tails[2] + 2 * np.abs(R1) * tails[1]) / (1 + R)
    return value, bound


def _explicit_tails(fs, s):
    """Estimated contribution of elements beyond the list, in lead-factored units."""
    if fs.complete:
        return np.zeros((3,) + s.shape)
    e, w2 = fs._arrays["e"], fs._arrays["w2"]
    X, p1 = float(e[-1]), float(e[0])
    out = np.zeros((3,) + s.shape)
    for i, si in enumerate(s):
        scale = p1**si / w2[0]
        for k in range(3):
            # density of elements ~ (log x)^alpha; log(x/p1) <= log x
            out[k, i] = scale * log_power_tail(si - 1.0, X, fs.alpha + k)
    return out


def _explicit_kernel(fs, s):
    _check_s(s)
    e, w2 = fs._arrays["e"], fs._arrays["w2"]
    ratios = w2[1:] / w2[0]
    logs = np.log(e[1:] / e[0])
    tails = _explicit_tails(fs, s)
    R, R1, R2, _ = _lead_factored(s, ratios, logs, tails)
    v, b = _kernel_from_R(R, R1, R2, 8 * EPS * max(1.0, math.log2(max(1, logs.size))))
    if not fs.complete:
        b = b + (tails[2] + 2 * np.abs(R1) * tails[1]) / (1 + R)
    return v, b


@lru_cache(maxsize=8)
def _subcritical_elements(alpha: float, count: int) -> np.ndarray:
    n = np.arange(1, count + 1, dtype=float)
    return n * np.log(n + 2.0) ** (-alpha)


def _subcritical_tail_integrals(alpha: float, s: float, M: int):
    """sum_{n>M} (log p(n))^k p(n)^(-s), k = 0, 1, 2, by the midpoint integral.

    The error bound combines the quadrature estimate with the midpoint
    Euler-Maclaurin remainder, at most |g'(M + 1/2)| / 24 for the convex
    decreasing summand g (doubled for safety).
    """
    out, err = [], []
    a = M + 0.5
    for k in range(3):
        def f(v, k=k):
            ln = math.log(a) + v
            # log(n + 2) without forming n, which overflows for large v
            lp = ln - alpha * math.log(ln + math.log1p(2.0 * math.exp(-ln)))
            return lp**k * math.exp(ln - s * lp)
        # in y = log(log n / log a) the integrand is flat up to a knee near
        # (s - 1) log n = 1 and negligible once (s - 1) log n exceeds 800
        L0 = math.log(a)
        y_end = max(math.log(800.0 / ((s - 1.0) * L0)), 1.0)
        knee = math.log(1.0 / ((s - 1.0) * L0))

        def fy(y, f=f):
            ln = L0 * math.exp(y)
            return f(ln - L0) * ln
        points = [knee] if 0.0 < knee < y_end else None
        val, e = sp_integrate.quad(fy, 0.0, y_end, points=points, limit=400,
                                   epsabs=0.0, epsrel=1e-10)
        h = 1e-2 * a
        # f carries the dn = n dv Jacobian; divide it back out
        slope = (f(math.log1p(h / a)) / (a + h) - f(math.log1p(-h / a)) / (a - h)) / (2 * h)
        out.append(val)
        err.append(e + abs(slope) / 12.0)
    return np.array(out), np.array(err)


def _subcritical_kernel(fs, s):
    _check_s(s)
    p = _subcritical_elements(fs.alpha, _SUBCRITICAL_TERMS)
    p1 = p[0]
    logs = np.log(p[1:] / p1)
    tails = np.zeros((3,) + s.shape)
    terr = np.zeros_like(s)
    lp1 = math.log(p1)
    for i, si in enumerate(s):
        t, e = _subcritical_tail_integrals(fs.alpha, si, _SUBCRITICAL_TERMS)
        scale = p1**si
        t0, t1, t2 = t * scale
        e0, e1, e2 = e * scale
        tails[0, i] = t0
        tails[1, i] = t1 - lp1 * t0
        tails[2, i] = t2 - 2 * lp1 * t1 + lp1**2 * t0
        terr[i] = e2 + 2 * abs(lp1) * e1 + lp1**2 * e0
    R, R1, R2, _ = _lead_factored(s, np.ones_like(logs), logs, tails)
    v, b = _kernel_from_R(R, R1, R2, 8 * EPS * math.log2(logs.size))
    return v, b + terr / (1 + R)


_KERNELS = {
    "integers": _integer_kernel,
    "tau": _tau_kernel,
    "primes": _prime_kernel,
    "log-power": _log_power_kernel,
    "explicit": _explicit_kernel,
    "subcritical": _subcritical_kernel,
}


def _prime_tail_bound(fs, sigma):
    # (log P)'' <= sum_{p>=3} log^2(p/2) (2/p)^s, so the integrand is at most
    # (1/pi) sum_{n>=3} log(n/2) (2/n)^sigma and its tail integral at most
    # (1/pi) sum_{n>=3} (2/n)^sigma
    if sigma <= 1.0:
        return math.inf
    return (2.0 / 3.0) ** sigma * (1.0 + 3.0 / (sigma - 1.0)) / math.pi


def _log_power_tail_bound(fs, sigma):
    m = fs.power
    if sigma <= 1.0 + m:
        return math.inf
    # integrand <= (1/pi) sum_{n>=3} sqrt(w_n/w_2) log(n/2) (2/n)^sigma; after
    # integrating in sigma: (1/pi) 2^sigma log(2)^(-m/2) sum_{n>=3} (log n)^(m/2) n^-sigma
    s3 = math.log(3.0) ** (m / 2) * 3.0**-sigma
    rest = log_power_tail(sigma - 1.0, 3.0, m / 2)
    return 2.0**sigma * math.log(2.0) ** (-m / 2) * (s3 + rest) / math.pi


def _explicit_tail_bound(fs, sigma):
    e, w2 = fs._arrays["e"], fs._arrays["w2"]
    p1 = float(e[0])
    finite = float(np.sum(np.sqrt(w2[1:] / w2[0]) * np.exp(-sigma * np.log(e[1:] / p1))))
    if fs.complete:
        return finite / math.pi
    if sigma <= 1.0:
        return math.inf
    X = float(e[-1])
    extra = p1**sigma / math.sqrt(w2[0]) * log_power_tail(sigma - 1.0, X, max(fs.alpha, 0.0) / 2)
    return (finite + 2.0 * extra) / math.pi


def _subcritical_tail_bound(fs, sigma):
    if sigma <= 1.0:
        return math.inf
    p = _subcritical_elements(fs.alpha, 2)
    ratio = p[0] / math.log(4.0) ** (-fs.alpha)
    return ratio**sigma * (2.0**-sigma + 2.0 ** (1.0 - sigma) / (sigma - 1.0)) / math.pi


_TAILS = {
    "integers": lambda fs, sigma: integer_tail_bound(sigma),
    "tau": lambda fs, sigma: math.sqrt(2.0) * integer_tail_bound(sigma),
    "primes": _prime_tail_bound,
    "log-power": _log_power_tail_bound,
    "explicit": _explicit_tail_bound,
    "subcritical": _subcritical_tail_bound,
}


# -- public operations ------------------------------------------------------------

def _sum_integers(s: float, k: int) -> tuple[float, float]:
    v, t, r = log_power_sum(s, float(k))
    return v, t + r


def _set_sum(fs: FrequencySet, s: float, k: int) -> tuple[float, float]:
    """sum a_p^2 (log p)^k p^-s (unsigned) with an error bound or estimate."""
    if fs.kind == "integers":
        return _sum_integers(s, k)
    if fs.kind == "log-power":
        return _sum_integers(s, k + fs.power)
    if fs.kind == "tau":
        z = [_sum_integers(s, j) for j in range(3)]
        (z0, e0), (z1, e1), (z2, e2) = z
        if k == 0:
            return z0 * z0, 2 * z0 * e0
        if k == 1:
            return 2 * z0 * z1, 2 * (z0 * e1 + z1 * e0)
        return 2 * (z1 * z1 + z0 * z2), 2 * (2 * z1 * e1 + z0 * e2 + z2 * e0)
    if fs.kind == "primes":
        if s < _PRIME_SWITCH:
            P, P1, P2, err = _prime_moebius(np.array([s]))
            vals = (P[0], -P1[0], P2[0])
            return vals[k], float(err[k][0]) + 4 * EPS * abs(vals[k])
        p = generate_primes(_DIRECT_PRIME_LIMIT).astype(float)
        lp = np.log(p)
        val = math.fsum(lp**k * np.exp(-s * lp))
        return val, log_power_tail(s - 1.0, p[-1], k) + 4 * EPS * val
    if fs.kind == "explicit":
        e, w2 = fs._arrays["e"], fs._arrays["w2"]
        le = np.log(e)
        val = math.fsum(w2 * le**k * np.exp(-s * le))
        tail = 0.0 if fs.complete else log_power_tail(s - 1.0, float(e[-1]), fs.alpha + k)
        return val + tail, tail + 4 * EPS * val
    p = _subcritical_elements(fs.alpha, _SUBCRITICAL_TERMS)
    lp = np.log(p)
    head = math.fsum(lp**k * np.exp(-s * lp))
    t, e = _subcritical_tail_integrals(fs.alpha, s, _SUBCRITICAL_TERMS)
    return head + t[k], e[k] + 4 * EPS * head


def zeta_alpha(s: float, fs: FrequencySet, k: int = 0, tol: float | None = None
               ) -> ZetaEvaluation:
    """k-th derivative of Z(s) = sum a_p^2 p^-s, i.e. (-1)^k sum a_p^2 (log p)^k p^-s."""
    if not s > 1.0:
        raise DomainError("zeta_alpha needs s > 1")
    if k not in (0, 1, 2):
        raise DomainError("derivative order must be 0, 1 or 2")
    value, bound = _set_sum(fs, float(s), k)
    if tol is not None and bound > tol:
        raise PrecisionError(f"{fs.name}: error {bound:.3g} at s={s} exceeds tol {tol:.3g}")
    return ZetaEvaluation(float(s), k, (-1.0) ** k * value, bound)


def kernel_alpha(s, fs: FrequencySet):
    """(log Z)''(s) for the set, scalar or array."""
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    value, _ = fs.kernel(arr)
    return float(value[0]) if np.ndim(s) == 0 else value


def kac_integrand_alpha(sigma, fs: FrequencySet):
    from .expected import kac_integrand
    return kac_integrand(sigma, fs.kernel)


def expected_zero_count_alpha(interval: RealInterval, fs: FrequencySet,
                              tol: float = 1e-8) -> QuadratureResult:
    """(1/pi) int_T^U sqrt((log Z)''(2 sigma)) d sigma for the set."""
    return count_integral(interval, tol, fs.kernel, fs.tail_bound)


@dataclass(frozen=True)
class RegimePrediction:
    regime: str
    leading_form: str
    leading_constant: float | None

    def predicted(self, t: float) -> float | None:
        """Leading-order prediction of E N(1/2 + t, inf)."""
        if self.leading_constant is None:
            return None
        if self.regime == "critical":
            return self.leading_constant * math.sqrt(math.log(1.0 / t))
        return self.leading_constant * math.log(1.0 / t)


def regime_prediction(alpha: float) -> RegimePrediction:
    if alpha > -1:
        return RegimePrediction("supercritical", "sqrt(1+alpha)/(2 pi) * log(1/(T-1/2))",
                                math.sqrt(1.0 + alpha) / (2.0 * math.pi))
    if alpha == -1:
        return RegimePrediction("critical", "(1/pi) * sqrt(log(1/(T-1/2)))", 1.0 / math.pi)
    return RegimePrediction("subcritical", "c (set dependent, finite limit)", None)


def counting_fit(elements, alpha: float) -> dict:
    """Compare pi(x) with x (log x)^alpha over the last decades of a list.

    Returns the least-squares alpha from log(pi(x)/x) ~ alpha log log x + c
    and the ratio pi(X)/(X (log X)^alpha) at the largest element.
    """
    e = np.asarray(elements, dtype=float)
    first = int(np.searchsorted(e, math.e, side="right"))
    if e.size - first < 3:
        return {"fitted_alpha": None, "end_ratio": None, "points": int(e.size)}
    idx = np.unique(np.geomspace(first + 1, e.size, num=min(200, e.size - first)).astype(int)) - 1
    x = e[idx]
    pi_x = idx + 1.0
    A = np.vstack([np.log(np.log(x)), np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, np.log(pi_x / x), rcond=None)
    X = float(e[-1])
    return {"fitted_alpha": float(coef[0]),
            "end_ratio": float(e.size / (X * math.log(X) ** alpha)),
            "points": int(e.size)}
