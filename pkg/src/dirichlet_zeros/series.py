"""Truncated power and Laurent series about s = 1, and the expansion pipeline.

A ``TruncatedSeries`` stores the coefficients of x**low, ..., x**order_cap
where x = s - 1.  Coefficients may be floats, ``Fraction`` or sympy
expressions; the arithmetic only uses ring operations plus division by the
leading coefficient, so the same code produces numeric values and the exact
rational skeleton in the Stieltjes variables g0, g1, ....

Truncation is never silent: every result carries the highest power it
actually knows, and a product is only known as far as its least-known
factor allows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Any, Sequence

import sympy

from .errors import DegeneracyError, DomainError, PrecisionError
from .zeta import StieltjesTable, stieltjes_constants

DEFAULT_ORDER = 10


def _norm(c):
    if isinstance(c, bool):
        c = int(c)
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, sympy.Basic):
        return sympy.expand(c)
    return c


def _is_zero(c) -> bool:
    if isinstance(c, sympy.Basic):
        return sympy.expand(c) == 0
    return c == 0


class TruncatedSeries:
    """sum_{k=low}^{order_cap} coeffs[k-low] x**k  +  O(x**(order_cap+1))."""

    __slots__ = ("low", "coeffs", "order_cap")

    def __init__(self, coeffs: Sequence[Any], order_cap: int | None = None, low: int = 0):
        coeffs = [_norm(c) for c in coeffs]
        if order_cap is None:
            order_cap = low + len(coeffs) - 1
        known = order_cap - low + 1
        if known < 0:
            raise DomainError("order_cap below the lowest stored power")
        if len(coeffs) > known:
            coeffs = coeffs[:known]
        elif len(coeffs) < known:
            coeffs = coeffs + [Fraction(0)] * (known - len(coeffs))
        self.low = int(low)
        self.coeffs = tuple(coeffs)
        self.order_cap = int(order_cap)

    # -- construction helpers ------------------------------------------------
    @classmethod
    def constant(cls, c, order_cap: int) -> TruncatedSeries:
        return cls([c], order_cap=order_cap)

    @classmethod
    def variable(cls, order_cap: int) -> TruncatedSeries:
        return cls([0, 1], order_cap=order_cap)

    @property
    def pole_order(self) -> int:
        return max(0, -self.low)

    def coefficient(self, k: int):
        if k > self.order_cap:
            raise DomainError(f"x^{k} lies beyond order_cap {self.order_cap}")
        if k < self.low:
            return Fraction(0)
        return self.coeffs[k - self.low]

    def __getitem__(self, k: int):
        return self.coefficient(k)

    def __repr__(self) -> str:
        terms = ", ".join(f"x^{self.low + i}: {c}" for i, c in enumerate(self.coeffs))
        return f"TruncatedSeries({{{terms}}}, order_cap={self.order_cap})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.order_cap != other.order_cap:
            return False
        lo = min(self.low, other.low)
        return all(_is_zero(self.coefficient(k) - other.coefficient(k))
                   for k in range(lo, self.order_cap + 1))

    __hash__ = None

    def truncate(self, order_cap: int) -> TruncatedSeries:
        if order_cap > self.order_cap:
            raise DomainError("cannot extend a truncated series")
        return TruncatedSeries(self.coeffs, order_cap=order_cap, low=self.low)

    def map(self, fn) -> TruncatedSeries:
        return TruncatedSeries([fn(c) for c in self.coeffs], self.order_cap, self.low)

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(other, self.order_cap)

    def __add__(self, other):
        other = self._coerce(other)
        lo = min(self.low, other.low)
        cap = min(self.order_cap, other.order_cap)
        coeffs = [self.coefficient(k) + other.coefficient(k) for k in range(lo, cap + 1)]
        return TruncatedSeries(coeffs, order_cap=cap, low=lo)

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.map(lambda c: c * other)
        low = self.low + other.low
        known = min(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs, other.coeffs
        out = []
        for n in range(known):
            acc = Fraction(0)
            for u in range(n + 1):
                acc = acc + a[u] * b[n - u]
            out.append(acc)
        return TruncatedSeries(out, order_cap=low + known - 1, low=low)

    __rmul__ = __mul__

    def shift(self, k: int) -> TruncatedSeries:
        """Multiply by x**k."""
        return TruncatedSeries(self.coeffs, order_cap=self.order_cap + k, low=self.low + k)

    def rescale(self, factor) -> TruncatedSeries:
        """Substitute x -> factor * x."""
        return TruncatedSeries([c * factor ** (self.low + i) for i, c in enumerate(self.coeffs)],
                               self.order_cap, self.low)

    def reciprocal(self) -> TruncatedSeries:
        a = self.coeffs
        if not a or _is_zero(a[0]):
            raise DegeneracyError("reciprocal of a series with zero leading coefficient")
        inv0 = _norm(1 / a[0]) if not isinstance(a[0], Fraction) else Fraction(1) / a[0]
        d = [inv0]
        for n in range(1, len(a)):
            acc = Fraction(0)
            for k in range(1, n + 1):
                acc = acc + a[k] * d[n - k]
            d.append(_norm(-acc * inv0))
        return TruncatedSeries(d, order_cap=-self.low + len(a) - 1, low=-self.low)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        if isinstance(other, int):
            other = Fraction(other)
        return self.map(lambda c: c / other)

    def derivative(self) -> TruncatedSeries:
        out = [(self.low + i) * c for i, c in enumerate(self.coeffs)]
        if self.low == 0:
            return TruncatedSeries(out[1:], order_cap=self.order_cap - 1, low=0)
        return TruncatedSeries(out, order_cap=self.order_cap - 1, low=self.low - 1)

    def integrate(self) -> TruncatedSeries:
        """Antiderivative with zero constant term; needs no x**-1 term."""
        if self.low < 0 and not _is_zero(self.coefficient(-1)):
            raise DomainError("antiderivative of x^-1 is not a Laurent series")
        out = [c / Fraction(self.low + i + 1) if self.low + i != -1 else Fraction(0)
               for i, c in enumerate(self.coeffs)]
        return TruncatedSeries(out, order_cap=self.order_cap + 1, low=self.low + 1)

    def compose(self, inner: TruncatedSeries) -> TruncatedSeries:
        """self(inner(x)) for a power series self and inner(0) == 0."""
        return series_compose(self, inner)

    def sqrt(self) -> TruncatedSeries:
        return series_sqrt(self)

    def evaluate(self, x: float) -> float:
        return sum(float(c) * x ** (self.low + i) for i, c in enumerate(self.coeffs))


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_reciprocal(a: TruncatedSeries) -> TruncatedSeries:
    return a.reciprocal()


def series_compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """Horner evaluation of outer(inner), truncated where it stops being known."""
    if outer.low < 0:
        raise DomainError("outer series must be a power series")
    if inner.low < 0 or not _is_zero(inner.coefficient(0) if inner.low <= 0 else 0):
        raise DomainError("inner series must vanish at x = 0")
    valuation = None
    for k in range(max(inner.low, 1), inner.order_cap + 1):
        if not _is_zero(inner.coefficient(k)):
            valuation = k
            break
    if valuation is None:
        return TruncatedSeries([outer.coefficient(0)], order_cap=inner.order_cap)
    cap = min(inner.order_cap, (outer.order_cap + 1) * valuation - 1)
    inner = inner.truncate(cap) if inner.order_cap > cap else inner
    top = min(outer.order_cap, cap // valuation)
    result = TruncatedSeries.constant(outer.coefficient(top), cap)
    for n in range(top - 1, -1, -1):
        result = result * inner + outer.coefficient(n)
    return result.truncate(cap)


def series_sqrt(a: TruncatedSeries) -> TruncatedSeries:
    """Square root of a power series with constant term exactly 1."""
    if a.low < 0 or not _is_zero(a.coefficient(0) - 1):
        raise DomainError("series_sqrt needs constant term 1")
    c = [a.coefficient(k) for k in range(0, a.order_cap + 1)]
    b = [Fraction(1)]
    half = Fraction(1, 2)
    for n in range(1, len(c)):
        acc = c[n]
        for k in range(1, n):
            acc = acc - b[k] * b[n - k]
        b.append(_norm(acc * half))
    return TruncatedSeries(b, order_cap=a.order_cap)


# -- standard series --------------------------------------------------------

def geometric_series(order_cap: int) -> TruncatedSeries:
    return TruncatedSeries([1] * (order_cap + 1))


def exp_series(order_cap: int) -> TruncatedSeries:
    return TruncatedSeries([Fraction(1, math.factorial(n)) for n in range(order_cap + 1)])


def log1p_series(order_cap: int) -> TruncatedSeries:
    return TruncatedSeries([0] + [Fraction((-1) ** (n + 1), n) for n in range(1, order_cap + 1)])


def binomial_series(alpha: Fraction, order_cap: int) -> TruncatedSeries:
    """(1 + x)**alpha."""
    coeffs, c = [], Fraction(1)
    for n in range(order_cap + 1):
        coeffs.append(c)
        c = c * (alpha - n) / (n + 1)
    return TruncatedSeries(coeffs)


# -- the zeta pipeline ------------------------------------------------------

def stieltjes_symbols(count: int) -> tuple[sympy.Symbol, ...]:
    return sympy.symbols(f"g0:{count}")


def zeta_laurent(gammas: Sequence[Any], order_cap: int) -> TruncatedSeries:
    """1/x + sum_n (-1)^n gamma_n/n! x^n through x**order_cap."""
    if len(gammas) < order_cap + 1:
        raise PrecisionError(
            f"Laurent series through x^{order_cap} needs gamma_0..gamma_{order_cap}")
    coeffs = [1] + [_norm(gammas[n] * Fraction((-1) ** n, math.factorial(n)))
                    for n in range(order_cap + 1)]
    return TruncatedSeries(coeffs, order_cap=order_cap, low=-1)


def derive_A_series(stieltjes, order_cap: int = DEFAULT_ORDER) -> TruncatedSeries:
    """A(s) with (log zeta)''(s) = (1 + A(s)) / (s-1)**2, as a series in s - 1.

    ``stieltjes`` is a StieltjesTable, a sequence of floats, or a sequence of
    sympy symbols.  Needs gamma_0 .. gamma_{order_cap-1}.
    """
    if order_cap < 2:
        raise DomainError("order_cap must be at least 2")
    gammas = stieltjes.values if isinstance(stieltjes, StieltjesTable) else tuple(stieltjes)
    if len(gammas) < order_cap:
        raise PrecisionError(
            f"A through (s-1)^{order_cap} needs gamma_0..gamma_{order_cap - 1}, "
            f"got {len(gammas)} values")
    z = zeta_laurent(gammas, order_cap - 1)
    log_deriv = z.derivative() * z.reciprocal()          # zeta'/zeta = -1/x + ...
    one_plus_A = log_deriv.derivative().shift(2)         # x^2 (zeta'/zeta)'
    A = one_plus_A - 1
    return TruncatedSeries([A.coefficient(k) for k in range(0, A.order_cap + 1)],
                           order_cap=A.order_cap)


@dataclass(frozen=True)
class ExpansionCoefficients:
    """c_0 and c_2..c_M of the small-(T-1/2) expansion of the expected count.

    ``polynomials[n]`` is pi * c_n as an exact expression in g0, g1, ... when
    the symbolic skeleton was requested.
    """

    cn: dict[int, float]
    c0: float | None = None
    polynomials: dict[int, Any] = field(default_factory=dict)

    @property
    def order(self) -> int:
        return max(self.cn) if self.cn else 1

    def coefficient(self, n: int) -> float:
        if n == 0:
            if self.c0 is None:
                raise DomainError("c0 has not been calibrated")
            return self.c0
        if n == 1:
            return 0.0
        return self.cn[n]

    def with_c0(self, c0: float) -> ExpansionCoefficients:
        return ExpansionCoefficients(dict(self.cn), c0, dict(self.polynomials))

    def tail(self, t: float) -> float:
        """sum_{n>=2} c_n t**n."""
        return math.fsum(c * t**n for n, c in self.cn.items())

    def symbolic(self, n: int) -> str:
        return format_coefficient(self.polynomials[n])


def _expansion_polynomials(A: TruncatedSeries, M: int) -> dict[int, Any]:
    if M > A.order_cap:
        raise DomainError(f"order {M} exceeds the A-series order_cap {A.order_cap}")
    b = series_sqrt(A.truncate(M) + 1)
    # (1/pi) int sqrt(1+A(2 sigma))/(2 sigma - 1) d sigma, in t = sigma - 1/2:
    # the non-logarithmic part of the integrand is (b(2t) - 1) / (2t)
    integrand = (b - 1).rescale(2).shift(-1) / 2
    antiderivative = integrand.integrate()
    return {n: -antiderivative.coefficient(n) for n in range(2, M + 1)}


def derive_expansion_coefficients(A: TruncatedSeries, M: int = DEFAULT_ORDER
                                  ) -> ExpansionCoefficients:
    """c_n for 2 <= n <= M from a numeric or symbolic A-series; c0 left unset."""
    polys = _expansion_polynomials(A, M)
    numeric = {}
    symbolic = {}
    for n, p in polys.items():
        if isinstance(p, sympy.Basic) and p.free_symbols:
            symbolic[n] = p
        else:
            numeric[n] = float(p) / math.pi
    if symbolic and not numeric:
        return ExpansionCoefficients({}, None, symbolic)
    return ExpansionCoefficients(numeric, None, symbolic)


def symbolic_expansion(M: int = DEFAULT_ORDER) -> dict[int, Any]:
    """pi * c_n as exact polynomials in g0 .. g_{M-1}."""
    A = derive_A_series(stieltjes_symbols(M), M)
    return _expansion_polynomials(A, M)


def expansion_coefficients(M: int = DEFAULT_ORDER, symbolic: bool = False,
                           precision: float = 1e-12) -> ExpansionCoefficients:
    """Numeric c_2..c_M from cached Stieltjes constants (c0 unset)."""
    table = stieltjes_constants(M - 1, precision)
    coeffs = derive_expansion_coefficients(derive_A_series(table, M), M)
    if symbolic:
        coeffs = ExpansionCoefficients(coeffs.cn, None, symbolic_expansion(M))
    return coeffs


def format_coefficient(poly) -> str:
    """Render pi*c_n as '(2*g1 + g0^2)/(2*pi)'."""
    poly = sympy.expand(poly)
    gens = sorted(poly.free_symbols, key=lambda s: int(s.name[1:]))
    if not gens:
        num, den = sympy.fraction(sympy.nsimplify(poly))
        return f"({num})/({den}*pi)" if den != 1 else f"({num})/pi"
    P = sympy.Poly(poly, *gens)
    dens = [sympy.fraction(c)[1] for c in P.coeffs()]
    D = reduce(sympy.ilcm, dens, sympy.Integer(1))
    terms = []
    for monom, coef in P.terms():
        coef = coef * D
        factors = []
        for g, e in zip(gens, monom):
            if e == 1:
                factors.append(g.name)
            elif e > 1:
                factors.append(f"{g.name}^{e}")
        terms.append((sum(monom), monom, int(coef), "*".join(factors)))
    terms.sort(key=lambda t: (t[0], tuple(-e for e in t[1])))
    out = ""
    for i, (_, _, coef, body) in enumerate(terms):
        mag = abs(coef)
        piece = body if mag == 1 else f"{mag}*{body}"
        if i == 0:
            out = ("-" if coef < 0 else "") + piece
        else:
            out += (" - " if coef < 0 else " + ") + piece
    den = "pi" if D == 1 else f"{D}*pi"
    return f"({out})/({den})"
