"""Monte Carlo zero counting for F(sigma) = sum_n X_n n^(-sigma).

Two path generators share one counting routine:

* explicit coefficients X_1..X_N, evaluated term by term (``evaluate_path``);
* a kernel sampler that draws the Gaussian process directly from its
  covariance E F(a) F(b) = Z(a + b), where Z is zeta (the untruncated
  series) or the partial sum H_N.  Values are drawn jointly at Chebyshev
  nodes on unit panels in u = log(1/(sigma - 1/2)) and the path is the
  barycentric interpolant through them.  The process is analytic in the
  strip |Im u| < pi/2, so 20 nodes per unit panel interpolate to roughly
  1e-15 relative accuracy.

Scanning is uniform in u; each trial's stream comes from
Philox(SeedSequence(seed, spawn_key=(trial,))), so results do not depend on
batch size or worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, PrecisionError
from .expected import RealInterval
from .zeta import log_power_sum

GRID_DENSITY = 2000          # scan points per unit of u
NODES_PER_PANEL = 20
TRUNCATION_CAP = 10**6
ADEQUACY_RATIO = 1e-6
BATCH = 256
_DIRECT_SUM_LIMIT = 20000


def worker_count() -> int:
    env = os.environ.get("DIRICHLET_ZEROS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError("DIRICHLET_ZEROS_THREADS must be an integer") from None
    return max(1, min(4, os.cpu_count() or 1))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent counter-based stream for one trial."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,))))


def to_u(sigma):
    return -np.log(np.asarray(sigma, dtype=float) - 0.5)


def to_sigma(u):
    return 0.5 + np.exp(-np.asarray(u, dtype=float))


# -- truncation ---------------------------------------------------------------

def truncation_adequate(N: int, sigma: float, ratio: float = ADEQUACY_RATIO) -> bool:
    """sum_{n>N} n^(-2 sigma) < ratio * sum_{n<=N} n^(-2 sigma), via integral bounds."""
    a = 2.0 * sigma
    if a <= 1.0:
        return False
    tail = N ** (1.0 - a) / (a - 1.0)
    return tail < ratio * sum_lower_bound(N, a)


def sum_lower_bound(N: int, a: float) -> float:
    """Lower bound on sum_{n<=N} n^(-a) from the integral over [1, N+1]."""
    if a == 1.0:
        return math.log(N + 1.0)
    return (1.0 - (N + 1.0) ** (1.0 - a)) / (a - 1.0)


def required_truncation(T: float, ratio: float = ADEQUACY_RATIO,
                        cap: int = TRUNCATION_CAP) -> int | None:
    """Smallest N meeting the adequacy inequality at sigma = T, or None above ``cap``."""
    if not truncation_adequate(cap, T, ratio):
        return None
    lo, hi = 1, cap
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if truncation_adequate(mid, T, ratio):
            hi = mid
        else:
            lo = mid
    return max(hi, 2)


def partial_zeta(s, N: int | None):
    """sum_{n<=N} n^(-s) for s > 1 (N=None: zeta(s))."""
    s = np.asarray(s, dtype=float)
    shape = s.shape
    flat = s.ravel()
    if N is None:
        value, trunc, rnd = log_power_sum(flat, 0.0)
        if np.any(trunc + rnd > 1e-12 * value):
            raise PrecisionError("covariance kernel not certified")
        return value.reshape(shape)
    if N <= _DIRECT_SUM_LIMIT:
        n = np.arange(1, N + 1, dtype=float)
        logn = np.log(n)
        out = np.empty_like(flat)
        for i in range(0, flat.size, 512):
            chunk = flat[i:i + 512]
            out[i:i + 512] = np.exp(-chunk[:, None] * logn[None, :]).sum(axis=1)
        return out.reshape(shape)
    if np.any(flat <= 1.0):
        raise DomainError("partial sums beyond the direct limit need s > 1")
    full, _, _ = log_power_sum(flat, 0.0)
    tail, _, _ = log_power_sum(flat, 0.0, N=N + 1, p=8, start=N + 1)
    return (full - tail).reshape(shape)


# -- explicit coefficient paths ---------------------------------------------

def sample_coefficients(N: int, rng: np.random.Generator | int) -> np.ndarray:
    """N independent standard normal coefficients X_1..X_N."""
    if N < 1:
        raise DomainError("N must be at least 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.Generator(np.random.Philox(int(rng)))
    return rng.standard_normal(N)


def evaluate_path(coeffs, sigma):
    """sum_{n<=N} X_n n^(-sigma) for scalar or array sigma > 1/2."""
    coeffs = np.asarray(coeffs, dtype=float)
    sig = np.asarray(sigma, dtype=float)
    if np.any(~(sig > 0.5)):
        raise DomainError("paths are evaluated at sigma > 1/2 only")
    logn = np.log(np.arange(1, coeffs.size + 1, dtype=float))
    flat = sig.ravel()
    out = np.empty_like(flat)
    step = max(1, 2_000_000 // max(1, coeffs.size))
    for i in range(0, flat.size, step):
        chunk = flat[i:i + step]
        out[i:i + step] = np.exp(-chunk[:, None] * logn[None, :]) @ coeffs
    return float(out[0]) if sig.ndim == 0 else out.reshape(sig.shape)


# -- counting -------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroCountSample:
    count: int
    refined_count: int
    suspect: bool
    roots: tuple[float, ...] = ()


def grid_size(interval: RealInterval, grid_points: int | None) -> int:
    length = to_u(interval.T) - to_u(interval.U)
    dense = int(math.ceil(GRID_DENSITY * length)) + 1
    return max(2, dense if grid_points is None else grid_points)


def _sign_changes(values: np.ndarray) -> np.ndarray:
    """Brackets [i, i+1] whose endpoints differ in sign (rows are paths)."""
    sgn = np.sign(values)
    return (sgn[..., :-1] * sgn[..., 1:] < 0) | ((sgn[..., 1:] == 0) & (sgn[..., :-1] != 0))


def bisect_roots(fn, lo: np.ndarray, hi: np.ndarray, tol: float) -> np.ndarray:
    """Vectorised bisection of fn on brackets [lo, hi] with a sign change."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    flo = fn(lo)
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        fm = fn(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def count_zeros(coeffs, interval: RealInterval, grid_points: int | None = None,
                bisection_tol: float = 1e-12) -> ZeroCountSample:
    """Count sign changes on a u-uniform grid, bisect each, recount on a doubled grid."""
    if not interval.finite:
        raise DomainError("count_zeros needs a finite interval")
    n = grid_size(interval, grid_points)
    u = np.linspace(to_u(interval.U), to_u(interval.T), 2 * n - 1)
    sigma = to_sigma(u)
    sigma[0], sigma[-1] = interval.U, interval.T
    values = evaluate_path(coeffs, sigma)
    coarse = values[::2]
    brackets = np.nonzero(_sign_changes(coarse))[0]
    refined = int(np.count_nonzero(_sign_changes(values)))
    sc = sigma[::2]
    roots = bisect_roots(lambda s: evaluate_path(coeffs, s),
                         np.minimum(sc[brackets], sc[brackets + 1]),
                         np.maximum(sc[brackets], sc[brackets + 1]), bisection_tol)
    count = int(brackets.size)
    return ZeroCountSample(count, refined, count != refined, tuple(sorted(roots.tolist())))


# -- kernel sampler -----------------------------------------------------------

def _cheb_nodes(m: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(m)
    theta = (2 * k + 1) * math.pi / (2 * m)
    return np.cos(theta), (-1.0) ** k * np.sin(theta)


def _barycentric(x: np.ndarray, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    diff = x[:, None] - nodes[None, :]
    exact = diff == 0
    diff[exact] = 1.0
    w = weights[None, :] / diff
    rows = exact.any(axis=1)
    w[rows] = exact[rows].astype(float)
    return w / w.sum(axis=1, keepdims=True)


class PathSampler:
    """Joint Gaussian sampling of F on [T, U] from its covariance kernel."""

    def __init__(self, interval: RealInterval, truncation: int | None = None,
                 nodes_per_panel: int = NODES_PER_PANEL):
        if not interval.finite:
            raise DomainError("sampling needs a finite interval")
        self.interval = interval
        self.truncation = truncation
        self.u_lo = float(to_u(interval.U))
        self.u_hi = float(to_u(interval.T))
        length = self.u_hi - self.u_lo
        self.panels = max(1, int(math.ceil(length - 1e-12)))
        self.edges = np.linspace(self.u_lo, self.u_hi, self.panels + 1)
        self._ref, self._w = _cheb_nodes(nodes_per_panel)
        mids = 0.5 * (self.edges[1:] + self.edges[:-1])
        halves = 0.5 * (self.edges[1:] - self.edges[:-1])
        self.node_u = (mids[:, None] + halves[:, None] * self._ref[None, :]).ravel()
        self.node_sigma = to_sigma(self.node_u)
        cov = partial_zeta(self.node_sigma[:, None] + self.node_sigma[None, :], truncation)
        cov = 0.5 * (cov + cov.T)
        lam, vec = np.linalg.eigh(cov)
        self.factor = vec * np.sqrt(np.clip(lam, 0.0, None))[None, :]
        self.size = self.node_u.size

    def draw(self, seed: int, trials: range) -> np.ndarray:
        z = np.stack([trial_rng(seed, t).standard_normal(self.size) for t in trials])
        return z @ self.factor.T

    def interpolation_matrix(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        panel = np.clip(np.searchsorted(self.edges, u, side="right") - 1, 0, self.panels - 1)
        m = self._ref.size
        B = np.zeros((u.size, self.size))
        for p in range(self.panels):
            sel = panel == p
            if not np.any(sel):
                continue
            a, b = self.edges[p], self.edges[p + 1]
            x = (2.0 * u[sel] - a - b) / (b - a)
            B[np.ix_(sel, np.arange(p * m, (p + 1) * m))] = _barycentric(x, self._ref, self._w)
        return B

    def evaluate(self, node_values: np.ndarray, sigma) -> np.ndarray:
        sig = np.atleast_1d(np.asarray(sigma, dtype=float))
        return node_values @ self.interpolation_matrix(to_u(sig)).T


@lru_cache(maxsize=16)
def _sampler(T: float, U: float, truncation: int | None) -> PathSampler:
    return PathSampler(RealInterval(T, U), truncation)


# -- simulations ----------------------------------------------------------------

@dataclass(frozen=True)
class SimulationConfig:
    """A Monte Carlo run over [T, U].

    ``truncation=None`` picks N by the adequacy rule; when that N would
    exceed the cap the untruncated kernel is used (``effective_truncation``
    is then None).  ``truncation=0`` forces the untruncated kernel.
    """

    interval: RealInterval
    trials: int = 1000
    seed: int = 0
    truncation: int | None = None
    grid_points: int | None = None
    bisection_tol: float = 1e-12

    def __post_init__(self):
        if not self.interval.finite:
            raise DomainError("simulation interval must be finite")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if self.truncation is not None and self.truncation != 0 and self.truncation < 2:
            raise DomainError("truncation N must be at least 2")
        if self.grid_points is not None and self.grid_points < 2:
            raise DomainError("grid_points must be at least 2")

    @property
    def effective_truncation(self) -> int | None:
        if self.truncation == 0:
            return None
        if self.truncation is None:
            return required_truncation(self.interval.T)
        return self.truncation


@dataclass(frozen=True)
class SimulationResult:
    config: SimulationConfig
    counts: np.ndarray
    refined_counts: np.ndarray
    suspect: np.ndarray
    roots: tuple[tuple[float, ...], ...] = field(default=())

    @property
    def suspect_rate(self) -> float:
        return float(self.suspect.mean())

    def samples(self) -> list[ZeroCountSample]:
        roots = self.roots or ((),) * len(self.counts)
        return [ZeroCountSample(int(c), int(r), bool(s), rt)
                for c, r, s, rt in zip(self.counts, self.refined_counts, self.suspect, roots)]


def _count_batch(sampler: PathSampler, config: SimulationConfig, trials: range,
                 B_fine: np.ndarray, locate: bool):
    nodes = sampler.draw(config.seed, trials)
    fine = nodes @ B_fine.T
    coarse = fine[:, ::2]
    counts = _sign_changes(coarse).sum(axis=1)
    refined = _sign_changes(fine).sum(axis=1)
    roots = []
    if locate:
        n = coarse.shape[1]
        u = np.linspace(sampler.u_lo, sampler.u_hi, n)
        sig = to_sigma(u)
        for row, vals in enumerate(coarse):
            br = np.nonzero(_sign_changes(vals))[0]

            def fn(s, row=row):
                return sampler.evaluate(nodes[row:row + 1], s)[0]
            r = bisect_roots(fn, np.minimum(sig[br], sig[br + 1]),
                             np.maximum(sig[br], sig[br + 1]), config.bisection_tol)
            roots.append(tuple(sorted(r.tolist())))
    return counts, refined, roots


def run_simulation(config: SimulationConfig, locate: bool = False) -> SimulationResult:
    """Draw ``config.trials`` paths and count their zeros on the interval."""
    iv = config.interval
    sampler = _sampler(iv.T, iv.U, config.effective_truncation)
    n = grid_size(iv, config.grid_points)
    u_fine = np.linspace(sampler.u_lo, sampler.u_hi, 2 * n - 1)
    B_fine = sampler.interpolation_matrix(u_fine)
    batches = [range(i, min(i + BATCH, config.trials)) for i in range(0, config.trials, BATCH)]
    workers = min(worker_count(), len(batches))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda b: _count_batch(sampler, config, b, B_fine, locate),
                                  batches))
    else:
        parts = [_count_batch(sampler, config, b, B_fine, locate) for b in batches]
    counts = np.concatenate([p[0] for p in parts]).astype(np.int64)
    refined = np.concatenate([p[1] for p in parts]).astype(np.int64)
    roots = tuple(r for p in parts for r in p[2])
    return SimulationResult(config, counts, refined, counts != refined, roots)


@lru_cache(maxsize=32)
def _cached_run(config: SimulationConfig) -> SimulationResult:
    return run_simulation(config)


def jackknife_mean(x: np.ndarray) -> tuple[float, float]:
    """Mean with its leave-one-out jackknife standard error."""
    x = np.asarray(x, dtype=float)
    n = x.size
    mean = float(x.mean())
    if n < 2:
        return mean, math.inf
    loo = (x.sum() - x) / (n - 1)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return mean, se


def estimate_moments(config: SimulationConfig, k: float) -> tuple[float, float]:
    """Empirical E N^k of the refined counts, with jackknife standard error."""
    if not k >= 1:
        raise DomainError("moment order must be at least 1")
    result = _cached_run(config)
    return jackknife_mean(result.refined_counts.astype(float) ** k)


def tail_probability(config: SimulationConfig, lam: float) -> tuple[float, float]:
    """P(N >= lam log(1/(T-1/2))) with binomial standard error."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    result = _cached_run(config)
    threshold = lam * math.log(1.0 / (config.interval.T - 0.5))
    hits = result.refined_counts >= threshold
    p = float(hits.mean())
    return p, math.sqrt(p * (1.0 - p) / hits.size)


# -- correlations and sign statistics -------------------------------------------

def series_correlation(sigma_k: float, sigma_l: float, truncation: int | None = None) -> float:
    """Z(sk + sl) / sqrt(Z(2 sk) Z(2 sl)) with Z = zeta or the partial sum H_N."""
    if not (sigma_k > 0.5 and sigma_l > 0.5):
        raise DomainError("correlation needs sigma > 1/2")
    z = partial_zeta(np.array([sigma_k + sigma_l, 2 * sigma_k, 2 * sigma_l]), truncation)
    return float(z[0] / math.sqrt(z[1] * z[2]))


def orthant_indicator_correlation(rho: float) -> float:
    """Correlation of 1{X>0} and 1{Y>0} for a standard Gaussian pair with corr rho."""
    if not abs(rho) < 1:
        raise DomainError("|rho| must be below 1")
    return 2.0 / math.pi * math.atan(rho / math.sqrt(1.0 - rho * rho))


def dyadic_points(R: int) -> np.ndarray:
    return 0.5 + 2.0 ** -np.arange(1, R + 1, dtype=float)


def sign_statistics(coeffs, R: int, ratio: float = ADEQUACY_RATIO) -> tuple[int, int]:
    """(S+, S-) of an explicit path along sigma_n = 1/2 + 2^-n, n <= R."""
    if R < 1:
        raise DomainError("R must be at least 1")
    coeffs = np.asarray(coeffs, dtype=float)
    sig = dyadic_points(R)
    if not truncation_adequate(coeffs.size, float(sig[-1]), ratio):
        raise DomainError(f"N = {coeffs.size} is not adequate at sigma_R = 1/2 + 2^-{R}")
    vals = evaluate_path(coeffs, sig)
    return int(np.count_nonzero(vals > 0)), int(np.count_nonzero(vals < 0))


def sample_sign_statistics(R: int, trials: int, seed: int,
                           truncation: int | None = None) -> np.ndarray:
    """Cumulative S+(r), r = 1..R, for each trial of the dyadic-point process.

    Values at the R dyadic points are drawn jointly from the covariance
    kernel, so no truncation of the series is involved unless requested.
    """
    if R < 1 or trials < 1:
        raise DomainError("R and trials must be positive")
    sig = dyadic_points(R)
    cov = partial_zeta(sig[:, None] + sig[None, :], truncation)
    lam, vec = np.linalg.eigh(0.5 * (cov + cov.T))
    factor = vec * np.sqrt(np.clip(lam, 0.0, None))[None, :]
    z = np.stack([trial_rng(seed, t).standard_normal(R) for t in range(trials)])
    vals = z @ factor.T
    return np.cumsum(vals > 0, axis=1)
