"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 precision error.
Every JSON document and CSV file carries a run manifest; the CSV copy omits
the timestamp so identical runs produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import DomainError, PrecisionError, ResourceError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_PRECISION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    seed: int | None = None
    artifact_version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def reproducible(self) -> dict:
        d = _jsonable(asdict(self))
        d.pop("timestamp")
        return d

    def digest(self) -> str:
        blob = json.dumps(self.reproducible(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _emit(out, manifest: RunManifest, result: dict) -> None:
    doc = {"manifest": _jsonable(asdict(manifest)), "digest": manifest.digest(),
           "result": _jsonable(result)}
    out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_csv(path: str | None, manifest: RunManifest, header: list[str], rows, out) -> None:
    buf = io.StringIO()
    buf.write("# manifest " + json.dumps(manifest.reproducible(), sort_keys=True) + "\n")
    buf.write("# digest " + manifest.digest() + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                         for v in row])
    if path is None or path == "-":
        out.write(buf.getvalue())
    else:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())


def _params(args, skip=("func", "command", "out")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# -- subcommands --------------------------------------------------------------------

def _cmd_expected(args, out):
    from .expected import RealInterval, expected_zero_count, expected_zero_count_expansion
    manifest = RunManifest("expected", _params(args))
    if args.method == "quadrature":
        q = expected_zero_count(RealInterval(args.T, args.U), args.tol)
        result = {"value": q.value, "err": q.abs_err_estimate, "method": "quadrature",
                  "subdivisions": q.subdivisions}
    else:
        if math.isfinite(args.U):
            raise DomainError("the expansion evaluates [T, inf) only; pass --U inf")
        value = expected_zero_count_expansion(args.T)
        result = {"value": value, "err": None, "method": "expansion",
                  "note": "radius and c0 are empirically validated substitutes"}
    _emit(out, manifest, result)


def _cmd_coeffs(args, out):
    from .expected import calibrate_c0
    from .series import expansion_coefficients, format_coefficient
    if args.order < 2:
        raise DomainError("--order must be at least 2")
    coeffs = expansion_coefficients(args.order, symbolic=True)
    c0 = calibrate_c0(order=args.order) if args.c0 else None
    rows = [{"n": n, "numeric": coeffs.cn[n],
             "symbolic": format_coefficient(coeffs.polynomials[n])}
            for n in sorted(coeffs.cn)]
    manifest = RunManifest("coeffs", _params(args))
    _emit(out, manifest, {"c0": c0, "c1": 0.0, "coefficients": rows,
                          "variables": "g<n> is the n-th Stieltjes constant"})


def _cmd_simulate(args, out):
    from .expected import RealInterval, expected_zero_count
    from .simulate import SimulationConfig, jackknife_mean, run_simulation
    iv = RealInterval(args.T, args.U)
    config = SimulationConfig(iv, trials=args.trials, seed=args.seed,
                              truncation=args.truncation, grid_points=args.grid)
    res = run_simulation(config)
    counts = res.refined_counts.astype(float)
    mean, se = jackknife_mean(counts)
    moments = {}
    for k in range(1, args.moment_k + 1):
        m, s = jackknife_mean(counts**k)
        moments[str(k)] = {"value": m, "se": s}
    tail = {}
    logt = math.log(1.0 / (args.T - 0.5))
    for lam in args.lam:
        hits = counts >= lam * logt
        p = float(hits.mean())
        tail[repr(lam)] = {"value": p, "se": math.sqrt(p * (1 - p) / hits.size)}
    manifest = RunManifest("simulate", _params(args), seed=args.seed)
    rows = [(i, int(c), int(r), int(s)) for i, (c, r, s)
            in enumerate(zip(res.counts, res.refined_counts, res.suspect))]
    if args.out:
        _write_csv(args.out, manifest, ["trial", "count", "refined_count", "suspect"], rows, out)
    q = expected_zero_count(iv)
    _emit(out, manifest, {
        "mean": mean, "se": se, "moments": moments, "tail_probs": tail,
        "suspect_rate": res.suspect_rate, "quadrature": q.value,
        "truncation": config.effective_truncation or "untruncated kernel"})


def _parse_set(text: str, alpha: float | None, complete: bool = False):
    from .general import FrequencySet
    if text == "integers":
        return FrequencySet.integers()
    if text == "primes":
        return FrequencySet.primes()
    if text in ("tau", "tau-weighted"):
        return FrequencySet.tau_weighted()
    if text.startswith("log-power:"):
        return FrequencySet.log_power(int(text.split(":", 1)[1]))
    if text.startswith("subcritical:"):
        return FrequencySet.subcritical(float(text.split(":", 1)[1]))
    if text.startswith("file:"):
        return FrequencySet.from_file(text[5:], alpha=0.0 if alpha is None else alpha,
                                      complete=complete)
    raise DomainError(f"unknown set {text!r}")


def _cmd_alpha(args, out):
    from .expected import RealInterval
    from .general import counting_fit, expected_zero_count_alpha, regime_prediction
    fs = _parse_set(args.set, args.alpha, args.complete)
    alpha = fs.alpha if args.alpha is None else args.alpha
    q = expected_zero_count_alpha(RealInterval(args.T, args.U), fs, args.tol)
    pred = regime_prediction(alpha)
    t = args.T - 0.5
    result = {"value": q.value, "err": q.abs_err_estimate, "set": fs.name, "alpha": alpha,
              "regime": {"regime": pred.regime, "leading_form": pred.leading_form,
                         "leading_constant": pred.leading_constant}}
    if not math.isfinite(args.U):
        lead = pred.predicted(t)
        result["ratio_to_leading_form"] = None if lead is None else q.value / lead
        result["value_over_log"] = q.value / math.log(1.0 / t)
        result["value_over_sqrt_log"] = q.value / math.sqrt(math.log(1.0 / t))
    if fs.kind == "explicit":
        result["counting_fit"] = counting_fit(fs.elements, alpha)
    _emit(out, RunManifest("alpha", _params(args)), result)


def _cmd_correlation(args, out):
    from .simulate import orthant_indicator_correlation, series_correlation, trial_rng
    result = {}
    if args.rho is not None:
        result["orthant_closed_form"] = orthant_indicator_correlation(args.rho)
        if args.trials:
            rng = trial_rng(args.seed, 0)
            z = rng.standard_normal((2, args.trials))
            x = z[0]
            y = args.rho * z[0] + math.sqrt(1 - args.rho**2) * z[1]
            prod = np.sign(x) * np.sign(y)
            result["orthant_mc"] = float(prod.mean())
            result["orthant_mc_se"] = float(prod.std(ddof=1) / math.sqrt(prod.size))
    if args.sigma_k is not None and args.sigma_l is not None:
        result["series_closed_form"] = series_correlation(args.sigma_k, args.sigma_l,
                                                          args.truncation)
        if args.trials:
            from .simulate import partial_zeta
            sig = np.array([args.sigma_k, args.sigma_l])
            cov = partial_zeta(sig[:, None] + sig[None, :], args.truncation)
            L = np.linalg.cholesky(cov)
            z = trial_rng(args.seed, 1).standard_normal((args.trials, 2)) @ L.T
            r = float(np.corrcoef(z.T)[0, 1])
            result["series_mc"] = r
            result["series_mc_se"] = (1 - r * r) / math.sqrt(args.trials - 1)
    if args.dyadic:
        from .simulate import dyadic_points
        pts = dyadic_points(args.dyadic)
        table = [[series_correlation(a, b) for b in pts] for a in pts]
        result["dyadic_correlations"] = table
    if not result:
        raise UsageError("correlation: give --rho, --sigma-k/--sigma-l or --dyadic")
    _emit(out, RunManifest("correlation", _params(args), seed=args.seed), result)


def _cmd_sign_stats(args, out):
    from .simulate import jackknife_mean, sample_sign_statistics
    S = sample_sign_statistics(args.R, args.trials, args.seed)
    frac = S[:, -1] / args.R
    mean, se = jackknife_mean(frac)
    manifest = RunManifest("sign-stats", _params(args), seed=args.seed)
    if args.out:
        rows = [(i, int(s), args.R - int(s)) for i, s in enumerate(S[:, -1])]
        _write_csv(args.out, manifest, ["trial", "S_plus", "S_minus"], rows, out)
    _emit(out, manifest, {"R": args.R, "mean_S_plus_over_R": mean, "se": se})


def sweep_points(start: float, stop: float, factor: float) -> list[float]:
    """Geometric grid start, start/factor, ... down to stop (empty if start < stop)."""
    if not (start > 0 and stop > 0 and factor > 1):
        raise DomainError("sweep needs positive start/stop and factor > 1")
    pts, t = [], start
    while t >= stop * (1 - 1e-9):
        pts.append(t)
        t /= factor
    return pts


SWEEP_HEADER = ["T", "t", "quadrature", "expansion", "expansion_minus_quadrature",
                "ratio_to_log", "mc_U", "mc_quadrature", "mc_mean", "mc_se"]


def _cmd_sweep(args, out):
    from .expected import (EXPANSION_RADIUS, RealInterval, expected_zero_count,
                           expected_zero_count_expansion)
    from .simulate import SimulationConfig, jackknife_mean, run_simulation
    manifest = RunManifest("sweep", _params(args), seed=args.seed)
    rows = []
    for t in sweep_points(args.start, args.stop, args.factor):
        T = 0.5 + t
        q = expected_zero_count(RealInterval(T), args.tol).value
        e = expected_zero_count_expansion(T) if t <= EXPANSION_RADIUS else float("nan")
        row = [T, t, q, e, e - q, q / math.log(1.0 / t)]
        if args.trials and T < args.mc_U:
            iv = RealInterval(T, args.mc_U)
            res = run_simulation(SimulationConfig(iv, trials=args.trials, seed=args.seed))
            m, s = jackknife_mean(res.refined_counts)
            row += [args.mc_U, expected_zero_count(iv, args.tol).value, m, s]
        else:
            row += ["", "", "", ""]
        rows.append(row)
    _write_csv(args.out, manifest, SWEEP_HEADER, rows, out)


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dirichlet-zeros",
                description="Expected and simulated real zeros of Gaussian random Dirichlet series.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("expected", help="expected zero count on [T, U]")
    e.add_argument("--T", type=_float, required=True)
    e.add_argument("--U", type=_float, default=math.inf, help='upper end, "inf" allowed')
    e.add_argument("--tol", type=_float, default=1e-10)
    e.add_argument("--method", choices=("quadrature", "expansion"), default="quadrature")
    e.set_defaults(func=_cmd_expected)

    c = sub.add_parser("coeffs", help="expansion coefficients c_2..c_M")
    c.add_argument("--order", type=int, default=10)
    c.add_argument("--c0", action="store_true", help="also calibrate c0 by quadrature")
    c.set_defaults(func=_cmd_coeffs)

    s = sub.add_parser("simulate", help="Monte Carlo zero counts")
    s.add_argument("--T", type=_float, required=True)
    s.add_argument("--U", type=_float, default=1.0)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--grid", type=int, default=None, help="scan points (default 2000 per unit u)")
    s.add_argument("--truncation", type=int, default=None,
                   help="series length N; 0 = untruncated kernel; default by adequacy rule")
    s.add_argument("--moment-k", type=int, default=3)
    s.add_argument("--lambda", dest="lam", type=_float, action="append", default=None)
    s.add_argument("--out", default=None, help="per-trial CSV path")
    s.set_defaults(func=_cmd_simulate)

    a = sub.add_parser("alpha", help="expected zeros over a general frequency set")
    a.add_argument("--set", default="integers",
                   help="integers | primes | tau-weighted | log-power:M | subcritical:A | file:PATH")
    a.add_argument("--alpha", type=_float, default=None)
    a.add_argument("--T", type=_float, required=True)
    a.add_argument("--U", type=_float, default=math.inf)
    a.add_argument("--tol", type=_float, default=1e-8)
    a.add_argument("--complete", action="store_true",
                   help="a file: list is the whole finite set, not a prefix")
    a.set_defaults(func=_cmd_alpha)

    r = sub.add_parser("correlation", help="closed-form and Monte Carlo correlations")
    r.add_argument("--rho", type=_float, default=None)
    r.add_argument("--sigma-k", type=_float, default=None)
    r.add_argument("--sigma-l", type=_float, default=None)
    r.add_argument("--truncation", type=int, default=None)
    r.add_argument("--dyadic", type=int, default=0, help="table along 1/2 + 2^-n, n <= K")
    r.add_argument("--trials", type=int, default=0)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=_cmd_correlation)

    g = sub.add_parser("sign-stats", help="sign counts along 1/2 + 2^-n")
    g.add_argument("--R", type=int, default=20)
    g.add_argument("--trials", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=_cmd_sign_stats)

    w = sub.add_parser("sweep", help="CSV of quadrature, expansion and MC over a T grid")
    w.add_argument("--start", type=_float, default=1e-2, help="largest T - 1/2")
    w.add_argument("--stop", type=_float, default=1e-8, help="smallest T - 1/2")
    w.add_argument("--factor", type=_float, default=10.0)
    w.add_argument("--tol", type=_float, default=1e-10)
    w.add_argument("--trials", type=int, default=0)
    w.add_argument("--mc-U", type=_float, default=1.0)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--out", default=None)
    w.set_defaults(func=_cmd_sweep)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "lam", "absent") is None:
            args.lam = [1.0, 2.0, 3.0]
        args.func(args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except PrecisionError as exc:
        err.write(f"precision error: {exc}\n")
        return EXIT_PRECISION
    except (DomainError, ResourceError, OSError) as exc:
        err.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN
    return EXIT_OK


def main() -> None:
    sys.exit(run())
