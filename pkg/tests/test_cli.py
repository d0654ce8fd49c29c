import csv
import io
import json
import math
import subprocess
import sys

import pytest

from dirichlet_zeros.cli import SWEEP_HEADER, run, sweep_points
from dirichlet_zeros.expected import RealInterval, expected_zero_count


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def read_csv(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_expected_subcommand():
    code, out, _ = invoke("expected", "--T", "0.6", "--U", "inf", "--tol", "1e-8")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["method"] == "quadrature"
    assert doc["result"]["value"] == pytest.approx(expected_zero_count(RealInterval(0.6)).value,
                                                   abs=1e-8)
    assert doc["result"]["err"] <= 1e-8
    assert doc["manifest"]["parameters"]["U"] == "inf"
    assert len(doc["digest"]) == 64


def test_expected_expansion_method():
    code, out, _ = invoke("expected", "--T", "0.5001", "--method", "expansion")
    assert code == 0
    q = expected_zero_count(RealInterval(0.5001)).value
    assert json.loads(out)["result"]["value"] == pytest.approx(q, abs=1e-6)
    assert invoke("expected", "--T", "0.9", "--method", "expansion")[0] == 2


def test_coeffs_subcommand():
    code, out, _ = invoke("coeffs", "--order", "6")
    assert code == 0
    rows = json.loads(out)["result"]["coefficients"]
    assert [r["n"] for r in rows] == [2, 3, 4, 5, 6]
    assert rows[0]["symbolic"] == "(2*g1 + g0^2)/(2*pi)"
    assert rows[0]["numeric"] == pytest.approx(0.0298489, abs=1e-6)


def test_simulate_csv_is_reproducible(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        code, out, _ = invoke("simulate", "--T", "0.6", "--U", "1.0", "--trials", "100",
                              "--seed", "7", "--out", str(p))
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rows = read_csv(paths[0].read_text())
    assert len(rows) == 100 and rows[0].keys() == {"trial", "count", "refined_count", "suspect"}
    summary = json.loads(out)["result"]
    assert set(summary) >= {"mean", "se", "moments", "tail_probs", "suspect_rate"}
    assert set(summary["tail_probs"]) == {"1.0", "2.0", "3.0"}


def test_simulate_seed_changes_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    invoke("simulate", "--T", "0.55", "--trials", "200", "--seed", "1", "--out", str(a))
    invoke("simulate", "--T", "0.55", "--trials", "200", "--seed", "2", "--out", str(b))
    assert a.read_bytes() != b.read_bytes()


def test_alpha_subcommand(tmp_path):
    code, out, _ = invoke("alpha", "--set", "primes", "--T", "0.5001")
    res = json.loads(out)["result"]
    assert code == 0 and res["regime"]["regime"] == "critical"
    assert res["ratio_to_leading_form"] == pytest.approx(1.0, rel=0.2)
    code, out, _ = invoke("alpha", "--set", "tau-weighted", "--T", "0.6", "--U", "1.0")
    q = expected_zero_count(RealInterval(0.6, 1.0)).value
    assert json.loads(out)["result"]["value"] == pytest.approx(math.sqrt(2) * q, rel=1e-8)
    f = tmp_path / "set.txt"
    f.write_text("\n".join(str(n) for n in range(1, 201)))
    code, out, _ = invoke("alpha", "--set", f"file:{f}", "--T", "0.9", "--U", "1.2")
    assert code == 3  # a 200-term prefix cannot certify the tail
    code, out, _ = invoke("alpha", "--set", f"file:{f}", "--complete", "--T", "0.9", "--U", "1.2")
    assert code == 0 and "counting_fit" in json.loads(out)["result"]


def test_correlation_subcommand():
    code, out, _ = invoke("correlation", "--rho", "0.5")
    assert code == 0
    assert json.loads(out)["result"]["orthant_closed_form"] == pytest.approx(1 / 3)
    code, out, _ = invoke("correlation", "--sigma-k", "0.75", "--sigma-l", "1.0",
                          "--trials", "20000", "--seed", "3")
    res = json.loads(out)["result"]
    assert abs(res["series_mc"] - res["series_closed_form"]) < 3 * res["series_mc_se"]
    code, out, _ = invoke("correlation", "--dyadic", "5")
    assert len(json.loads(out)["result"]["dyadic_correlations"]) == 5


def test_sign_stats_subcommand(tmp_path):
    p = tmp_path / "s.csv"
    code, out, _ = invoke("sign-stats", "--R", "10", "--trials", "50", "--out", str(p))
    assert code == 0
    rows = read_csv(p.read_text())
    assert all(int(r["S_plus"]) + int(r["S_minus"]) == 10 for r in rows)


def test_sweep_columns():
    code, out, _ = invoke("sweep", "--start", "1e-3", "--stop", "1e-5")
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0].keys()) == SWEEP_HEADER
    assert len(rows) == 3
    for r in rows:
        assert abs(float(r["expansion_minus_quadrature"])) < 1e-6
    ratios = [float(r["ratio_to_log"]) for r in rows]
    assert all(abs(b - 1 / (2 * math.pi)) < abs(a - 1 / (2 * math.pi))
               for a, b in zip(ratios, ratios[1:]))


def test_sweep_with_monte_carlo():
    code, out, _ = invoke("sweep", "--start", "1e-1", "--stop", "1e-1", "--trials", "200")
    row = read_csv(out)[0]
    assert code == 0 and float(row["mc_se"]) > 0


def test_empty_sweep_is_header_only():
    code, out, _ = invoke("sweep", "--start", "1e-8", "--stop", "1e-2")
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines == [",".join(SWEEP_HEADER)]
    assert sweep_points(1e-2, 1e-4, 10) == pytest.approx([1e-2, 1e-3, 1e-4])


@pytest.mark.parametrize("argv,code", [
    (["expected", "--T", "0.6", "--bogus"], 1),
    (["nonsense"], 1),
    ([], 1),
    (["expected"], 1),
    (["expected", "--T", "abc"], 1),
    (["correlation"], 1),
    (["expected", "--T", "0.4"], 2),
    (["correlation", "--rho", "1.0"], 2),
    (["alpha", "--set", "file:/nonexistent/path", "--T", "0.6"], 2),
    (["alpha", "--set", "wat", "--T", "0.6"], 2),
    (["sweep", "--factor", "1"], 2),
    (["expected", "--T", "0.5000001", "--U", "2", "--tol", "1e-19"], 3),
])
def test_exit_codes(argv, code):
    got, _, err = invoke(*argv)
    assert got == code
    assert err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dirichlet_zeros", "expected", "--T", "1.0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["value"] > 0
