"""Acceptance criteria, each at its stated tolerance and time budget.

Every test records one PASS/FAIL line, collected in the terminal summary.
"""
import csv
import io
import math
import statistics
import time

import numpy as np
import pytest

from conftest import GRID, golden_values, record_criterion
from tfising.cli import main
from tfising.impurity import ImpurityParams, residual_impurity, residual_scale_impurity
from tfising.model import ChainSpec
from tfising.modes import Branch
from tfising.observables import (corr_xx, corr_yy, corr_zz, energy_gap, green_matrix,
                                 magnetization_profile, magnetization_total)
from tfising.oracle import build_hamiltonian, oracle_observables
from tfising.solvers import solve
from tfising.transfer import segment_deviation

pytestmark = pytest.mark.filterwarnings("ignore::tfising.observables.ZeroModeWarning")


def _grid(kind):
    return [(k, n, j2, h) for k, n, j2, h in GRID if k == kind]


def _both(kind, n, j2, h):
    spec = ChainSpec.build(kind, n, 1.0, j2, h)
    return solve(spec), solve(spec, "numeric")


def test_criterion_1_golden_two_site_point():
    expect = golden_values()
    times = []
    for _ in range(50):
        t0 = time.perf_counter()
        sol = solve(ChainSpec.custom([1.0], 1.0), "numeric")
        g = green_matrix(sol)
        got = {"lambdas": sol.lambdas, "e0": sol.ground_energy(), "gap": energy_gap(sol),
               "mz": magnetization_profile(sol), "cxx": corr_xx(g, 1, 2), "czz": corr_zz(g, 1, 2)}
        times.append(time.perf_counter() - t0)
    dev = max(float(np.max(np.abs(np.asarray(got[k]) - np.asarray(expect[k])))) for k in expect)
    elapsed = statistics.median(times)
    ok = dev < 1e-12 and elapsed < 1e-3
    record_criterion(1, ok, f"max dev {dev:.1e}, median time {elapsed * 1e3:.3f} ms")
    assert dev < 1e-12
    assert elapsed < 1e-3


_SPECTRUM_RUNS = {}


@pytest.mark.parametrize("kind", ["impurity", "junction"])
def test_criterion_2_spectrum_equivalence(kind):
    t0 = time.perf_counter()
    worst = 0.0
    for k, n, j2, h in _grid(kind):
        spec = ChainSpec.build(k, n, 1.0, j2, h)
        a = solve(spec)
        worst = max(worst, float(np.max(np.abs(np.sort(a.lambdas) - np.sort(solve(spec, "numeric").lambdas)))))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-8 and elapsed < 2.0
    _SPECTRUM_RUNS[kind] = (ok, worst, elapsed)
    record_criterion(2, all(r[0] for r in _SPECTRUM_RUNS.values()),
                     "; ".join(f"{k} dev {r[1]:.1e} in {r[2]:.2f} s" for k, r in _SPECTRUM_RUNS.items()))
    assert worst < 1e-8
    assert elapsed < 2.0


def test_criterion_3_oracle_equivalence():
    worst, slowest = 0.0, 0.0
    for kind, n, j2, h in GRID:
        t0 = time.perf_counter()
        spec = ChainSpec.build(kind, n, 1.0, j2, h)
        sol = solve(spec)
        pair = spec.center_pair
        report = oracle_observables(build_hamiltonian(spec), [pair])
        worst = max(worst, report.max_abs_deviation(sol))
        slowest = max(slowest, time.perf_counter() - t0)
    ok = worst < 1e-8 and slowest < 5.0
    record_criterion(3, ok, f"max dev {worst:.1e} over {len(GRID)} points, slowest {slowest:.2f} s")
    assert worst < 1e-8
    assert slowest < 5.0


def test_criterion_4_green_matrix_equality():
    worst = 0.0
    for point in GRID:
        a, b = _both(*point)
        worst = max(worst, float(np.max(np.abs(green_matrix(a).g - green_matrix(b).g))))
    record_criterion(4, worst < 1e-8, f"max elementwise dev {worst:.1e}")
    assert worst < 1e-8


def test_criterion_5_complex_root():
    p = ImpurityParams(10, 1.0, 2.0)
    sol = solve(ChainSpec.impurity(10, 1.0, 2.0, 1.0))
    band_top = (p.j1 + 1.0) ** 2
    numeric = solve(ChainSpec.impurity(10, 1.0, 2.0, 1.0), "numeric")
    checks = []
    for mode, lam in zip(sol.modes, sol.lambdas):
        if mode.branch is Branch.REAL:
            continue
        above = bool(np.any(np.isclose(numeric.lambdas ** 2, lam ** 2, atol=1e-9)) and lam ** 2 > band_top)
        checks.append((mode, above, abs(residual_impurity(mode, p))))
    ok = any(above and r < 1e-10 for _, above, r in checks)
    detail = ", ".join(f"{m.branch.value} {m.value:.6f} residual {r:.1e}" for m, _, r in checks) or "no complex mode"
    record_criterion(5, ok, detail)
    assert ok
    # the residual is small against its own terms too
    for mode, _, r in checks:
        assert r < 1e-10 * max(1.0, residual_scale_impurity(mode, p))


SWEEP = "0.25,0.375,0.5,0.75,1,1.5,2,3,4"


def _crossing_curve(tmp_path, model, n):
    out = tmp_path / f"{model}.csv"
    assert main(["crossing", "--model", model, "--n", str(n), "--j2", SWEEP, "--out", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))[1:]
    return [(float(a), float(b)) for a, b in rows]


def test_criterion_6_crossing_monotone(tmp_path, capsys):
    t0 = time.perf_counter()
    curves = {m: _crossing_curve(tmp_path, m, n) for m, n in (("impurity", 10), ("junction", 9))}
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    monotone = {m: all(b[1] >= a[1] for a, b in zip(c, c[1:])) and not any(math.isnan(h) for _, h in c)
                for m, c in curves.items()}
    h_unit = dict(curves["impurity"])[1.0]
    ok = all(monotone.values()) and 0.5 <= h_unit <= 2.0 and elapsed < 30.0
    record_criterion(6, ok, f"monotone {monotone}, h*(1) = {h_unit:.4f}, sweep {elapsed:.1f} s")
    assert all(monotone.values())
    assert 0.5 <= h_unit <= 2.0
    assert elapsed < 30.0


def _limit_checks():
    strong = solve(ChainSpec.impurity(10, 1.0, 1.0, 100.0))
    weak = solve(ChainSpec.impurity(10, 1.0, 1.0, 0.01))
    gs, gw = green_matrix(strong), green_matrix(weak)
    i, j = ChainSpec.impurity(10, 1.0, 1.0, 1.0).center_pair
    return {
        "mz_total(h=100) > 0.999": magnetization_total(strong) > 0.999,
        "czz(h=100) > 0.999": corr_zz(gs, i, j) > 0.999,
        "cxx(h=0.01) > 0.99": corr_xx(gw, i, j) > 0.99,
        "|cyy(h=100)| < 0.05": abs(corr_yy(gs, i, j)) < 0.05,
        "|cyy(h=0.01)| < 0.05": abs(corr_yy(gw, i, j)) < 0.05,
        # 2 min Lambda; in units of J it is smaller still
        "gap(h=0.01) < 1e-6": energy_gap(weak) < 1e-6,
    }, abs(corr_xx(gs, i, j))


def test_criterion_7_limits():
    checks, cxx_strong = _limit_checks()
    failed = [name for name, ok in checks.items() if not ok]
    cxx_ok = cxx_strong < 1e-3
    if not cxx_ok:
        failed.append(f"|cxx(h=100)| = {cxx_strong:.2e} >= 1e-3 (adjacent pair, exact value j/2)")
    record_criterion(7, not failed, "; ".join(failed) if failed else "all limits hold")
    assert not [name for name, ok in checks.items() if not ok]


@pytest.mark.xfail(strict=True, reason="the adjacent xx correlator at h=100 is j/2 = 5e-3 in the exact solution")
def test_criterion_7_strong_field_xx_below_threshold():
    _, cxx_strong = _limit_checks()
    assert cxx_strong < 1e-3


def test_criterion_8_transfer_matrix():
    worst = 0.0
    for point in GRID:
        worst = max(worst, segment_deviation(solve(ChainSpec.build(point[0], point[1], 1.0, point[2], point[3]))))
    record_criterion(8, worst < 1e-10, f"max propagation dev {worst:.1e}")
    assert worst < 1e-10


def test_criterion_9_properties(tmp_path, capsys):
    rng = np.random.default_rng(9)
    ortho, gauge, distinct = 0.0, 0.0, True
    for point in GRID:
        for sol in _both(*point):
            n = sol.n
            ortho = max(ortho, float(np.max(np.abs(sol.phi @ sol.phi.T - np.eye(n)))),
                        float(np.max(np.abs(sol.psi @ sol.psi.T - np.eye(n)))))
            s = rng.choice([-1.0, 1.0], size=n)[:, None]
            g0 = green_matrix(sol).g
            g1 = -((s * sol.psi).T @ (s * sol.phi))
            gauge = max(gauge, float(np.max(np.abs(g0 - g1))))
            if sol.modes is not None:
                keys = [(m.k1.branch, m.k1.value) if hasattr(m, "k1") else (m.branch, m.value) for m in sol.modes]
                distinct &= len(set(keys)) == len(keys)
    args = ["scan", "--n", "10", "--j2-steps", "3", "--h-steps", "5", "--log-h"]
    blobs = []
    for k, threads in enumerate((1, 1, 2)):
        out = tmp_path / f"run{k}.csv"
        assert main(args + ["--threads", str(threads), "--out", str(out)]) == 0
        blobs.append(out.read_bytes())
    capsys.readouterr()
    same = all(b == blobs[0] for b in blobs)
    ok = ortho < 1e-9 and gauge < 1e-14 and distinct and same
    record_criterion(9, ok, f"orthonormality {ortho:.1e}, gauge {gauge:.1e}, distinct roots {distinct}, "
                            f"CSV identical {same}")
    assert ortho < 1e-9
    assert gauge < 1e-14
    assert distinct
    assert same
