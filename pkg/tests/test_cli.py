import csv
import io
import json
import math

import numpy as np
import pytest

from tfising.cli import CROSSING_HEADER, MODES_HEADER, SCAN_HEADER, main, point_record


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_solve_analytic_matches_numeric(capsys):
    code, out, _ = run(capsys, "solve", "--model", "impurity", "--n", "10", "--j2", "2", "--h", "1")
    assert code == 0
    a = rows(out)
    assert a[0] == MODES_HEADER and len(a) == 11
    _, out, _ = run(capsys, "solve", "--model", "impurity", "--n", "10", "--j2", "2", "--method", "numeric")
    b = rows(out)
    np.testing.assert_allclose([float(r[3]) for r in a[1:]], [float(r[3]) for r in b[1:]], atol=1e-8)
    assert any(r[1] == "pi_imag" for r in a[1:])


def test_solve_junction_rows(capsys):
    code, out, _ = run(capsys, "solve", "--model", "junction", "--n", "9", "--j2", "0.5")
    assert code == 0 and len(rows(out)) == 10


def test_parity_is_usage_error(capsys):
    code, _, err = run(capsys, "solve", "--model", "impurity", "--n", "9", "--j2", "1")
    assert code == 2 and "even" in err


def test_bad_flag_is_usage_error(capsys):
    assert run(capsys, "solve", "--method", "bogus")[0] == 2


def test_custom_needs_numeric(capsys):
    code, _, _ = run(capsys, "solve", "--model", "custom", "--couplings", "1,2,1")
    assert code == 2
    code, out, _ = run(capsys, "solve", "--model", "custom", "--couplings", "1,2,1", "--method", "numeric")
    assert code == 0 and rows(out)[1][1] == "numeric"


def test_incomplete_spectrum_exit(capsys, monkeypatch):
    from tfising import cli
    from tfising.errors import IncompleteSpectrum

    def broken(spec, method):
        raise IncompleteSpectrum("found 9 modes", {"counts": {"real": 9}})
    monkeypatch.setattr(cli, "solve", broken)
    code, _, err = run(capsys, "solve", "--n", "10", "--j2", "2")
    assert code == 3 and "counts" in err


def test_scan_grid_and_order(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "scan", "--model", "junction", "--n", "9", "--j2-min", "0.5", "--j2-max", "2",
                     "--j2-steps", "2", "--h-min", "0.1", "--h-max", "10", "--h-steps", "3", "--log-h",
                     "--out", str(out))
    assert code == 0
    r = rows(out.read_text())
    assert r[0] == SCAN_HEADER and len(r) == 7
    assert [(float(x[3]), float(x[4])) for x in r[1:]] == [(j, h) for j in (0.5, 2.0) for h in (0.1, 1.0, 10.0)]
    assert all((x[8], x[9]) == ("4", "5") for x in r[1:])


def test_scan_single_point_equals_solve_and_observables(capsys):
    code, out, _ = run(capsys, "scan", "--n", "10", "--j2-min", "2", "--j2-steps", "1",
                       "--h-min", "0.7", "--h-steps", "1")
    assert code == 0
    got = rows(out)[1]
    ref = point_record("impurity", 10, 1.0, 2.0, 0.7, "analytic")
    assert got[6:8] == ["%.12e" % v for v in ref[6:8]]
    assert got[10:] == ["%.12e" % v for v in ref[10:]]


def test_scan_threads_byte_identical(tmp_path, capsys):
    args = ["scan", "--n", "10", "--j2-steps", "3", "--h-steps", "4", "--log-h", "--method", "numeric"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--threads", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_scan_methods_agree(capsys):
    base = ["scan", "--n", "10", "--j2-steps", "3", "--h-steps", "5", "--log-h", "--h-min", "0.1", "--h-max", "10"]
    _, a, _ = run(capsys, *base)
    _, b, _ = run(capsys, *base, "--method", "numeric")
    fa = np.array([[float(v) for v in r[6:8] + r[10:]] for r in rows(a)[1:]])
    fb = np.array([[float(v) for v in r[6:8] + r[10:]] for r in rows(b)[1:]])
    np.testing.assert_allclose(fa, fb, atol=1e-7, rtol=0)


def test_scan_failed_points_become_nan(capsys, monkeypatch):
    from tfising import cli
    from tfising.errors import IncompleteSpectrum
    real = cli.solve

    def flaky(spec, method):
        if spec.h > 1:
            raise IncompleteSpectrum("nope")
        return real(spec, method)
    monkeypatch.setattr(cli, "solve", flaky)
    code, out, err = run(capsys, "scan", "--n", "10", "--j2-steps", "1", "--j2-min", "1",
                         "--h-min", "0.5", "--h-max", "2", "--h-steps", "2")
    assert code == 0 and "warning" in err
    assert rows(out)[2][6] == "nan"
    code, _, _ = run(capsys, "scan", "--n", "10", "--j2-steps", "1", "--j2-min", "1",
                     "--h-min", "2", "--h-max", "3", "--h-steps", "2")
    assert code == 4


def test_crossing(capsys):
    code, out, _ = run(capsys, "crossing", "--n", "10", "--j2", "1")
    assert code == 0
    r = rows(out)
    assert r[0] == CROSSING_HEADER
    assert 0.5 < float(r[1][1]) < 2


def test_crossing_unreachable_target(capsys):
    code, out, err = run(capsys, "crossing", "--n", "10", "--j2", "1", "--target", "1.0")
    assert code == 0 and rows(out)[1][1] == "nan" and "warning" in err


def test_compare_two_site(capsys):
    code, out, _ = run(capsys, "compare", "--model", "custom", "--couplings", "1", "--h", "1")
    assert code == 0
    table = {r[0]: float(r[1]) for r in rows(out)[1:]}
    r5 = math.sqrt(5)
    assert table["e0"] == pytest.approx(-r5)
    assert table["gap"] == pytest.approx(r5 - 1)
    assert table["mz_1"] == pytest.approx(2 / r5)
    assert table["cxx(1,2)"] == pytest.approx(1 / r5)
    assert table["czz(1,2)"] == pytest.approx(1.0)


@pytest.mark.parametrize("argv", [["--model", "impurity", "--n", "10", "--j2", "2", "--h", "1"],
                                  ["--model", "junction", "--n", "9", "--j2", "0.5", "--h", "0.7"]])
def test_compare_passes(capsys, argv):
    code, out, _ = run(capsys, "compare", *argv)
    assert code == 0
    assert rows(out)[0] == ["quantity", "oracle", "analytic", "numeric", "max_abs_dev"]


def test_compare_mismatch_exit(capsys):
    code, _, err = run(capsys, "compare", "--n", "6", "--j2", "2", "--tol", "1e-20")
    assert code == 5 and "mismatch" in err


def test_compare_too_large(capsys):
    assert run(capsys, "compare", "--n", "14", "--j2", "2")[0] == 2


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"model": "junction", "n": 9, "j2": 2.0, "h": 0.5, "method": "numeric"}))
    code, out, _ = run(capsys, "solve", "--config", str(cfg))
    assert code == 0 and len(rows(out)) == 10 and rows(out)[1][1] == "numeric"
    code, out, _ = run(capsys, "solve", "--config", str(cfg), "--n", "7")
    assert code == 0 and len(rows(out)) == 8
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "solve", "--config", str(cfg))[0] == 2
    assert run(capsys, "solve", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "tfising", "solve", "--n", "4", "--j2", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("mode,branch")
