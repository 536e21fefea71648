"""Command-line front end: ``solve``, ``scan``, ``crossing`` and ``compare``.

Every command writes CSV (``%.12e`` floats) to ``--out`` or stdout.  A JSON
file given with ``--config`` supplies defaults using the flag names as keys;
flags on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager

import numpy as np

from .errors import IncompleteSpectrum, InvalidParameter, TfisingError, TooLarge
from .model import ChainSpec, ModelKind
from .observables import (corr_xx, corr_yy, corr_zz, energy_gap, green_matrix, magnetization_profile,
                          magnetization_total)
from .oracle import build_hamiltonian, oracle_observables
from .solvers import METHODS, solve

EXIT_OK, EXIT_USAGE, EXIT_INCOMPLETE, EXIT_ALL_FAILED, EXIT_MISMATCH = 0, 2, 3, 4, 5

MODES_HEADER = ["mode", "branch", "k_or_u_or_v", "lambda"]
SCAN_HEADER = ["model", "n", "j1", "j2", "h", "method", "gap", "mz_total",
               "site_i", "site_j", "cxx", "cyy", "czz"]
CROSSING_HEADER = ["j2", "h_star"]


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, str):
        return x
    return "%.12e" % x


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as f:
            yield f


def write_csv(path, header, rows):
    with _open_out(path) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def _floats(text: str) -> list[float]:
    return [float(t) for t in str(text).replace(",", " ").split()]


def build_spec(model: str, n, j1, j2, h, couplings=None) -> ChainSpec:
    kind = ModelKind.parse(model)
    if kind is ModelKind.CUSTOM:
        if couplings is None:
            raise InvalidParameter("custom model needs --couplings")
        bonds = couplings if isinstance(couplings, (list, tuple)) else _floats(couplings)
        if n is not None and int(n) != len(bonds) + 1:
            raise InvalidParameter(f"--n {n} does not match {len(bonds)} couplings")
        return ChainSpec.custom(bonds, h)
    if n is None or j2 is None:
        raise InvalidParameter("--n and --j2 are required for the impurity and junction models")
    return ChainSpec.build(kind, n, j1, j2, h)


# --- solve ---------------------------------------------------------------

def mode_rows(sol):
    for idx, lam in enumerate(sol.lambdas):
        branch, value = "numeric", float("nan")
        if sol.modes is not None:
            m = sol.modes[idx]
            k = getattr(m, "k1", m)  # junction modes are reported by their host momentum
            branch, value = k.branch.value, k.value
        yield idx, branch, value, float(lam)


def cmd_solve(args) -> int:
    spec = build_spec(args.model, args.n, args.j1, args.j2, args.h, args.couplings)
    sol = solve(spec, args.method)
    write_csv(args.out, MODES_HEADER, mode_rows(sol))
    return EXIT_OK


# --- scan ----------------------------------------------------------------

def point_record(model, n, j1, j2, h, method, pair=None, couplings=None):
    """One scan row; observables use the default center pair unless ``pair`` is given."""
    spec = build_spec(model, n, j1, j2, h, couplings)
    i, j = pair or spec.center_pair
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve(spec, method)
        g = green_matrix(sol)
    return [spec.kind.value, spec.n_sites, j1, j2, h, method,
            h * energy_gap(sol), magnetization_total(sol), i, j,
            corr_xx(g, i, j), corr_yy(g, i, j), corr_zz(g, i, j)]


def _default_pair(model, n) -> tuple[int, int]:
    if ModelKind.parse(model) is ModelKind.JUNCTION:
        return (n - 1) // 2, (n + 1) // 2
    return max(n // 2, 1), max(n // 2, 1) + 1


def _scan_task(task):
    model, n, j1, j2, h, method, pair = task
    try:
        return point_record(model, n, j1, j2, h, method, pair), None
    except (TfisingError, ValueError, ArithmeticError) as exc:
        nan = float("nan")
        i, j = pair or _default_pair(model, n)
        return [model, n, j1, j2, h, method, nan, nan, i, j, nan, nan, nan], f"{type(exc).__name__}: {exc}"


def grid(lo, hi, steps, log=False) -> np.ndarray:
    if steps < 1:
        raise InvalidParameter("grid needs at least one step")
    if steps == 1:
        return np.array([float(lo)])
    if log:
        if lo <= 0 or hi <= 0:
            raise InvalidParameter("logarithmic grid needs positive bounds")
        return np.geomspace(lo, hi, steps)
    return np.linspace(lo, hi, steps)


def _pool_map(fn, tasks, threads):
    if threads <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        # map keeps submission order, so output is independent of scheduling
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


def cmd_scan(args) -> int:
    model = ModelKind.parse(args.model).value
    j2s = grid(args.j2_min, args.j2_max, args.j2_steps)
    hs = grid(args.h_min, args.h_max, args.h_steps, args.log_h)
    pair = (args.site_i, args.site_j) if args.site_i is not None else None
    tasks = [(model, args.n, args.j1, float(j2), float(h), args.method, pair) for j2 in j2s for h in hs]
    results = _pool_map(_scan_task, tasks, args.threads)
    failed = 0
    for (row, err) in results:
        if err is not None:
            failed += 1
            print(f"warning: j2={row[3]:g} h={row[4]:g} failed ({err})", file=sys.stderr)
    write_csv(args.out, SCAN_HEADER, [r for r, _ in results])
    return EXIT_ALL_FAILED if failed == len(results) else EXIT_OK


# --- crossing ------------------------------------------------------------

def find_crossing(model, n, j1, j2, method="analytic", target=0.5, tol=1e-6,
                  h_lo=1e-2, h_hi=1e2) -> float:
    """Field where the mean transverse magnetization reaches ``target``.

    Bisects in ``log h`` until the bracket is narrower than ``tol``; returns
    ``nan`` when the bracket shows no sign change.
    """
    def f(h):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return magnetization_total(solve(build_spec(model, n, j1, j2, h), method)) - target

    f_lo, f_hi = f(h_lo), f(h_hi)
    if f_lo == 0:
        return h_lo
    if f_hi == 0:
        return h_hi
    if np.sign(f_lo) == np.sign(f_hi):
        return float("nan")
    while h_hi - h_lo > tol:
        mid = math.sqrt(h_lo * h_hi)
        if mid in (h_lo, h_hi):
            break
        f_mid = f(mid)
        if f_mid == 0:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            h_lo, f_lo = mid, f_mid
        else:
            h_hi, f_hi = mid, f_mid
    return 0.5 * (h_lo + h_hi)


def _crossing_task(task):
    model, n, j1, j2, method, target, tol, h_lo, h_hi = task
    try:
        return find_crossing(model, n, j1, j2, method, target, tol, h_lo, h_hi), None
    except (TfisingError, ValueError, ArithmeticError) as exc:
        return float("nan"), f"{type(exc).__name__}: {exc}"


def cmd_crossing(args) -> int:
    model = ModelKind.parse(args.model).value
    if args.j2 is not None:
        j2s = _floats(args.j2) if not isinstance(args.j2, (list, tuple)) else [float(x) for x in args.j2]
    else:
        j2s = grid(args.j2_min, args.j2_max, args.j2_steps).tolist()
    tasks = [(model, args.n, args.j1, j2, args.method, args.target, args.tol, args.h_min, args.h_max)
             for j2 in j2s]
    results = _pool_map(_crossing_task, tasks, args.threads)
    for j2, (h_star, err) in zip(j2s, results):
        if math.isnan(h_star):
            why = err or f"no crossing of {args.target} in [{args.h_min:g}, {args.h_max:g}]"
            print(f"warning: j2={j2:g}: {why}", file=sys.stderr)
    write_csv(args.out, CROSSING_HEADER, [(j2, h) for j2, (h, _) in zip(j2s, results)])
    return EXIT_OK


# --- compare -------------------------------------------------------------

def compare_table(spec: ChainSpec, methods=METHODS):
    """Rows ``(quantity, oracle, value per method...)`` plus the methods that ran."""
    i, j = spec.center_pair
    rep = oracle_observables(build_hamiltonian(spec), [(i, j)])
    ref = {"e0": rep.e0, "gap": rep.gap}
    ref.update({f"mz_{s + 1}": v for s, v in enumerate(rep.mz_site)})
    ref.update(zip((f"cxx({i},{j})", f"cyy({i},{j})", f"czz({i},{j})"), rep.correlators[(i, j)]))
    ran, columns = [], []
    for m in methods:
        try:
            sol = solve(spec, m)
        except InvalidParameter:
            continue  # no closed form for this chain
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            g = green_matrix(sol)
        vals = {"e0": sol.ground_energy(), "gap": energy_gap(sol)}
        vals.update({f"mz_{s + 1}": v for s, v in enumerate(magnetization_profile(sol))})
        vals.update({f"cxx({i},{j})": corr_xx(g, i, j), f"cyy({i},{j})": corr_yy(g, i, j),
                     f"czz({i},{j})": corr_zz(g, i, j)})
        ran.append(m)
        columns.append(vals)
    rows = [[q, v] + [c[q] for c in columns] for q, v in ref.items()]
    return rows, ran


def cmd_compare(args) -> int:
    spec = build_spec(args.model, args.n, args.j1, args.j2, args.h, args.couplings)
    rows, ran = compare_table(spec)
    out = []
    worst, worst_name = 0.0, None
    for q, ref, *vals in rows:
        dev = max(abs(v - ref) for v in vals)
        out.append([q, ref, *vals, dev])
        if dev > worst:
            worst, worst_name = dev, q
    write_csv(args.out, ["quantity", "oracle", *ran, "max_abs_dev"], out)
    print(f"max abs deviation {worst:.3e} ({worst_name or '-'}), tol {args.tol:.1e}", file=sys.stderr)
    if worst > args.tol:
        print(f"mismatch: {worst_name} deviates by {worst:.3e}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# --- parser --------------------------------------------------------------

def _common(p: argparse.ArgumentParser, crossing=False):
    p.add_argument("--config", help="JSON file with default values for these flags")
    p.add_argument("--model", default="impurity", choices=[k.value for k in ModelKind])
    p.add_argument("--n", type=int)
    p.add_argument("--j1", type=float, default=1.0)
    if not crossing:
        p.add_argument("--j2", type=float)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--couplings", help="comma separated bonds J_i for --model custom")
    p.add_argument("--method", default="analytic", choices=METHODS)
    p.add_argument("--out", default="-", help="output CSV path (default stdout)")


def _j2_range(p):
    p.add_argument("--j2-min", type=float, default=0.25)
    p.add_argument("--j2-max", type=float, default=4.0)
    p.add_argument("--j2-steps", type=int, default=9)
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfising",
                                     description="Transverse-field Ising chains with an impurity bond or a junction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="quasiparticle energies for one chain")
    _common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("scan", help="observables over a (j2, h) grid")
    _common(p)
    _j2_range(p)
    p.add_argument("--h-min", type=float, default=0.01)
    p.add_argument("--h-max", type=float, default=100.0)
    p.add_argument("--h-steps", type=int, default=25)
    p.add_argument("--log-h", action="store_true", help="geometric spacing in h")
    p.add_argument("--site-i", type=int)
    p.add_argument("--site-j", type=int)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("crossing", help="field where the mean magnetization reaches a target")
    _common(p, crossing=True)
    p.add_argument("--j2", help="comma separated list; overrides the --j2-min/max/steps range")
    _j2_range(p)
    p.add_argument("--target", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--h-min", type=float, default=0.01)
    p.add_argument("--h-max", type=float, default=100.0)
    p.set_defaults(func=cmd_crossing)

    p = sub.add_parser("compare", help="check both solvers against the spin-space oracle")
    _common(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_compare)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        with open(args.config) as f:
            cfg = {k.replace("-", "_"): v for k, v in json.load(f).items()}
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except IncompleteSpectrum as exc:
        print(f"error: {exc}", file=sys.stderr)
        for key, val in exc.diagnostics.items():
            print(f"  {key}: {val}", file=sys.stderr)
        return EXIT_INCOMPLETE
    except (InvalidParameter, TooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
