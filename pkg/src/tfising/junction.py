"""Analytic solution of two half-chains joined at the centre.

Sites ``1..(N-1)/2`` follow the host sinusoid in ``k1`` and sites
``(N+1)/2..N`` the sinusoid ``sin(k2 (N + 1 - i))``. Equal energies on both
sides tie ``k2`` to ``k1``; the row at site ``(N+1)/2`` gives the single
residual in ``k1`` that is root-searched.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AnsatzSingular, IncompleteSpectrum, InvalidModelSize, InvalidParameter
from .impurity import GRID_PER_SITE, REFINEMENTS, _distinct
from .model import ChainSpec, ModelKind
from .modes import (admissible, IMAG_TOL, Branch, QuasiMomentum, branch_limits, cos_k, dispersion, dispersion_raw,
                    gershgorin_max, realify, scan_interval, scan_roots, edge_bound, energy_samples, segment_from_anchor, sin_kx)
from .numeric import FermionSolution, finalize


@dataclass(frozen=True)
class JunctionParams:
    n: int
    j1: float
    j2: float

    def __post_init__(self):
        if self.n < 5 or self.n % 2 == 0:
            raise InvalidModelSize(f"junction chain needs an odd n >= 5, got {self.n}")
        if not (self.j1 > 0 and self.j2 > 0):
            raise InvalidParameter("j1 and j2 must be positive")

    @classmethod
    def from_spec(cls, spec: ChainSpec) -> "JunctionParams":
        if spec.kind is not ModelKind.JUNCTION:
            raise InvalidParameter(f"expected a junction chain, got {spec.kind.value}")
        return cls(spec.n_sites, spec.j1 / spec.h, spec.j2 / spec.h)

    @property
    def couplings(self) -> np.ndarray:
        c = np.full(self.n - 1, self.j1)
        c[(self.n - 1) // 2:] = self.j2
        return c

    @property
    def u_max(self) -> float:
        return 5.0 + math.log(max(self.j1, self.j2) + 2.0)

    def swapped(self) -> "JunctionParams":
        return JunctionParams(self.n, self.j2, self.j1)


@dataclass(frozen=True)
class ModePair:
    k1: QuasiMomentum
    k2: QuasiMomentum
    lam: float


def _cos_k2(cos_k1, p: JunctionParams):
    return (p.j2 ** 2 - p.j1 ** 2 + 2.0 * p.j1 * cos_k1) / (2.0 * p.j2)


def pair_k2(k1: QuasiMomentum, p: JunctionParams) -> QuasiMomentum:
    """Partner mode on the ``j2`` side with the same energy as ``k1`` on the ``j1`` side."""
    dispersion(k1, p.j1)
    return QuasiMomentum.from_cos(float(_cos_k2(k1.cos(), p)))


def _sin_ratio_scalar(c: float, x: int) -> float:
    mode = QuasiMomentum.from_cos(c)
    den = mode.sin(1)
    if abs(den) < 1e-300:
        return x * math.copysign(1.0, c) ** (x - 1)
    return float(realify(mode.sin(x) / den, "k2 sine ratio"))


def _sin_ratio_from_cos(c, x: int):
    """``sin(k x) / sin(k)`` for ``cos k = c``, element-wise over branches."""
    if np.ndim(c) == 0:
        return _sin_ratio_scalar(float(c), x)
    c = np.atleast_1d(np.asarray(c, dtype=float))
    out = np.empty(c.shape)
    masks = {Branch.REAL: np.abs(c) <= 1.0, Branch.IMAG: c > 1.0, Branch.PI_IMAG: c < -1.0}
    for branch, m in masks.items():
        if not m.any():
            continue
        cc = c[m]
        t = np.arccos(cc) if branch is Branch.REAL else np.arccosh(np.abs(cc))
        num, den = sin_kx(branch, t, x), sin_kx(branch, t, 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = num / den
        edge = np.abs(den) < 1e-300
        # sin k -> 0 only at cos k = +-1, where the ratio tends to x (+-1)^(x-1)
        r[edge] = x * np.sign(cc[edge]) ** (x - 1)
        out[m] = realify(r, f"k2 sine ratio on {branch.value}")
    return out


def _residual_core(branch: Branch, t, p: JunctionParams):
    n, j1 = p.n, p.j1
    lo, mid, hi = (n - 1) // 2, (n + 1) // 2, (n + 3) // 2
    s1 = {x: sin_kx(branch, t, x) for x in (1, lo, mid, hi)}
    c2 = _cos_k2(cos_k(branch, t), p)
    r_lo, r_mid = _sin_ratio_from_cos(c2, lo), _sin_ratio_from_cos(c2, mid)
    left = (p.j2 / p.j1) * r_lo * (s1[mid] - j1 * s1[lo]) / s1[1]
    right = r_mid * (s1[hi] - j1 * s1[mid]) / s1[1]
    w = left - right
    if np.ndim(w) == 0:
        return float(realify(w, "junction residual", scale=abs(left) + abs(right)))
    scale = np.abs(left) + np.abs(right)
    bad = np.abs(np.imag(w)) > IMAG_TOL * np.maximum(scale, 1.0)
    if np.any(bad):
        realify(w[bad], f"junction residual on {branch.value}")
    return np.real(w)


def residual_junction(k1: QuasiMomentum, p: JunctionParams) -> float:
    """Coupled-equation residual in ``k1`` divided by ``sin k1 sin k2`` (real)."""
    dispersion(k1, p.j1)
    return float(_residual_core(k1.branch, k1.value, p))


def residual_scale_junction(k1: QuasiMomentum, p: JunctionParams) -> float:
    """Size of the terms cancelling in :func:`residual_junction`."""
    n, j1 = p.n, p.j1
    lo, mid, hi = (n - 1) // 2, (n + 1) // 2, (n + 3) // 2
    a = {x: abs(k1.sin(x)) for x in (1, lo, mid, hi)}
    c2 = _cos_k2(k1.cos(), p)
    r_lo, r_mid = abs(_sin_ratio_from_cos(c2, lo)), abs(_sin_ratio_from_cos(c2, mid))
    return ((p.j2 / j1) * r_lo * (a[mid] + j1 * a[lo]) + r_mid * (a[hi] + j1 * a[mid])) / a[1]


def find_modes_junction(p: JunctionParams, density: int = GRID_PER_SITE) -> tuple:
    """The ``N`` mode pairs ``(k1, k2)``, ordered by branch of ``k1``."""
    limits = branch_limits(p.j1, gershgorin_max(p.couplings), p.u_max)
    for factor in REFINEMENTS:
        found = {}
        for branch in Branch:
            a, b = scan_interval(branch, limits)
            roots = scan_roots(lambda t: _residual_core(branch, t, p),
                               lambda t: _residual_core(branch, t, p),
                               a, b, density * factor * p.n,
                               energy_samples(branch, p.j1, a, b, density * factor * p.n))
            found[branch] = _distinct([t for t in roots if admissible(dispersion_raw(branch, t, p.j1), p.j1)])
        total = sum(len(v) for v in found.values())
        if total >= p.n:
            break
    if total != p.n:
        from .numeric import solve_numeric

        ref = solve_numeric(ChainSpec.junction(p.n, p.j1, p.j2, 1.0))
        raise IncompleteSpectrum(
            f"found {total} mode pairs for n={p.n}",
            {"counts": {b.value: len(v) for b, v in found.items()},
             "numeric_lambdas": ref.lambdas.tolist()})
    pairs = []
    for branch in Branch:
        for t in found[branch]:
            k1 = QuasiMomentum(branch, t)
            pairs.append(ModePair(k1, pair_k2(k1, p), math.sqrt(dispersion(k1, p.j1))))
    return tuple(pairs)


def junction_phi(k1: QuasiMomentum, k2: QuasiMomentum, p: JunctionParams) -> np.ndarray:
    """Unit-norm mode vector; left segment in ``k1``, right segment in ``k2``."""
    n, j1, j2 = p.n, p.j1, p.j2
    mid = (n + 1) // 2
    s1, s2 = k1.sin, k2.sin

    def L(i):
        return s1(i) - j1 * s1(i - 1)

    right = [s2(n + 1 - i) for i in range(mid, n + 1)]
    if edge_bound(k1, j1, mid):
        # mode grows towards site 1: rebuild the left part from the junction row
        lam2 = float(dispersion_raw(k1.branch, k1.value, j1))
        before = ((1 + j1 * j1 - lam2) * right[0] - j2 * right[1]) / j1
        left = segment_from_anchor(k1, before, right[0], mid)[:-1]
        row = realify(np.concatenate([left, right]) / s2(1), f"junction mode at ({k1}, {k2})")
        return row / np.linalg.norm(row)

    rho_a = abs(L(mid)) / (abs(s1(mid)) + j1 * abs(s1(mid - 1)))
    rho_b = abs(L(mid + 1)) / (abs(s1(mid + 1)) + j1 * abs(s1(mid)))
    # decaying modes make both ratios small; only an exact zero is singular
    if rho_a >= rho_b:
        den = L(mid)
        # continuity of the host sinusoid into the first j2 site
        c = s2(n + 1 - mid) / den if den != 0 else None
    else:
        den = L(mid + 1)
        c = j2 * s2(n - mid) / (j1 * den) if den != 0 else None
    if c is None or not cmath.isfinite(c):
        raise AnsatzSingular(f"junction matching is singular at ({k1}, {k2})")
    vals = [c * L(i) if i < mid else s2(n + 1 - i) for i in range(1, n + 1)]
    row = realify(np.array(vals) / s2(1), f"junction mode at ({k1}, {k2})")
    return row / np.linalg.norm(row)


def build_solution_junction(p: JunctionParams, pairs, spec: Optional[ChainSpec] = None) -> FermionSolution:
    """Closed-form phi rows; psi from the mirrored chain with ``j1`` and ``j2`` exchanged.

    Reversing the sites maps this chain onto the junction with the two
    couplings swapped, and ``D D^T`` onto its ``D^T D``; the mirrored mode uses
    the pair ``(k2, k1)``.
    """
    if len(pairs) != p.n:
        raise IncompleteSpectrum(f"need {p.n} mode pairs, got {len(pairs)}")
    if spec is None:
        spec = ChainSpec.junction(p.n, p.j1, p.j2, 1.0)
    q = p.swapped()
    phi = np.array([junction_phi(pr.k1, pr.k2, p) for pr in pairs])
    mirror = np.array([junction_phi(pr.k2, pr.k1, q)[::-1] for pr in pairs])
    return finalize(phi, mirror, spec, "analytic", modes=tuple(pairs))


def solve_junction(spec: ChainSpec) -> FermionSolution:
    p = JunctionParams.from_spec(spec)
    return build_solution_junction(p, find_modes_junction(p), spec)
