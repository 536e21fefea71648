"""Analytic solution of the chain with a single modified bond at its centre.

Left of the impurity (sites ``1..N/2``) a mode is ``a * L(i)`` with
``L(i) = sin(k i) - j1 sin(k (i - 1))``, which already satisfies the first-site
condition; right of it (sites ``N/2+1..N``) it is ``R(i) = sin(k (N + 1 - i))``,
which vanishes at the virtual site ``N + 1``. Matching the two rows around the
impurity bond fixes ``a`` and yields the quantization condition

    (j2/j1)^2 s(N/2) [j1 s(N/2-1) - s(N/2)] / [j1 s(N/2) - s(N/2+1)]
        = s(N/2+1) + (j2^2 - j1^2)/j1 s(N/2),        s(x) = sin(k x).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AnsatzSingular, IncompleteSpectrum, InvalidModelSize, InvalidParameter, PoleAtK
from .model import ChainSpec, ModelKind
from .modes import (admissible, IMAG_TOL, Branch, QuasiMomentum, branch_limits, dispersion_raw,
                    gershgorin_max, realify, scan_interval, scan_roots, edge_bound, energy_samples, segment_from_anchor, sin_kx)
from .numeric import FermionSolution, finalize

GRID_PER_SITE = 40
REFINEMENTS = (1, 4, 16)
POLE_TOL = 1e-13


@dataclass(frozen=True)
class ImpurityParams:
    n: int
    j1: float
    j2: float

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise InvalidModelSize(f"impurity chain needs an even n >= 4, got {self.n}")
        if not (self.j1 > 0 and self.j2 > 0):
            raise InvalidParameter("j1 and j2 must be positive")

    @classmethod
    def from_spec(cls, spec: ChainSpec) -> "ImpurityParams":
        if spec.kind is not ModelKind.IMPURITY:
            raise InvalidParameter(f"expected an impurity chain, got {spec.kind.value}")
        return cls(spec.n_sites, spec.j1 / spec.h, spec.j2 / spec.h)

    @property
    def couplings(self) -> np.ndarray:
        c = np.full(self.n - 1, self.j1)
        c[self.n // 2 - 1] = self.j2
        return c

    @property
    def u_max(self) -> float:
        return 5.0 + math.log(max(self.j1, self.j2) + 2.0)


def _parts(branch: Branch, t, p: ImpurityParams):
    h = p.n // 2
    s_h, s_hm, s_hp = (sin_kx(branch, t, x) for x in (h, h - 1, h + 1))
    num = (p.j2 / p.j1) ** 2 * s_h * (p.j1 * s_hm - s_h)
    den = p.j1 * s_h - s_hp
    rhs = s_hp + (p.j2 ** 2 - p.j1 ** 2) / p.j1 * s_h
    return num, den, rhs


def transcendental_impurity(k: QuasiMomentum, p: ImpurityParams) -> complex:
    """LHS - RHS of the quantization condition, unscaled, in complex arithmetic."""
    num, den, rhs = (complex(z) for z in _parts(k.branch, k.value, p))
    if abs(den) < POLE_TOL:
        raise PoleAtK(f"denominator {abs(den):.2e} vanishes at {k}")
    return num / den - rhs


def residual_impurity(k: QuasiMomentum, p: ImpurityParams) -> float:
    """Quantization residual divided by ``sin k``; real on every branch.

    Dividing by ``sin k`` strips the common factor ``i`` that both sides pick
    up on the complex branches and leaves the sign structure intact.
    """
    num, den, rhs = (complex(z) for z in _parts(k.branch, k.value, p))
    s1 = complex(sin_kx(k.branch, k.value, 1))
    if abs(den / s1) < POLE_TOL:
        raise PoleAtK(f"denominator vanishes at {k}")
    z = (num / den - rhs) / s1
    return float(realify(z, f"impurity residual at {k}", scale=abs(rhs / s1)))


def residual_scale_impurity(k: QuasiMomentum, p: ImpurityParams) -> float:
    """Size of the terms cancelling in :func:`residual_impurity`.

    A first-order bound on its rounding error is ``eps`` times this value,
    which on the complex branches can be far above one.
    """
    h, j1, j2 = p.n // 2, p.j1, p.j2
    a_h, a_hm, a_hp, a_1 = (abs(k.sin(x)) for x in (h, h - 1, h + 1, 1))
    num, den, _ = (abs(complex(z)) for z in _parts(k.branch, k.value, p))
    top = (j2 / j1) ** 2 * a_h * (j1 * a_hm + a_h)
    spread = j1 * a_h + a_hp
    return (top / den + num * spread / den ** 2 + a_hp + abs(j2 ** 2 - j1 ** 2) / j1 * a_h) / a_1


def _weighted(branch: Branch, t, p: ImpurityParams):
    # residual * denominator / sin^2 k: changes sign across a root, never across a pole
    num, den, rhs = _parts(branch, t, p)
    s1 = sin_kx(branch, t, 1)
    w = (num - rhs * den) / (s1 * s1)
    if np.ndim(w) == 0:
        return float(realify(w, "weighted impurity residual", scale=abs(num) + abs(rhs * den)))
    scale = (np.abs(num) + np.abs(rhs * den)) / np.abs(s1 * s1)
    bad = np.abs(w.imag) > IMAG_TOL * np.maximum(scale, 1.0)
    if np.any(bad):
        realify(w[bad], f"weighted impurity residual on {branch.value}")
    return w.real


def _search(p: ImpurityParams, density: int):
    limits = branch_limits(p.j1, gershgorin_max(p.couplings), p.u_max)
    found = {}
    for branch in Branch:
        a, b = scan_interval(branch, limits)
        roots = scan_roots(lambda t: _weighted(branch, t, p),
                           lambda t: _weighted(branch, t, p),
                           a, b, density * p.n, energy_samples(branch, p.j1, a, b, density * p.n))
        ok = [t for t in roots if admissible(dispersion_raw(branch, t, p.j1), p.j1)]
        found[branch] = _distinct(ok)
    return found


def _distinct(values, sep=1e-10):
    out = []
    for v in sorted(values):
        if not out or v - out[-1] > sep:
            out.append(v)
    return out


def find_modes_impurity(p: ImpurityParams, density: int = GRID_PER_SITE) -> tuple:
    """The ``N`` quantized modes, real branch first, then ``iu``, then ``pi - iv``.

    The grid is refined (x4, x16) only when the first pass comes up short,
    which happens when two energies nearly coincide.
    """
    for factor in REFINEMENTS:
        found = _search(p, density * factor)
        total = sum(len(v) for v in found.values())
        if total >= p.n:
            break
    if total != p.n:
        from .numeric import solve_numeric

        ref = solve_numeric(ChainSpec.impurity(p.n, p.j1, p.j2, 1.0))
        raise IncompleteSpectrum(
            f"found {total} modes for n={p.n}",
            {"counts": {b.value: len(v) for b, v in found.items()},
             "numeric_lambdas": ref.lambdas.tolist()})
    return tuple(QuasiMomentum(b, t) for b in Branch for t in found[b])


def _matching_coefficient(k: QuasiMomentum, p: ImpurityParams) -> complex:
    """Amplitude of the left segment relative to the right one.

    Either impurity row determines it; the one with less cancellation in its
    denominator is used.
    """
    h, j1, j2 = p.n // 2, p.j1, p.j2
    s = k.sin
    L_h, L_hp = s(h) - j1 * s(h - 1), s(h + 1) - j1 * s(h)
    R_h, R_hp = s(h + 1), s(h)  # R(i) = s(N + 1 - i)
    rho_a = abs(L_hp) / (abs(s(h + 1)) + j1 * abs(s(h)))
    rho_b = abs(L_h) / (abs(s(h)) + j1 * abs(s(h - 1)))
    if rho_a >= rho_b and L_hp != 0:
        a = (j2 / j1) * R_hp / L_hp
    elif L_h != 0:
        a = ((j2 ** 2 - j1 ** 2) * R_hp + j1 * R_h) / (j2 * L_h)
    else:
        a = complex("nan")
    if not cmath.isfinite(a):
        raise AnsatzSingular(f"both matching rows are singular at {k}")
    return a


def impurity_phi(k: QuasiMomentum, p: ImpurityParams) -> np.ndarray:
    """Unit-norm real mode vector over the sites for one quasi-momentum."""
    n, h, j1, j2 = p.n, p.n // 2, p.j1, p.j2
    s = k.sin
    right = [s(n + 1 - i) for i in range(h + 1, n + 1)]
    if edge_bound(k, j1, h):
        # mode grows towards site 1: rebuild the left half from the impurity rows
        lam2 = float(dispersion_raw(k.branch, k.value, j1))
        at_h = ((1 + j2 * j2 - lam2) * right[0] - j1 * right[1]) / j2
        before = ((1 + j1 * j1 - lam2) * at_h - j2 * right[0]) / j1
        left = segment_from_anchor(k, before, at_h, h)
    else:
        a = _matching_coefficient(k, p)
        left = [a * (s(i) - j1 * s(i - 1)) for i in range(1, h + 1)]
    vals = np.concatenate([left, right]) / s(1)
    row = realify(vals, f"impurity mode at {k}")
    return row / np.linalg.norm(row)


def build_solution_impurity(p: ImpurityParams, modes, spec: Optional[ChainSpec] = None) -> FermionSolution:
    """Assemble phi, psi and Lambda from the closed-form mode vectors.

    The profile is mirror symmetric, so ``D D^T = P D^T D P`` with ``P`` the
    site reversal; ``psi_j`` is therefore the reversed ``phi_j`` up to a sign,
    fixed against ``-D phi_j``. This avoids dividing by small energies.
    """
    if len(modes) != p.n:
        raise IncompleteSpectrum(f"need {p.n} modes, got {len(modes)}")
    if spec is None:
        spec = ChainSpec.impurity(p.n, p.j1, p.j2, 1.0)
    phi = np.array([impurity_phi(k, p) for k in modes])
    return finalize(phi, phi[:, ::-1], spec, "analytic", modes=tuple(modes))


def solve_impurity(spec: ChainSpec) -> FermionSolution:
    p = ImpurityParams.from_spec(spec)
    return build_solution_impurity(p, find_modes_impurity(p), spec)
