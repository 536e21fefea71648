"""Quasi-momenta on the three root branches and the 1-d root scanner.

A mode is ``k`` real in ``(0, pi)``, ``k = i u`` or ``k = pi - i v``. For the
two complex branches ``q = exp(i k)`` is real (``exp(-u)`` and ``-exp(v)``),
so integer multiples are evaluated exactly instead of through a rounded
``pi``; every sine is then ``(q^x - q^-x) / 2i`` in complex arithmetic.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchError, InvalidParameter, InvalidRoot

# Scan domain offset from the branch endpoints.
EDGE_EPS = 1e-9
IMAG_TOL = 1e-9


class Branch(enum.Enum):
    REAL = "real"
    IMAG = "imag"
    PI_IMAG = "pi_imag"


@dataclass(frozen=True, order=True)
class QuasiMomentum:
    branch: Branch
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise InvalidParameter(f"non-finite quasi-momentum parameter {v!r}")
        if self.branch is Branch.REAL and not 0.0 <= v <= math.pi:
            raise InvalidParameter(f"real quasi-momentum must lie in [0, pi], got {v}")
        if self.branch is not Branch.REAL and v < 0:
            raise InvalidParameter(f"branch parameter must be non-negative, got {v}")
        object.__setattr__(self, "value", v)

    @classmethod
    def real(cls, k):
        return cls(Branch.REAL, k)

    @classmethod
    def imag(cls, u):
        return cls(Branch.IMAG, u)

    @classmethod
    def pi_imag(cls, v):
        return cls(Branch.PI_IMAG, v)

    @classmethod
    def from_cos(cls, c: float) -> "QuasiMomentum":
        """Mode with ``cos k = c``; the branch follows from ``|c| <= 1``."""
        if c > 1.0:
            return cls(Branch.IMAG, math.acosh(c))
        if c < -1.0:
            return cls(Branch.PI_IMAG, math.acosh(-c))
        return cls(Branch.REAL, math.acos(c))

    @property
    def k(self) -> complex:
        if self.branch is Branch.REAL:
            return complex(self.value)
        if self.branch is Branch.IMAG:
            return 1j * self.value
        return complex(math.pi, -self.value)

    def cos(self) -> float:
        return float(cos_k(self.branch, self.value))

    def expi(self, x) -> complex:
        return complex(expi(self.branch, self.value, x))

    def sin(self, x) -> complex:
        """``sin(k x)`` as a complex number."""
        return complex(sin_kx(self.branch, self.value, x))

    def is_interior(self) -> bool:
        if self.branch is Branch.REAL:
            return 0.0 < self.value < math.pi
        return self.value > 0.0


_QUARTER = np.array([1, 1j, -1, -1j])


def expi(branch: Branch, t, x):
    """``exp(i k x)`` for branch parameter(s) ``t``; vectorised over ``t``."""
    if np.ndim(t) == 0:
        return _expi_scalar(branch, float(t), x)
    t = np.asarray(t, dtype=float)
    if branch is Branch.REAL:
        return np.exp(1j * t * x)
    if branch is Branch.IMAG:
        return np.exp(-t * x) + 0j
    twice = 2.0 * x
    if float(twice).is_integer():
        phase = _QUARTER[int(twice) % 4]
    else:
        phase = np.exp(1j * math.pi * x)
    return phase * np.exp(t * x)


def _expi_scalar(branch: Branch, t: float, x) -> complex:
    if branch is Branch.REAL:
        return cmath.exp(1j * t * x)
    if branch is Branch.IMAG:
        return complex(math.exp(-t * x))
    twice = 2.0 * x
    phase = _QUARTER[int(twice) % 4] if float(twice).is_integer() else cmath.exp(1j * math.pi * x)
    return complex(phase) * math.exp(t * x)


def _pi_phase(x):
    # (sin(pi x), cos(pi x)), exact at integer and half-integer x
    x = np.asarray(x, dtype=float)
    twice = 2.0 * x
    exact = twice == np.round(twice)
    q = np.mod(np.round(twice), 4).astype(int)
    s = np.where(exact, np.array([0.0, 1.0, 0.0, -1.0])[q], np.sin(np.pi * x))
    c = np.where(exact, np.array([1.0, 0.0, -1.0, 0.0])[q], np.cos(np.pi * x))
    return s, c


def sin_kx(branch: Branch, t, x):
    """``sin(k x)`` on a branch, in closed real/imaginary parts.

    Real ``k`` gives a real value and ``k = iu`` a purely imaginary one, with
    no rounding residue in the other component.
    """
    if np.ndim(t) == 0 and np.ndim(x) == 0:
        return _sin_scalar(branch, float(t), float(x))
    t = np.asarray(t, dtype=float)
    if branch is Branch.REAL:
        out = np.sin(t * x) + 0j
    elif branch is Branch.IMAG:
        out = 1j * np.sinh(t * x)
    else:
        # sin(pi x - i v x) = sin(pi x) cosh(v x) - i cos(pi x) sinh(v x)
        sp, cp = _pi_phase(x)
        out = sp * np.cosh(t * x) - 1j * cp * np.sinh(t * x)
    return out


def _sin_scalar(branch: Branch, t: float, x: float) -> complex:
    if branch is Branch.REAL:
        return complex(math.sin(t * x))
    if branch is Branch.IMAG:
        return complex(0.0, math.sinh(t * x))
    twice = 2.0 * x
    if twice.is_integer():
        q = int(twice) % 4
        sp, cp = (0.0, 1.0, 0.0, -1.0)[q], (1.0, 0.0, -1.0, 0.0)[q]
    else:
        sp, cp = math.sin(math.pi * x), math.cos(math.pi * x)
    return complex(sp * math.cosh(t * x), -cp * math.sinh(t * x))


def cos_k(branch: Branch, t):
    if np.ndim(t) == 0:
        t = float(t)
        return math.cos(t) if branch is Branch.REAL else math.copysign(math.cosh(t), 1.0 if branch is Branch.IMAG else -1.0)
    t = np.asarray(t, dtype=float)
    if branch is Branch.REAL:
        return np.cos(t)
    if branch is Branch.IMAG:
        return np.cosh(t)
    return -np.cosh(t)


def dispersion(mode: QuasiMomentum, j: float) -> float:
    """Squared energy ``j^2 + 1 - 2 j cos k`` of a mode on a host with coupling ``j``.

    Values within rounding of zero (``1e-12 (1 + j)^2``) are clamped; anything
    lower raises InvalidRoot.
    """
    lam2 = dispersion_raw(mode.branch, mode.value, j)
    if not admissible(lam2, j):
        raise InvalidRoot(f"{mode} gives Lambda^2 = {lam2:.3e} < 0 for j = {j}")
    return max(float(lam2), 0.0)


def admissible(lam2, j: float) -> bool:
    """``Lambda^2 >= 0`` up to the rounding of the band expression."""
    return lam2 >= -1e-12 * (1.0 + j) ** 2


def dispersion_raw(branch: Branch, t, j: float):
    # (j - 1)^2 + 2 j (1 - cos k), written to avoid cancellation on the real branch
    t = np.asarray(t, dtype=float)
    if branch is Branch.REAL:
        return (j - 1.0) ** 2 + 4.0 * j * np.sin(t / 2) ** 2
    if branch is Branch.IMAG:
        return (j - 1.0) ** 2 - 4.0 * j * np.sinh(t / 2) ** 2
    return (j + 1.0) ** 2 + 4.0 * j * np.sinh(t / 2) ** 2


EDGE_COEFF_TOL = 1e-12


def edge_bound(k: QuasiMomentum, j: float, m: int) -> bool:
    """Whether ``sin(k i) - j sin(k(i - 1))`` on sites ``1..m`` is largest at site 1.

    On the ``iu`` branch this is ``[e^{ui} A - e^{-ui} B] / 2`` with
    ``A = 1 - j e^{-u}``.  When ``A`` is at the level of the root's own
    rounding the mode is an edge state, but the direct evaluation at site
    ``m`` is swamped by ``e^{um}`` times that rounding, so the comparison has
    to be made on ``A`` itself.
    """
    if k.branch is Branch.IMAG:
        t = j * math.exp(-k.value)
        if abs(1.0 - t) <= EDGE_COEFF_TOL * (1.0 + t):
            return True
    s = k.sin
    return abs(s(m) - j * s(m - 1)) < abs(s(1))


def segment_from_anchor(k: QuasiMomentum, before: complex, last: complex, m: int) -> np.ndarray:
    """Sites ``1..m`` of the host sinusoid through ``phi_{m-1} = before`` and ``phi_m = last``.

    Walking away from the anchor is the stable direction for a mode that
    grows towards site 1, where the boundary-anchored form cancels.
    """
    i = np.arange(1, m + 1)
    s = lambda x: sin_kx(k.branch, k.value, x)
    return (last * np.array([s(x) for x in i - m + 1]) - before * np.array([s(x) for x in i - m])) / s(1)


def realify(z, what: str = "value", tol: float = IMAG_TOL, scale=None):
    """Real part of ``z`` after checking its imaginary residue is negligible."""
    z = np.asarray(z)
    ref = np.max(np.abs(z), initial=0.0) if scale is None else scale
    resid = np.max(np.abs(np.imag(z)), initial=0.0)
    if resid > tol * max(float(ref), 1.0):
        raise BranchError(f"imaginary residue {resid:.3e} in {what}")
    return np.real(z)


def bisect(f, a: float, b: float, fa=None) -> float:
    """Bisect a sign change of ``f`` on ``[a, b]`` down to adjacent floats."""
    fa = f(a) if fa is None else fa
    fb = f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise ValueError("root not bracketed")
    while True:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            return a if abs(fa) <= abs(fb) else b
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm


def _dip(f, a: float, b: float, sign: float, iters: int = 80):
    """Golden-section search for the extremum of ``f`` on ``[a, b]`` facing zero."""
    g = 0.5 * (math.sqrt(5.0) - 1.0)
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    for _ in range(iters):
        if fc <= 0.0 or fd <= 0.0 or not b - a > 4e-16 * max(1.0, abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = sign * f(d)
    return (c, fc) if fc < fd else (d, fd)


def energy_samples(branch: Branch, j: float, a: float, b: float, n: int) -> np.ndarray:
    """Branch parameters in ``[a, b]`` at ``n`` energies spaced evenly in ``Lambda``.

    Near the band edges ``Lambda`` changes quickly with the branch parameter,
    so a grid uniform in ``t`` alone can step over a cluster of modes.
    """
    lam2 = np.array([float(dispersion_raw(branch, t, j)) for t in (a, b)])
    lam = np.sqrt(np.clip(lam2, 0.0, None))
    c = (1.0 + j * j - np.linspace(lam.min(), lam.max(), int(n)) ** 2) / (2.0 * j)
    if branch is Branch.REAL:
        t = np.arccos(np.clip(c, -1.0, 1.0))
    elif branch is Branch.IMAG:
        t = np.arccosh(np.clip(c, 1.0, None))
    else:
        t = np.arccosh(np.clip(-c, 1.0, None))
    return t[(t > a) & (t < b)]


def _bracketed(f, a: float, b: float) -> float:
    # The vectorized grid and the scalar path round differently; a grid point
    # sitting on a root can flip sign between them, so fall back to that point.
    fa, fb = f(a), f(b)
    if (fa > 0) == (fb > 0) and fa != 0 and fb != 0:
        return a if abs(fa) <= abs(fb) else b
    return bisect(f, a, b, fa)


def scan_roots(f_vec, f_scalar, a: float, b: float, n: int, extra=None) -> list:
    """Roots of a continuous real function located on an ``n``-point grid.

    ``extra`` sample points inside ``[a, b]`` are merged into the grid.

    Sign changes are bisected.  A close pair of roots inside one grid cell
    leaves no sign change, only a dip of ``|f|``; each such dip is followed to
    its extremum and, if that crosses zero, both roots are bisected.
    """
    xs = np.linspace(a, b, int(n))
    if extra is not None and len(extra):
        xs = np.union1d(xs, np.asarray(extra, dtype=float))
    vals = np.asarray(f_vec(xs), dtype=float)
    fin = np.isfinite(vals)
    roots = []
    for i in range(xs.size - 1):
        if not (fin[i] and fin[i + 1]):
            continue
        if vals[i] == 0.0:
            roots.append(float(xs[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(_bracketed(f_scalar, float(xs[i]), float(xs[i + 1])))
    if vals.size and vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    mag = np.abs(vals)
    for i in range(1, xs.size - 1):
        if not (fin[i - 1] and fin[i] and fin[i + 1]):
            continue
        if not (vals[i - 1] * vals[i] > 0 and vals[i] * vals[i + 1] > 0):
            continue
        if not (mag[i] < mag[i - 1] and mag[i] <= mag[i + 1]):
            continue
        lo, hi = float(xs[i - 1]), float(xs[i + 1])
        sign = 1.0 if vals[i] > 0 else -1.0
        xm, fm = _dip(f_scalar, lo, hi, sign)
        if fm > 0.0:
            continue
        if fm == 0.0:
            roots.append(xm)
            continue
        roots.append(_bracketed(f_scalar, lo, xm))
        roots.append(_bracketed(f_scalar, xm, hi))
    return sorted(roots)


def branch_limits(j: float, lam2_max: float, floor: float) -> dict:
    """Upper ends of the ``u`` and ``v`` scans for host coupling ``j``.

    ``floor`` is the fixed cap; it is extended when the allowed energy window
    (``0 <= Lambda^2 <= lam2_max``) reaches further out on either branch.
    """
    u_edge = abs(math.log(j))
    c = (lam2_max - j * j - 1.0) / (2.0 * j)
    v_edge = math.acosh(c) if c > 1.0 else 0.0
    return {Branch.IMAG: max(floor, u_edge + 1.0), Branch.PI_IMAG: max(floor, v_edge + 1.0)}


def scan_interval(branch: Branch, limits: dict) -> tuple:
    if branch is Branch.REAL:
        return EDGE_EPS, math.pi - EDGE_EPS
    return EDGE_EPS, limits[branch]


def gershgorin_max(couplings) -> float:
    """Upper bound on the largest squared energy for a coupling profile."""
    c = np.concatenate(([0.0], np.asarray(couplings, dtype=float), [0.0]))
    rows = 1.0 + c[:-1] ** 2 + c[:-1] + c[1:]
    return float(np.max(rows))
