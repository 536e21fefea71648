"""Chain specifications and the quadratic-form matrices of the fermion problem.

Everything downstream works with the dimensionless couplings ``j_i = J_i / h``.
For a profile ``j`` of length ``N - 1`` the difference operator ``D`` is the
upper-bidiagonal matrix with ``-1`` on the diagonal and ``j_i`` above it, and
``M = D^T D`` is the symmetric tridiagonal matrix whose eigenvalues are the
squared quasiparticle energies.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidModelSize, InvalidParameter


class ModelKind(enum.Enum):
    IMPURITY = "impurity"
    JUNCTION = "junction"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value) -> "ModelKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParameter(f"unknown model kind {value!r}") from None


def _check_positive(**values):
    for name, v in values.items():
        if not np.isfinite(v) or v <= 0:
            raise InvalidParameter(f"{name} must be a positive finite number, got {v!r}")


def build_couplings(kind, n: int, j1: float, j2: float, h: float) -> np.ndarray:
    """Dimensionless bond profile ``J_i / h`` for the impurity or junction chain.

    Impurity (N even): every bond carries ``j1`` except bond ``N/2``, which
    carries ``j2``. Junction (N odd): bonds ``1..(N-1)/2`` carry ``j1`` and the
    remaining ones carry ``j2``.
    """
    kind = ModelKind.parse(kind)
    if kind is ModelKind.CUSTOM:
        raise InvalidParameter("custom profiles are given explicitly, use ChainSpec.custom")
    _check_positive(j1=j1, j2=j2, h=h)
    n = int(n)
    if n < 2:
        raise InvalidModelSize(f"need at least two sites, got n={n}")
    if kind is ModelKind.IMPURITY and n % 2:
        raise InvalidModelSize(f"impurity model needs an even number of sites, got n={n}")
    if kind is ModelKind.JUNCTION and n % 2 == 0:
        raise InvalidModelSize(f"junction model needs an odd number of sites, got n={n}")

    out = np.full(n - 1, j1 / h)
    if kind is ModelKind.IMPURITY:
        out[n // 2 - 1] = j2 / h
    else:
        out[(n - 1) // 2:] = j2 / h
    return out


@dataclass(frozen=True)
class ChainSpec:
    """Immutable description of one chain.

    ``j1``, ``j2`` and ``h`` are in energy units; ``couplings`` is the
    dimensionless profile used by every solver. For custom chains ``j1`` and
    ``j2`` are ``None``.
    """

    kind: ModelKind
    n_sites: int
    j1: Optional[float]
    j2: Optional[float]
    h: float
    couplings: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.couplings, dtype=float)
        if c.shape != (self.n_sites - 1,):
            raise InvalidParameter(
                f"expected {self.n_sites - 1} couplings for n={self.n_sites}, got shape {c.shape}")
        if np.any(~np.isfinite(c)) or np.any(c <= 0):
            raise InvalidParameter("all couplings must be positive and finite")
        c.setflags(write=False)
        object.__setattr__(self, "couplings", c)

    @classmethod
    def build(cls, kind, n: int, j1: float, j2: float, h: float) -> "ChainSpec":
        kind = ModelKind.parse(kind)
        c = build_couplings(kind, n, j1, j2, h)
        return cls(kind, int(n), float(j1), float(j2), float(h), c)

    @classmethod
    def impurity(cls, n, j1, j2, h) -> "ChainSpec":
        return cls.build(ModelKind.IMPURITY, n, j1, j2, h)

    @classmethod
    def junction(cls, n, j1, j2, h) -> "ChainSpec":
        return cls.build(ModelKind.JUNCTION, n, j1, j2, h)

    @classmethod
    def custom(cls, bonds: Sequence[float], h: float = 1.0) -> "ChainSpec":
        """Arbitrary profile; ``bonds`` are the physical couplings ``J_i``."""
        _check_positive(h=h)
        bonds = np.asarray(bonds, dtype=float)
        if bonds.ndim != 1 or bonds.size < 1:
            raise InvalidModelSize("a custom chain needs at least one bond")
        return cls(ModelKind.CUSTOM, bonds.size + 1, None, None, float(h), bonds / h)

    @property
    def center_pair(self) -> tuple[int, int]:
        """1-based sites straddling the impurity bond or the junction."""
        n = self.n_sites
        if self.kind is ModelKind.JUNCTION:
            return (n - 1) // 2, (n + 1) // 2
        return max(n // 2, 1), max(n // 2, 1) + 1

    @property
    def host_coupling(self) -> float:
        """Dimensionless host coupling (first bond for custom chains)."""
        return float(self.couplings[0])


def difference_operator(couplings) -> np.ndarray:
    """Upper-bidiagonal ``D`` with ``(D x)_i = j_i x_{i+1} - x_i``."""
    c = np.asarray(couplings, dtype=float)
    n = c.size + 1
    d = -np.eye(n)
    d[np.arange(n - 1), np.arange(1, n)] = c
    return d


def build_quadratic_form(couplings) -> np.ndarray:
    """``M = D^T D``: ``M_ii = j_{i-1}^2 + 1`` and ``M_{i,i+1} = -j_i``."""
    c = np.asarray(couplings, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise InvalidParameter("coupling vector must be a non-empty 1-d sequence")
    if np.any(c <= 0):
        raise InvalidParameter("couplings must be positive")
    n = c.size + 1
    m = np.zeros((n, n))
    m[np.arange(n), np.arange(n)] = 1.0 + np.concatenate(([0.0], c ** 2))
    m[np.arange(n - 1), np.arange(1, n)] = -c
    m[np.arange(1, n), np.arange(n - 1)] = -c
    return m
