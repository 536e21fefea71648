"""Ground-state observables built from the mode matrices.

All equal-time spin correlators here reduce to determinants of blocks of
``G = -psi^T phi``.  Sites are 1-based in the public functions.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSitePair
from .numeric import FermionSolution


class ZeroModeWarning(UserWarning):
    """Observable evaluated on a solution with an unresolved zero mode."""


@dataclass(frozen=True)
class GreenMatrix:
    g: np.ndarray
    source: FermionSolution
    zero_mode_flag: bool = False

    @property
    def n(self) -> int:
        return self.g.shape[0]


def green_matrix(sol: FermionSolution) -> GreenMatrix:
    """``G_ij = -sum_q psi_qi phi_qj``."""
    g = -(sol.psi.T @ sol.phi)
    g.setflags(write=False)
    if sol.has_zero_mode:
        warnings.warn(f"solution has zero modes {sol.zero_modes}; "
                      "observables assume the even-parity ground state", ZeroModeWarning, stacklevel=2)
    return GreenMatrix(g, sol, sol.has_zero_mode)


def _check_pair(g: GreenMatrix, i: int, j: int, ordered: bool):
    n = g.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise InvalidSitePair(f"sites ({i}, {j}) outside 1..{n}")
    if ordered and i >= j:
        raise InvalidSitePair(f"need i < j, got ({i}, {j})")
    if i == j:
        raise InvalidSitePair(f"need distinct sites, got ({i}, {j})")


def corr_xx(g: GreenMatrix, i: int, j: int) -> float:
    """``<sx_i sx_j>``: determinant over rows ``i..j-1`` and columns ``i+1..j``."""
    _check_pair(g, i, j, ordered=True)
    return float(np.linalg.det(g.g[i - 1:j - 1, i:j]))


def corr_yy(g: GreenMatrix, i: int, j: int) -> float:
    """``<sy_i sy_j>``: determinant over rows ``i+1..j`` and columns ``i..j-1``."""
    _check_pair(g, i, j, ordered=True)
    return float(np.linalg.det(g.g[i:j, i - 1:j - 1]))


def corr_zz(g: GreenMatrix, i: int, j: int) -> float:
    """``<sz_i sz_j> = G_ii G_jj - G_ji G_ij``."""
    _check_pair(g, i, j, ordered=False)
    a, b = i - 1, j - 1
    return float(g.g[a, a] * g.g[b, b] - g.g[b, a] * g.g[a, b])


def magnetization_profile(sol: FermionSolution) -> np.ndarray:
    """``<sz_i>`` for every site, ``1 - 2 sum_q ((psi_qi - phi_qi) / 2)^2``."""
    return 1.0 - 2.0 * np.sum(((sol.psi - sol.phi) / 2.0) ** 2, axis=0)


def magnetization_site(sol: FermionSolution, i: int) -> float:
    if not 1 <= i <= sol.n:
        raise InvalidSitePair(f"site {i} outside 1..{sol.n}")
    return float(magnetization_profile(sol)[i - 1])


def magnetization_total(sol: FermionSolution) -> float:
    """Mean transverse magnetization over the chain."""
    return float(np.mean(magnetization_profile(sol)))


def energy_gap(sol: FermionSolution) -> float:
    """``2 min Lambda`` in units of the field."""
    return 2.0 * float(np.min(sol.lambdas))
