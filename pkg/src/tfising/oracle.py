"""Brute-force reference in the full 2^N spin space.

Basis state ``b`` has site ``i`` (1-based) on bit ``i - 1``; a clear bit is
``sz = +1``.  The Hamiltonian ``-sum j_i sx_i sx_{i+1} - sum sz_i`` commutes
with the product of all ``sz``, so the two parity blocks are diagonalized
separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, InvalidParameter, InvalidSitePair, TooLarge
from .model import ChainSpec
from .numeric import FermionSolution, eigh_symmetric
from .observables import corr_xx, corr_yy, corr_zz, green_matrix, magnetization_profile

MAX_SITES = 12
DEGENERATE_GAP = 1e-10


@dataclass(frozen=True)
class SpinHamiltonian:
    matrix: np.ndarray
    n_sites: int
    couplings: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def parity(self) -> np.ndarray:
        """+1 / -1 eigenvalue of the product of all ``sz`` per basis state."""
        return _signs(self.n_sites).prod(axis=0) if self.n_sites else np.ones(1)


def _signs(n: int) -> np.ndarray:
    # row i: sz eigenvalue of site i + 1 on every basis state
    b = np.arange(2 ** n)
    return np.array([1 - 2 * ((b >> i) & 1) for i in range(n)], dtype=float)


def build_hamiltonian(spec: ChainSpec) -> SpinHamiltonian:
    n = spec.n_sites
    if n > MAX_SITES:
        raise TooLarge(f"spin oracle is limited to {MAX_SITES} sites, got {n}")
    dim = 2 ** n
    b = np.arange(dim)
    h = np.zeros((dim, dim))
    h[b, b] = -_signs(n).sum(axis=0)
    for i, j in enumerate(spec.couplings):
        flipped = b ^ (0b11 << i)
        h[flipped, b] -= j
    return SpinHamiltonian(h, n, np.asarray(spec.couplings, dtype=float))


def _block_eigh(ham: SpinHamiltonian):
    par = ham.parity()
    out = []
    for sign in (1.0, -1.0):
        idx = np.nonzero(par == sign)[0]
        w, v = eigh_symmetric(ham.matrix[np.ix_(idx, idx)])
        full = np.zeros((ham.dim, idx.size))
        full[idx] = v
        out.append((w, full, np.full(idx.size, sign)))
    return out


def ground_spectrum(ham: SpinHamiltonian, m: int = 2):
    """The ``m`` lowest eigenvalues (ascending), eigenvectors (columns) and parities."""
    if not 1 <= m <= ham.dim:
        raise InvalidParameter(f"need 1 <= m <= {ham.dim}, got {m}")
    w, v, par = (np.concatenate(parts, axis=-1) for parts in zip(*_block_eigh(ham)))
    order = np.argsort(w, kind="stable")[:m]
    w, v, par = w[order], v[:, order], par[order]
    scale = max(1.0, float(np.max(np.abs(ham.matrix))))
    resid = np.linalg.norm(ham.matrix @ v - v * w, axis=0)
    if np.any(resid > 1e-9 * scale):
        raise ConvergenceFailure(f"eigenpair residual {resid.max():.2e} too large")
    return w, v, par


@dataclass(frozen=True)
class OracleReport:
    e0: float
    e1: float
    mz_site: np.ndarray
    correlators: dict = field(default_factory=dict)  # (i, j) -> (xx, yy, zz)

    @property
    def gap(self) -> float:
        return self.e1 - self.e0

    def deviations(self, sol: FermionSolution) -> dict:
        """Absolute differences to the free-fermion values, keyed by quantity."""
        g = green_matrix(sol)
        out = {
            "e0": abs(self.e0 - sol.ground_energy()),
            "gap": abs(self.gap - 2.0 * float(np.min(sol.lambdas))),
            "mz": float(np.max(np.abs(self.mz_site - magnetization_profile(sol)))),
        }
        for (i, j), (xx, yy, zz) in self.correlators.items():
            out[f"cxx({i},{j})"] = abs(xx - corr_xx(g, i, j))
            out[f"cyy({i},{j})"] = abs(yy - corr_yy(g, i, j))
            out[f"czz({i},{j})"] = abs(zz - corr_zz(g, i, j))
        return out

    def max_abs_deviation(self, sol: FermionSolution) -> float:
        return max(self.deviations(sol).values())


def oracle_observables(ham: SpinHamiltonian, pairs=()) -> OracleReport:
    """Ground-state expectations; a near-degenerate doublet is read in its even member."""
    n = ham.n_sites
    w, v, par = ground_spectrum(ham, min(2, ham.dim))
    e0 = float(w[0])
    e1 = float(w[1]) if w.size > 1 else e0
    state = v[:, 0]
    if e1 - e0 < DEGENERATE_GAP and par[0] < 0:
        state = v[:, 1]
    prob = state ** 2
    s = _signs(n)
    b = np.arange(ham.dim)
    corr = {}
    for i, j in pairs:
        if not (1 <= i < j <= n):
            raise InvalidSitePair(f"need 1 <= i < j <= {n}, got ({i}, {j})")
        si, sj = s[i - 1], s[j - 1]
        partner = state[b ^ ((1 << (i - 1)) | (1 << (j - 1)))]
        corr[(i, j)] = (float(partner @ state),
                        float(-np.sum(partner * state * si * sj)),
                        float(prob @ (si * sj)))
    return OracleReport(e0, e1, s @ prob, corr)
