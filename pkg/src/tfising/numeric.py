"""Generic free-fermion solution for any positive coupling profile.

The mode vectors come from two dense symmetric eigensolves: ``phi`` from
``D^T D`` and ``psi`` from ``D D^T``. Pairing them and reading off
``Lambda_j = psi_j . (-D phi_j)`` keeps near-zero energies accurate to
machine precision in absolute terms, which ``sqrt(eigenvalue)`` does not
(deep in the ordered phase the edge mode sits at ``Lambda ~ 1e-9``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConvergenceFailure, InvalidParameter, NotSymmetric, ZeroMode
from .model import ChainSpec, build_quadratic_form, difference_operator

# Energies below this fraction of max(Lambda) are treated as exact zero modes.
ZERO_MODE_RTOL = 1e-12


def eigh_symmetric(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of ``m``."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if np.max(np.abs(m - m.T), initial=0.0) > 1e-12 * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-12")
    try:
        w, v = np.linalg.eigh(0.5 * (m + m.T))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return w, v


def sign_fix(rows: np.ndarray, rtol: float = 1e-8) -> np.ndarray:
    """Flip each row so its first component above ``rtol * max|row|`` is positive."""
    rows = np.array(rows, dtype=float, copy=True)
    for r in rows:
        big = np.abs(r) > rtol * np.max(np.abs(r), initial=0.0)
        if big.any() and r[np.argmax(big)] < 0:
            r *= -1.0
    return rows


def compute_psi(phi_row, lam: float, couplings, threshold: float = 0.0) -> np.ndarray:
    """``psi_i = (phi_i - j_i phi_{i+1}) / lam`` with ``phi_{N+1} = 0``."""
    phi_row = np.asarray(phi_row, dtype=float)
    c = np.asarray(couplings, dtype=float)
    if lam <= threshold:
        raise ZeroMode(f"Lambda={lam!r} is at or below the zero-mode threshold")
    nxt = np.append(phi_row[1:], 0.0)
    return (phi_row - np.append(c, 0.0) * nxt) / lam


@dataclass(frozen=True)
class FermionSolution:
    """Quasiparticle energies with their mode matrices.

    Row ``j`` of ``phi``/``psi`` is mode ``j`` over the sites; ``lambdas`` is
    ascending and dimensionless. ``zero_modes`` lists the indices whose
    ``Lambda`` is below ``ZERO_MODE_RTOL * max(Lambda)``; their ``psi`` rows
    are kept (fixed by orthogonality and even ground-state parity) but
    observables built on them carry a warning flag.
    """

    lambdas: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    spec: ChainSpec
    method: str = "numeric"
    zero_modes: tuple = ()
    modes: Optional[tuple] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.lambdas.size

    @property
    def has_zero_mode(self) -> bool:
        return bool(self.zero_modes)

    def ground_energy(self) -> float:
        """Dimensionless ground-state energy ``-sum Lambda``."""
        return -float(np.sum(self.lambdas))

    def check(self, tol: float = 1e-9) -> dict:
        """Residuals of the defining relations; raises AssertionError above ``tol``."""
        d = difference_operator(self.spec.couplings)
        m = d.T @ d
        eye = np.eye(self.n)
        live = np.arange(self.n)
        out = {
            "phi_orth": float(np.max(np.abs(self.phi @ self.phi.T - eye))),
            "psi_orth": float(np.max(np.abs(self.psi[live] @ self.psi[live].T - eye[np.ix_(live, live)]),
                                     initial=0.0)),
            # relative to ||M||, which reaches ~(1 + j)^2
            "eigen": float(np.max(np.abs(self.phi @ m - self.lambdas[:, None] ** 2 * self.phi)))
            / max(1.0, float(np.linalg.norm(m, 2))),
            "cross": float(np.max(np.abs(self.psi[live] @ d + self.lambdas[live, None] * self.phi[live]),
                                  initial=0.0)) / max(1.0, float(np.linalg.norm(d, 2))),
        }
        bad = {k: v for k, v in out.items() if v > tol}
        if bad:
            raise AssertionError(f"solution invariants violated: {bad}")
        return out


REPAIR_RTOL = 1e-10


def _repair_unresolved(phi, psi, lambdas, w, d):
    """Rebuild ``psi`` rows that break ``D^T psi = -Lambda phi``.

    A mode whose amplitude falls below rounding somewhere in the chain can
    come out as noise even when ``Lambda`` and ``phi`` are fine.  The good
    rows span a subspace; the bad ones must live in its complement, so they
    are taken from the projection of ``-D phi`` onto that complement.
    """
    scale = max(1.0, float(np.linalg.norm(d, 2)))
    resid = np.linalg.norm(psi @ d + lambdas[:, None] * phi, axis=1)
    bad = np.nonzero(resid > REPAIR_RTOL * scale)[0]
    if bad.size == 0 or bad.size == len(psi):
        return psi, lambdas
    good = np.setdiff1d(np.arange(len(psi)), bad)
    q, _ = np.linalg.qr(psi[good].T)
    psi = psi.copy()
    lambdas = lambdas.copy()
    # larger Lambda first: -D phi is relatively more accurate there
    for j in sorted(bad, key=lambda j: -lambdas[j]):
        v = w[j] - q @ (q.T @ w[j])
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        v /= nv
        psi[j] = v
        lambdas[j] = abs(float(v @ w[j]))
        q = np.column_stack([q, v])
    return psi, lambdas


def pair_modes(phi: np.ndarray, psi_candidates: np.ndarray, d: np.ndarray):
    """Align ``psi`` rows with ``-D phi`` and read off ``Lambda``.

    Returns ``(lambdas, psi, zero_modes)``; rows are left in input order.
    """
    w = -(phi @ d.T)  # row j: -D phi_j
    psi = np.array(psi_candidates, dtype=float, copy=True)
    overlap = np.sum(psi * w, axis=1)
    norms = np.linalg.norm(w, axis=1)
    resolved = norms > ZERO_MODE_RTOL * max(float(np.max(norms, initial=0.0)), 1e-300)
    for j in np.nonzero((np.abs(overlap) < 0.5 * norms) & resolved)[0]:
        # index pairing failed (clustered energies): fall back to the direct rule.
        # Zero modes keep their null-vector candidate; -D phi is pure noise there.
        psi[j] = w[j] / norms[j]
        overlap[j] = norms[j]
    sign = np.where(overlap < 0, -1.0, 1.0)
    psi *= sign[:, None]
    lambdas = np.abs(overlap)
    psi, lambdas = _repair_unresolved(phi, psi, lambdas, w, d)
    cutoff = ZERO_MODE_RTOL * max(float(np.max(lambdas, initial=0.0)), 1e-300)
    zero = tuple(int(j) for j in np.nonzero(lambdas <= cutoff)[0])
    if psi.size and np.linalg.det(phi) * np.linalg.det(psi) < 0:
        # det(psi) det(phi) is the ground-state parity, which is even for h > 0.
        # Only a mode whose Lambda is lost in rounding can carry the wrong sign.
        psi[int(np.argmin(lambdas))] *= -1.0
    return lambdas, psi, zero


def finalize(phi, psi_candidates, spec: ChainSpec, method: str, modes=None) -> FermionSolution:
    """Shared tail of every solver: pair, sort ascending, freeze arrays."""
    d = difference_operator(spec.couplings)
    phi = sign_fix(phi)
    lambdas, psi, zero = pair_modes(phi, psi_candidates, d)
    order = np.argsort(lambdas, kind="stable")
    remap = {int(old): new for new, old in enumerate(order)}
    arrays = [np.ascontiguousarray(a[order]) for a in (lambdas, phi, psi)]
    for a in arrays:
        a.setflags(write=False)
    if modes is not None:
        modes = tuple(modes[i] for i in order)
    return FermionSolution(arrays[0], arrays[1], arrays[2], spec, method,
                           tuple(sorted(remap[z] for z in zero)), modes)


def solve_numeric(spec: ChainSpec) -> FermionSolution:
    c = spec.couplings
    if c.size == 0:
        raise InvalidParameter("chain needs at least one bond")
    d = difference_operator(c)
    _, v = eigh_symmetric(build_quadratic_form(c))
    _, u = eigh_symmetric(d @ d.T)
    return finalize(v.T, u.T, spec, "numeric")
