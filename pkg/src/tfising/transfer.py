"""Two-term recurrence for mode amplitudes inside a homogeneous segment.

Where the bonds on both sides of site ``i`` equal ``j``, the row of
``D^T D`` gives ``phi_{i+1} = E phi_i - phi_{i-1}`` with
``E = (1 + j^2 - Lambda^2) / j``.  Writing this as a 2x2 transfer matrix
acting on ``(phi_i, phi_{i-1})`` is what produces the sinusoidal ansatz
(``E = 2 cos k``).  Here it is only used to check closed-form mode rows.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .numeric import FermionSolution

SEGMENT_TOL = 1e-10


@dataclass(frozen=True)
class TransferState:
    """Column ``(phi_i, phi_{i-1})``."""

    current: float
    previous: float

    def __post_init__(self):
        if not (np.isfinite(self.current) and np.isfinite(self.previous)):
            raise InvalidParameter("transfer state must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.current, self.previous])


def transfer_step(e: float) -> np.ndarray:
    """``[[e, -1], [1, 0]]``: maps ``(phi_i, phi_{i-1})`` to ``(phi_{i+1}, phi_i)``."""
    return np.array([[e, -1.0], [1.0, 0.0]])


def propagate(state2: TransferState, e: float, p: int) -> TransferState:
    """Apply the transfer matrix ``p - 2`` times, taking site 2 to site ``p``."""
    if p < 2:
        raise InvalidParameter(f"target site must be >= 2, got {p}")
    cur, prev = state2.current, state2.previous
    for _ in range(p - 2):
        cur, prev = e * cur - prev, cur
    return TransferState(cur, prev)


def segment_energy(j: float, lam: float) -> float:
    """Recurrence coefficient ``E = (1 + j^2 - Lambda^2) / j`` for host bond ``j``."""
    return (1.0 + j * j - lam * lam) / j


def homogeneous_runs(couplings) -> list[tuple[int, int]]:
    """Maximal runs of equal bonds with at least two members, as 0-based ``(first, last)``."""
    c = np.asarray(couplings, dtype=float)
    runs, start = [], 0
    for b in range(1, c.size + 1):
        if b == c.size or c[b] != c[start]:
            if b - start >= 2:
                runs.append((start, b - 1))
            start = b
    return runs


def _walk(seed: np.ndarray, e: float, count: int) -> list[float]:
    # seed = (phi_{s}, phi_{s+1}) in walking order; returns the next `count` sites
    state = TransferState(float(seed[1]), float(seed[0]))
    out = []
    for _ in range(count):
        state = propagate(state, e, 3)
        out.append(state.current)
    return out


def _propagate_run(row: np.ndarray, first: int, last: int, e: float) -> np.ndarray:
    # 0-based bonds first..last cover sites first..last+1; the recurrence holds
    # at the interior sites, so two seed values fix the rest of the run.
    # Rounding in the seeds grows like the hyperbolic branch of the
    # recurrence, so seed mid-run and walk outwards both ways.
    seg = row[first:last + 2]
    m = (seg.size - 2) // 2
    out = np.array(seg, dtype=float, copy=True)
    out[m + 2:] = _walk(seg[m:m + 2], e, seg.size - m - 2)
    # the recurrence is symmetric under reversing the site order
    out[:m] = _walk(seg[m:m + 2][::-1], e, m)[::-1]
    return out


def segment_deviation(sol: FermionSolution) -> float:
    """Largest gap between propagated and stored ``phi`` over all modes and runs."""
    c = np.asarray(sol.spec.couplings, dtype=float)
    worst = 0.0
    for first, last in homogeneous_runs(c):
        j = float(c[first])
        for lam, row in zip(sol.lambdas, sol.phi):
            got = _propagate_run(row, first, last, segment_energy(j, float(lam)))
            worst = max(worst, float(np.max(np.abs(got - row[first:last + 2]))))
    return worst


def check_segments(sol: FermionSolution, tol: float = SEGMENT_TOL) -> float:
    """Raise AssertionError when any segment deviates by more than ``tol``."""
    dev = segment_deviation(sol)
    if dev > tol:
        raise AssertionError(f"transfer-matrix propagation deviates by {dev:.3e}")
    return dev
