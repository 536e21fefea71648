"""Single entry point choosing between the closed-form and dense solvers."""
from __future__ import annotations

from .errors import InvalidParameter
from .impurity import solve_impurity
from .junction import solve_junction
from .model import ChainSpec, ModelKind
from .numeric import FermionSolution, solve_numeric

METHODS = ("analytic", "numeric")


def solve(spec: ChainSpec, method: str = "analytic") -> FermionSolution:
    """Solve ``spec`` with the closed-form roots (``analytic``) or dense eigensolves."""
    if method == "numeric":
        return solve_numeric(spec)
    if method != "analytic":
        raise InvalidParameter(f"method must be one of {METHODS}, got {method!r}")
    if spec.kind is ModelKind.IMPURITY:
        return solve_impurity(spec)
    if spec.kind is ModelKind.JUNCTION:
        return solve_junction(spec)
    raise InvalidParameter("custom profiles have no closed form; use method='numeric'")
