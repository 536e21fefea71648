"""Exact free-fermion solution of transverse-field Ising chains with a bond impurity or a junction."""
from .errors import (AnsatzSingular, BranchError, ConvergenceFailure, IncompleteSpectrum, InvalidModelSize,
                     InvalidParameter, InvalidRoot, InvalidSitePair, NotSymmetric, PoleAtK, TfisingError,
                     TooLarge, ZeroMode)
from .impurity import ImpurityParams, find_modes_impurity, residual_impurity, solve_impurity
from .junction import JunctionParams, find_modes_junction, residual_junction, solve_junction
from .model import ChainSpec, ModelKind, build_couplings, build_quadratic_form, difference_operator
from .modes import Branch, QuasiMomentum
from .numeric import FermionSolution, solve_numeric
from .observables import (GreenMatrix, corr_xx, corr_yy, corr_zz, energy_gap, green_matrix,
                          magnetization_profile, magnetization_site, magnetization_total)
from .oracle import build_hamiltonian, ground_spectrum, oracle_observables
from .solvers import solve
from .transfer import check_segments, propagate, transfer_step

__version__ = "0.1.0"
