import math
import warnings

import numpy as np
import pytest

from conftest import golden_values
from tfising.errors import InvalidSitePair
from tfising.model import ChainSpec
from tfising.numeric import FermionSolution, solve_numeric
from tfising.observables import (ZeroModeWarning, corr_xx, corr_yy, corr_zz, energy_gap, green_matrix,
                                 magnetization_profile, magnetization_site, magnetization_total)


@pytest.fixture(scope="module")
def two_site():
    sol = solve_numeric(ChainSpec.impurity(2, 1, 1, 1))
    return sol, green_matrix(sol)


def test_golden_two_site(two_site):
    sol, g = two_site
    ref = golden_values()
    assert corr_xx(g, 1, 2) == pytest.approx(ref["cxx"], abs=1e-12)
    assert corr_zz(g, 1, 2) == pytest.approx(1.0, abs=1e-12)
    assert magnetization_site(sol, 1) == pytest.approx(ref["mz"], abs=1e-12)
    assert magnetization_total(sol) == pytest.approx(ref["mz"], abs=1e-12)
    assert energy_gap(sol) == pytest.approx(ref["gap"], abs=1e-12)
    assert g.g[0, 1] == pytest.approx(1 / math.sqrt(5), abs=1e-12)


def test_large_field():
    sol = solve_numeric(ChainSpec.impurity(10, 1, 1, 1e8))
    g = green_matrix(sol)
    np.testing.assert_allclose(g.g, -np.eye(10), atol=1e-7)
    assert magnetization_total(sol) == pytest.approx(1.0, abs=1e-7)
    assert energy_gap(sol) == pytest.approx(2.0, abs=1e-7)
    assert corr_zz(g, 3, 7) == pytest.approx(1.0, abs=1e-7)


def test_field_100_and_001():
    hi = solve_numeric(ChainSpec.impurity(10, 1, 1, 100))
    g = green_matrix(hi)
    assert all(abs(corr_yy(g, i, i + 1)) < 1e-2 for i in range(1, 10))
    assert magnetization_total(hi) > 0.999
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroModeWarning)
        lo = solve_numeric(ChainSpec.impurity(10, 1, 1, 0.01))
        g = green_matrix(lo)
    assert corr_xx(g, 5, 6) > 0.99
    assert abs(corr_yy(g, 5, 6)) < 0.05
    assert np.all(magnetization_profile(lo) < 0.15)
    assert energy_gap(lo) < 1e-6


def test_zero_mode_warning():
    sol = solve_numeric(ChainSpec.impurity(10, 1, 1, 0.01))
    with pytest.warns(ZeroModeWarning):
        g = green_matrix(sol)
    assert g.zero_mode_flag


def test_gauge_invariance(rng):
    sol = solve_numeric(ChainSpec.junction(9, 1, 2.5, 0.8))
    g = green_matrix(sol).g
    flip = rng.choice([-1.0, 1.0], size=sol.n)[:, None]
    flipped = FermionSolution(sol.lambdas, flip * sol.phi, flip * sol.psi, sol.spec)
    np.testing.assert_allclose(green_matrix(flipped).g, g, atol=1e-14, rtol=0)


def test_site_pair_validation(two_site):
    _, g = two_site
    with pytest.raises(InvalidSitePair):
        corr_xx(g, 2, 1)
    with pytest.raises(InvalidSitePair):
        corr_yy(g, 1, 1)
    with pytest.raises(InvalidSitePair):
        corr_zz(g, 1, 1)
    with pytest.raises(InvalidSitePair):
        corr_zz(g, 0, 2)


def test_bounds_and_mirror_symmetry():
    sol = solve_numeric(ChainSpec.impurity(10, 1, 1, 0.9))
    g = green_matrix(sol)
    mz = magnetization_profile(sol)
    np.testing.assert_allclose(mz, mz[::-1], atol=1e-9)
    for i in range(1, 10):
        for j in range(i + 1, 11):
            assert abs(corr_xx(g, i, j)) <= 1 + 1e-9
            assert abs(corr_yy(g, i, j)) <= 1 + 1e-9


def test_magnetization_equals_minus_diagonal():
    # observed identity, not part of the contract
    sol = solve_numeric(ChainSpec.custom([0.5, 2, 1, 3], 0.7))
    np.testing.assert_allclose(magnetization_profile(sol), -np.diag(green_matrix(sol).g), atol=1e-12)


def test_long_separation_determinant_is_finite():
    sol = solve_numeric(ChainSpec.custom([1.0] * 63, 1.0))
    g = green_matrix(sol)
    v = corr_xx(g, 1, 64)
    assert np.isfinite(v) and abs(v) <= 1
