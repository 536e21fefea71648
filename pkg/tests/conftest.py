import functools
import math

import numpy as np
import pytest

from tfising.model import ChainSpec
from tfising.solvers import solve

J2_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)
H_GRID = (0.1, 0.5, 1.0, 2.0, 10.0)
MODELS = (("impurity", 10), ("junction", 9))
GRID = [(kind, n, j2, h) for kind, n in MODELS for j2 in J2_GRID for h in H_GRID]


@functools.lru_cache(maxsize=None)
def cached_solution(kind, n, j2, h, method):
    return solve(ChainSpec.build(kind, n, 1.0, j2, h), method)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def golden_values():
    r5 = math.sqrt(5.0)
    return {"lambdas": [(r5 - 1) / 2, (r5 + 1) / 2], "e0": -r5, "gap": r5 - 1,
            "mz": 2 / r5, "cxx": 1 / r5, "czz": 1.0}


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE = {}


def record_criterion(number: int, ok: bool, detail: str):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
