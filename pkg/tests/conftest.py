"""Shared fixtures: one grid, three stable symbol tables, a mark space.

Session scoped because eval_symbol and certify_mu0 dominate collection-time
cost; every table here is reused by several test modules.
"""

import numpy as np
import pytest

from levyspec import (FrequencyGrid, MarkSpace, build_lp_system, certify_mu0,
                      default_mu0, eval_symbol, make_stable, power_scaling)


@pytest.fixture(scope="session")
def grid1():
    return FrequencyGrid(d=1, n=256, box=16.0)


@pytest.fixture(scope="session")
def cauchy():
    return make_stable(d=1, sigma=1.0)


@pytest.fixture(scope="session")
def tab_cauchy(cauchy, grid1):
    return eval_symbol(cauchy, grid1)


@pytest.fixture(scope="session")
def stable_half():
    return make_stable(d=1, sigma=0.5)


@pytest.fixture(scope="session")
def tab_half(stable_half, grid1):
    return eval_symbol(stable_half, grid1)


@pytest.fixture(scope="session")
def tab_sig15(grid1):
    return eval_symbol(make_stable(d=1, sigma=1.5), grid1)


@pytest.fixture(scope="session")
def triple_cauchy():
    return power_scaling(1.0)


@pytest.fixture(scope="session")
def space2():
    return MarkSpace(masses=np.array([0.7, 0.3]))


@pytest.fixture(scope="session")
def lp_sys(grid1):
    return build_lp_system(2.0, grid1)


@pytest.fixture(scope="session")
def cert_half(stable_half):
    return certify_mu0(default_mu0(stable_half))
