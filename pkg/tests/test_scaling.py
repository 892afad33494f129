"""Scaling triples: inverses, engulfing, integrability prerequisites."""

import numpy as np
import pytest

from levyspec.measures import power_sum_kernel
from levyspec.scaling import (NotScaling, bernstein_scaling, check_t1_integrability,
                              derive_inverses, engulfing_constant, power_scaling)


@pytest.mark.parametrize("sigma", [0.5, 1.0, 1.5])
def test_power_scaling_inverses(sigma):
    tr = power_scaling(sigma)
    for t in np.geomspace(1e-6, 1e6, 25):
        # a inverts kappa, gamma inverts l
        assert abs(tr.a(t) - t ** (1.0 / sigma)) < 1e-6 * t ** (1.0 / sigma)
        assert abs(tr.kappa(tr.a(t)) - t) < 1e-6 * t
        assert abs(tr.gamma(tr.l(t)) - t) < 1e-6 * t
        assert abs(tr.a_inv(t) - tr.kappa(t)) < 1e-9 * max(tr.kappa(t), 1e-12)


def test_derive_inverses_rejects_decreasing():
    with pytest.raises(NotScaling):
        derive_inverses(lambda r: 1.0 / r, lambda e: e)


def test_engulfing_constant_power():
    for sigma in (0.5, 1.0, 1.5):
        rep = engulfing_constant(power_scaling(sigma))
        assert rep.ok
        assert 1.0 <= rep.K0 < 100.0


def test_bernstein_scaling_matches_power_for_pure_kernel():
    # phi(u) = u^{1/2} subordination of the Laplacian: kappa(r) = r exactly
    tr = bernstein_scaling(power_sum_kernel([0.5]))
    c = tr.kappa(1.0)
    for r in np.geomspace(1e-4, 1e4, 17):
        assert abs(tr.kappa(r) / (c * r) - 1.0) < 1e-9


@pytest.mark.parametrize("sigma", [0.5, 1.0, 1.5])
def test_t1_integrability_power(sigma):
    from levyspec.measures import default_alphas, make_stable

    _, a2 = default_alphas(make_stable(1, sigma))
    rep = check_t1_integrability(power_scaling(sigma), a2)
    assert rep.passed
    assert all(rep.verdicts.values())
