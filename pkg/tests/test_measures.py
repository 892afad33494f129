"""Levy measure layer: moments, kernels, reference measure certificates."""

import numpy as np
import pytest

from levyspec import measures as M
from levyspec.measures import (DominationFailed, InvalidMeasure,
                               KernelAssumptionFailed, MomentUnbounded,
                               Mu0Certificate, certify_mu0, check_assumptions,
                               check_kernel, compensator_regime, default_alphas,
                               default_mu0, log_kernel, make_bernstein,
                               make_stable, power_sum_kernel, radial_moment,
                               rescale, validate_levy_measure)


def test_compensator_regime_thresholds():
    assert compensator_regime(0.5) == "none"
    assert compensator_regime(1.0) == "ball"
    assert compensator_regime(1.5) == "full"


def test_stable_radial_moments_closed_form(stable_half):
    # two unit-weight rays, density r^{-1-sigma}: int_0^1 r * r^{-1.5} dr = 2
    got = radial_moment(stable_half, 1.0, 0.0, 1.0)
    assert abs(got - 4.0) < 1e-6 * 4.0
    # tail count 2 * int_1^inf r^{-1.5} dr = 4
    assert abs(radial_moment(stable_half, 0.0, 1.0, np.inf) - 4.0) < 1e-6 * 4.0


def test_cauchy_ball_second_moment(cauchy):
    assert abs(radial_moment(cauchy, 2.0, 0.0, 1.0) - 2.0) < 1e-9


def test_make_stable_validates():
    for sigma in (0.5, 1.0, 1.5):
        validate_levy_measure(make_stable(1, sigma))
    with pytest.raises(InvalidMeasure):
        make_stable(1, 2.0)
    with pytest.raises(InvalidMeasure):
        make_stable(1, 0.0)


def test_rescale_stable_invariance(stable_half):
    # kappa(R) = R^sigma makes the zoomed measure equal in law to the original
    zoom = rescale(stable_half, 3.7, lambda r: r ** 0.5)
    for q, lo, hi in ((1.0, 0.0, 1.0), (0.0, 1.0, np.inf), (0.25, 0.0, 1.0)):
        a = radial_moment(stable_half, q, lo, hi)
        b = radial_moment(zoom, q, lo, hi)
        assert abs(a - b) < 1e-8 * abs(a)


def test_power_sum_kernel_homogeneity():
    k = power_sum_kernel([0.5])
    r = np.array([0.3, 2.0, 11.0])
    assert np.allclose(k.j(2.0 * r) / k.j(r), 2.0 ** -2.0, atol=1e-12)
    assert k.delta1 == k.delta2 == 0.5
    consts = check_kernel(k)
    assert abs(consts["N_envelope"] - 1.0) < 1e-9


def test_mixed_kernel_envelope_and_validation():
    k = power_sum_kernel([0.3, 0.45], coeffs=[1.0, 0.5])
    assert (k.delta1, k.delta2) == (0.3, 0.45)
    consts = check_kernel(k)
    assert consts["N_envelope"] < 10.0
    lk = log_kernel(0.4, 0.5)
    assert check_kernel(lk)["N_envelope"] < 50.0
    with pytest.raises(InvalidMeasure):
        log_kernel(0.4, 1.0)


def test_make_bernstein_is_valid_measure():
    pi = make_bernstein(power_sum_kernel([0.3, 0.45], coeffs=[1.0, 0.5]))
    validate_levy_measure(pi)
    assert pi.symmetric
    # ball mass of |y|^2 is finite and positive
    m = radial_moment(pi, 2.0, 0.0, 1.0)
    assert 0.0 < m < np.inf


def test_kernel_assumption_rejects_nonpositive_profile():
    k = M.BernsteinKernel(d=1, phi=lambda r: np.asarray(r) - 1.0,
                          j=lambda r: np.asarray(r) ** -2.0,
                          delta1=0.5, delta2=0.5, label="bad")
    with pytest.raises(KernelAssumptionFailed):
        make_bernstein(k)


def test_certify_mu0_constant_oracle(cert_half):
    # c1 = 2/(2 - sigma) exactly for stable measures
    assert abs(cert_half.c1 - 2.0 / 1.5) < 1e-6
    assert cert_half.details["refinement_rel"] < 1e-3
    assert cert_half.n0 > 0


@pytest.mark.parametrize("sigma,c1", [(1.0, 2.0), (1.5, 4.0)])
def test_certify_mu0_other_sigmas(sigma, c1):
    cert = certify_mu0(default_mu0(make_stable(1, sigma)))
    assert abs(cert.c1 - c1) < 1e-4 * c1


def test_check_assumptions_pass(stable_half, cert_half):
    rep = check_assumptions(stable_half, lambda r: r ** 0.5, cert_half)
    assert rep.passed
    assert rep.N0 < 50.0
    assert (rep.alpha1, rep.alpha2) == default_alphas(stable_half)
    assert min(rep.domination_margin.values()) >= 1.0 - 1e-9


def test_check_assumptions_domination_failure(stable_half, cert_half):
    with pytest.raises(DominationFailed):
        check_assumptions(stable_half, lambda r: r ** 2, cert_half)


def test_check_assumptions_moment_failure(stable_half, cert_half):
    # scale the floor measure down so domination passes and the moment
    # divergence of the miscalibrated zoom is what trips
    tiny = Mu0Certificate(mu0=default_mu0(stable_half, c=1e-8),
                          n0=cert_half.n0 * 1e-8, c1=cert_half.c1)
    with pytest.raises(MomentUnbounded):
        check_assumptions(stable_half, lambda r: r ** 2, tiny)


def test_default_alphas_regimes():
    assert default_alphas(make_stable(1, 0.5)) == (1.0, 0.25)
    assert default_alphas(make_stable(1, 1.0)) == (2.0, 0.5)
    assert default_alphas(make_stable(1, 1.5)) == (2.0, 1.25)
