"""Estimate harness: a priori constants, Plancherel bound, kernel sweep."""

import math

import numpy as np
import pytest

from levyspec import harness as H
from levyspec.harness import (TruncationDominant, default_t1_specs,
                              hormander_point, hormander_sweep, plancherel_p2,
                              rho_lambda_slope, verify_smooth_estimate,
                              verify_t1)
from levyspec.spectral import (forward, fractional_multiplier, inverse,
                               random_band_limited)
from levyspec.util import rng_for


def test_default_t1_specs_shapes(grid1):
    specs = default_t1_specs(grid1, 2, seed=1)
    assert len(specs) == 12
    kinds = [s["label"].split("-")[1] for s in specs]
    assert kinds.count("f") == 4 and kinds.count("g") == 2
    assert kinds.count("phi") == 2 and kinds.count("all") == 4
    for s in specs:
        if s["phi"] is not None:
            assert s["phi"].shape == (2, grid1.n)
        if s["f"] is not None:
            assert s["f"].shape == (grid1.n,)


def test_plancherel_constant_below_half(tab_cauchy, space2):
    worst = 0.0
    for k in range(20):
        phi = random_band_limited(tab_cauchy.grid, rng_for(60, k), n_channels=2)
        out = plancherel_p2(tab_cauchy, tab_cauchy, phi, space2)
        assert out["C"] <= 0.5 + 1e-6
        worst = max(worst, out["C"])
    assert worst > 0.2  # the bound is active, not vacuous


def test_plancherel_lambda_damping(tab_cauchy, space2):
    phi = random_band_limited(tab_cauchy.grid, rng_for(60, 19), n_channels=2)
    i0 = plancherel_p2(tab_cauchy, tab_cauchy, phi, space2, lam=0.0)["I"]
    i1 = plancherel_p2(tab_cauchy, tab_cauchy, phi, space2, lam=1.0)["I"]
    assert 0.0 < i1 < i0


def test_smooth_estimate_p2_matches_plancherel(tab_cauchy, lp_sys, space2):
    # at p = 2 the Monte Carlo LHS has the exact spectral value
    # sqrt(plancherel I) of the half-power coefficient field
    grid = tab_cauchy.grid
    half = fractional_multiplier(tab_cauchy, 0.5)
    for k in range(2):
        phi = random_band_limited(grid, rng_for(61, k), n_channels=2)
        rep = verify_smooth_estimate([phi], tab_cauchy, tab_cauchy, lp_sys,
                                     space2, p_grid=(2.0,), n_paths=500,
                                     master_seed=9 + k)[0]
        halves = np.stack([inverse(grid, half * forward(grid, phi[c])).real
                           for c in range(2)])
        ref = math.sqrt(plancherel_p2(tab_cauchy, tab_cauchy, halves,
                                      space2)["I"])
        # 3 sigma of the path ensemble plus the time-quadrature bias margin
        assert abs(rep.lhs - ref) <= 3.0 * rep.lhs_err + 0.10 * ref
        assert rep.verdict == "bounded"
        assert rep.rhs > 0 and np.isfinite(rep.C)


def test_rho_lambda_slope(tab_cauchy):
    out = rho_lambda_slope(tab_cauchy, tab_cauchy)
    assert -1.1 < out["slope"] < -0.9
    assert [r["rho"] for r in out["rows"]] == [0.1, 0.01]


def test_verify_t1_mini(tab_cauchy, lp_sys, space2):
    specs = default_t1_specs(tab_cauchy.grid, 2, seed=1)[:3]
    out = verify_t1(specs, tab_cauchy, tab_cauchy, lp_sys, space2,
                    p_grid=(1.5, 2.0), lam_grid=(0.0, 1.0),
                    n_paths_small=200, n_paths_big=200, scale_check_paths=16)
    reps = out["reports"]
    # 3 specs x 2 lambda x 2 p x 2 inequalities
    assert len(reps) == 24
    for r in reps:
        assert r.verdict in ("bounded", "underpowered")
        assert np.isfinite(r.C)
        assert r.scale_dev < 1e-12  # x7 input scaling is exact
    assert -1.1 < out["rho_slope"] < -0.9


@pytest.fixture(scope="module")
def horm_engine(cauchy, triple_cauchy):
    return H._HormanderEngine(cauchy, triple_cauchy, delta_max=1.0,
                              eps=1e-3, T_out=1e3)


def test_limit_kernel_closed_form(horm_engine):
    # K0(x) = |x|^{-3/2} / (2 sqrt(2)) for the Cauchy generator half power
    x = np.geomspace(0.05, 50.0, 40)
    want = x ** -1.5 / (2.0 * math.sqrt(2.0))
    got = horm_engine.k0(x)
    assert np.max(np.abs(got - want) / want) < 1e-3


def test_kernel_line_closed_form(horm_engine):
    # K(tau, x) = -sqrt(2) pi^{3/2} Re (2 pi^2 tau - 2 pi i x)^{-3/2}
    for tau in (0.01, 0.1, 1.0):
        xs = np.linspace(-8.0, 8.0, 321) * max(tau, 0.05)
        z = (2.0 * math.pi ** 2 * tau - 2j * math.pi * xs) ** -1.5
        want = -math.sqrt(2.0) * math.pi ** 1.5 * z.real
        got = horm_engine.K_at(tau, xs)
        assert np.max(np.abs(got - want)) < 2e-2 * np.max(np.abs(want))


def test_hormander_point_zero_offset(horm_engine):
    out = horm_engine.point(1.0, 0.0, 0.0)
    assert out["I"] == 0.0


def test_hormander_point_reference_value(horm_engine):
    out = horm_engine.point(1.0, 1.0, 0.0)
    assert 0.75 < out["I"] < 0.90
    assert out["tail_share"] < 1e-4


def test_hormander_point_c0_monotone(cauchy, triple_cauchy):
    i4 = hormander_point(cauchy, triple_cauchy, 1.0, 1.0, 0.0, C0=4.0)["I"]
    i8 = hormander_point(cauchy, triple_cauchy, 1.0, 1.0, 0.0, C0=8.0)["I"]
    # a wider excluded cylinder removes mass from the difference integral
    assert i4 > 1.4 * i8 > 0.0


def test_hormander_point_lambda_damping(cauchy, triple_cauchy):
    i0 = hormander_point(cauchy, triple_cauchy, 1.0, 1.0, 0.0)["I"]
    i1 = hormander_point(cauchy, triple_cauchy, 1.0, 1.0, 0.0, lam=1.0)["I"]
    assert 0.0 < i1 < i0


def test_hormander_sweep_plateau(cauchy, triple_cauchy):
    sw = hormander_sweep(cauchy, triple_cauchy, deltas=(0.5, 2.0), max_sy=4)
    assert sw["plateau"]
    assert 0.70 < sw["sup"] < 0.95
    vals = list(sw["per_delta"].values())
    assert max(vals) <= 1.2 * min(vals)


def test_hormander_truncation_guard(cauchy, triple_cauchy):
    with pytest.raises(TruncationDominant):
        hormander_sweep(cauchy, triple_cauchy, deltas=(1.0,), max_sy=2,
                        T_out=0.1)
