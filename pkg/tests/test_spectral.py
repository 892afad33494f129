"""Transform layer: symbol oracles, densities, multipliers, zoom identities."""

import math

import numpy as np
import pytest

from levyspec.measures import make_bernstein, make_stable, power_sum_kernel
from levyspec.scaling import power_scaling
from levyspec.spectral import (AliasingDetected, FrequencyGrid, apply_multiplier,
                               bessel_multiplier, density, eval_symbol, forward,
                               fractional_multiplier, inverse, nyquist_amplitude,
                               random_band_limited, scaling_identity_check,
                               subordination_check, subordination_constant,
                               tail_bounds_check)
from levyspec.util import lp_norm, rng_for


def test_grid_geometry(grid1):
    assert grid1.dx == 16.0 / 256
    assert grid1.dxi == 1.0 / 16.0
    assert grid1.nyquist == 8.0
    x = grid1.x_axis()
    assert x[0] == -8.0 and abs(x[-1] - (8.0 - grid1.dx)) < 1e-12
    assert grid1.cell == grid1.dx


def test_fft_roundtrip_and_parseval(grid1):
    f = rng_for(5, 0).standard_normal(grid1.n)
    back = inverse(grid1, forward(grid1, f)).real
    assert np.max(np.abs(back - f)) < 1e-12
    ex = np.sum(f ** 2) * grid1.dx
    exi = np.sum(np.abs(forward(grid1, f)) ** 2) * grid1.dxi
    assert abs(ex - exi) < 1e-10 * ex


def test_gaussian_self_dual(grid1):
    x = grid1.x_axis()
    f = np.exp(-math.pi * x ** 2)
    fh = forward(grid1, f)
    want = np.exp(-math.pi * grid1.xi_axis() ** 2)
    assert np.max(np.abs(fh - want)) < 1e-12


def test_cauchy_symbol_closed_form(tab_cauchy, grid1):
    xi = grid1.xi_axis()
    want = -2.0 * math.pi ** 2 * np.abs(xi)
    nz = np.abs(xi) > 0
    rel = np.abs(tab_cauchy.sym[nz] - want[nz]) / np.abs(want[nz])
    assert rel.max() < 1e-8
    assert tab_cauchy.sym[grid1.n // 2] == 0.0
    assert np.max(np.abs(tab_cauchy.psi.imag)) < 1e-12


def test_stable_half_symbol_values(tab_half, grid1):
    # psi(xi) = -4 pi |xi|^{1/2}: value at 1 and homogeneity of order 1/2
    xi = grid1.xi_axis()
    i1 = int(np.argmin(np.abs(xi - 1.0)))
    i4 = int(np.argmin(np.abs(xi - 4.0)))
    assert abs(tab_half.sym[i1] + 4.0 * math.pi) < 1e-6 * 4.0 * math.pi
    assert abs(tab_half.sym[i4] / tab_half.sym[i1] - 2.0) < 1e-8


def test_stable_homogeneity_sigma15(tab_sig15, grid1):
    xi = grid1.xi_axis()
    base = np.flatnonzero((xi > 0.5) & (xi < 3.95))
    # index arithmetic: xi doubles when the offset from the center doubles
    c = grid1.n // 2
    dbl = c + 2 * (base - c)
    ratio = tab_sig15.sym[dbl] / tab_sig15.sym[base]
    assert np.max(np.abs(ratio - 2.0 ** 1.5)) < 1e-8


def test_symbol_rotation_invariance_d2():
    g = FrequencyGrid(d=2, n=64, box=8.0)
    tab = eval_symbol(make_stable(2, 1.0), g)
    rho = g.xi_radius()
    band = (rho > 1.9) & (rho < 2.1)
    vals = tab.sym[band] / rho[band]
    spread = (vals.max() - vals.min()) / abs(vals.mean())
    # limited by the 64-node angular rule, not by quadrature
    assert spread < 5e-3


@pytest.fixture(scope="module")
def tab_big():
    g = FrequencyGrid(d=1, n=32768, box=8192.0)
    return eval_symbol(make_stable(1, 1.0), g)


def test_density_cauchy_closed_form(tab_big):
    tab, g = tab_big, tab_big.grid
    x = g.x_axis()
    win = np.abs(x) <= 10.0
    for t in (0.5, 1.0, 2.0):
        p = density(tab, t).values
        want = t / ((math.pi * t) ** 2 + x ** 2)
        rel = np.abs(p[win] - want[win]) / want[win]
        assert rel.max() < 1e-5
        assert abs(np.sum(p) * g.dx - 1.0) < 1e-8
        assert p.min() > -1e-8


def test_density_semigroup(tab_cauchy, grid1):
    pa = density(tab_cauchy, 0.7).values
    pb = density(tab_cauchy, 0.9).values
    # periodic convolution of the two kernels equals the kernel at the sum time
    conv = inverse(grid1, forward(grid1, pa) * forward(grid1, pb)).real
    pc = density(tab_cauchy, 1.6).values
    assert np.max(np.abs(conv - pc)) < 1e-8


def test_density_aliasing_guard(tab_big):
    with pytest.raises(AliasingDetected):
        density(tab_big, 0.2)
    assert nyquist_amplitude(tab_big, 0.2) > 1e-8 > nyquist_amplitude(tab_big, 0.5)


def test_density_damping_factor(tab_cauchy):
    lamval = 0.8
    p0 = density(tab_cauchy, 1.0).values
    pl = density(tab_cauchy, 1.0, lam=lamval).values
    assert np.max(np.abs(pl - math.exp(-lamval) * p0)) < 1e-12


def test_multipliers(tab_cauchy):
    assert np.array_equal(fractional_multiplier(tab_cauchy, 1.0), tab_cauchy.sym)
    m = fractional_multiplier(tab_cauchy, 0.5)
    assert np.allclose(m, -np.sqrt(-tab_cauchy.sym), atol=1e-14)
    b = bessel_multiplier(tab_cauchy, 0.0)
    assert np.allclose(b, 1.0)
    assert np.all(bessel_multiplier(tab_cauchy, 1.0) >= 1.0)


def test_apply_multiplier_linearity(grid1, tab_cauchy):
    f = random_band_limited(grid1, rng_for(1, 0))
    m = bessel_multiplier(tab_cauchy, 0.5)
    a = apply_multiplier(grid1, 3.0 * f, m)
    b = 3.0 * apply_multiplier(grid1, f, m)
    assert np.max(np.abs(a - b)) < 1e-12


def test_subordination_constant_value():
    assert abs(subordination_constant(0.5) - 0.5 / math.sqrt(math.pi)) < 1e-15


def test_subordination_time_representation(tab_cauchy, grid1):
    x = grid1.x_axis()
    fs = [np.exp(-x ** 2), np.exp(-0.5 * (x - 1.0) ** 2)]
    rep = subordination_check(tab_cauchy, 0.5, fs)
    assert all(o["sup_rel"] < 1e-3 for o in rep["per_function"])


def test_random_band_limited_normalized(grid1):
    f = random_band_limited(grid1, rng_for(2, 7))
    assert abs(lp_norm(f, grid1.cell, 2.0) - 1.0) < 1e-12
    fh = forward(grid1, f)
    rho = grid1.xi_radius()
    # spectrum is strongly damped past the design band
    assert np.max(np.abs(fh[rho > 6.0])) < 1e-6 * np.max(np.abs(fh))
    g = random_band_limited(grid1, rng_for(2, 7))
    assert np.array_equal(f, g)


def test_scaling_identity_stable():
    g = FrequencyGrid(d=1, n=512, box=32.0)
    pi = make_stable(1, 1.0)
    rows = scaling_identity_check(pi, power_scaling(1.0), g, (0.5, 2.0))
    assert {r["identity"] for r in rows} == {"density"}
    assert max(r["rel_err"] for r in rows) < 1e-6


def test_scaling_identity_with_generator_power():
    g = FrequencyGrid(d=1, n=512, box=32.0)
    pi = make_stable(1, 1.0)
    rows = scaling_identity_check(pi, power_scaling(1.0), g, (1.0,), mu=pi)
    names = {r["identity"] for r in rows}
    assert names == {"density", "generator_power"}
    assert max(r["rel_err"] for r in rows) < 1e-6


def test_tail_bounds_smoke(cauchy, triple_cauchy):
    g = FrequencyGrid(d=1, n=512, box=32.0)
    out = tail_bounds_check(cauchy, cauchy, triple_cauchy, g,
                            t_grid=(1.0,), c_grid=(0.5, 2.0),
                            y_grid=(0.25,), shift_pairs=((1.0, 0.1),))
    kinds = {r["kind"] for r in out["rows"]}
    assert kinds == {"full", "cutoff", "translation", "timeshift"}
    assert all(np.isfinite(r["ratio"]) for r in out["rows"])
    # cutoff masses sit below the shape bound by a bounded factor
    assert all(lo >= 0 and hi < 50.0 for lo, hi in out["spread"].values())
