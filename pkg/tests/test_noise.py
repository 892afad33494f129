"""Jump noise layer: paths, compensated integrals, moment estimates."""

import numpy as np
import pytest

from levyspec.noise import (MarkSpace, StatisticalPower, event_adapted_times,
                            moment_estimate_check, sample_path,
                            stochastic_integral)
from levyspec.spectral import random_band_limited
from levyspec.util import lp_norm, rng_for


def test_mark_space_totals(space2):
    assert space2.n_channels == 2
    assert abs(space2.total - 1.0) < 1e-15


def test_sample_path_deterministic(space2):
    a = sample_path(space2, 2.0, 7, index=3)
    b = sample_path(space2, 2.0, 7, index=3)
    c = sample_path(space2, 2.0, 7, index=4)
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.channels, b.channels)
    assert not np.array_equal(a.times, c.times)
    assert np.all(a.times > 0) and np.all(a.times <= 2.0)
    assert np.all(np.diff(a.times) > 0)
    assert set(np.unique(a.channels)) <= {0, 1}


def test_poisson_rate(space2):
    T = 3.0
    counts = [sample_path(space2, T, 11, index=i).times.size
              for i in range(600)]
    mean = np.mean(counts)
    # Poisson(total * T): seeded, 3 sigma of the ensemble mean
    se = np.sqrt(space2.total * T / 600)
    assert abs(mean - space2.total * T) < 3 * se


def test_channel_frequencies(space2):
    chans = np.concatenate([sample_path(space2, 5.0, 13, index=i).channels
                            for i in range(300)])
    frac = np.mean(chans == 0)
    se = np.sqrt(0.7 * 0.3 / chans.size)
    assert abs(frac - 0.7) < 4 * se


def test_event_adapted_times():
    t = event_adapted_times(1.0, 4, [0.33, 0.77])
    assert t[0] == 0.0 and t[-1] == 1.0
    assert np.all(np.diff(t) > 0)
    for v in (0.25, 0.33, 0.5, 0.77):
        assert np.min(np.abs(t - v)) == 0.0


def test_integral_linearity(space2, grid1):
    phi = random_band_limited(grid1, rng_for(21, 0), n_channels=2)
    path = sample_path(space2, 1.0, 21, index=5)
    r1 = stochastic_integral(phi, space2, path, n_steps=16)
    r2 = stochastic_integral(2.0 * phi, space2, path, n_steps=16)
    assert np.array_equal(r1["times"], r2["times"])
    assert np.max(np.abs(r2["values"] - 2.0 * r1["values"])) < 1e-12


def test_jump_increments_identity_semigroup(space2, grid1):
    phi = random_band_limited(grid1, rng_for(21, 1), n_channels=2)
    # find a seeded path with at least one jump
    path = next(sample_path(space2, 1.0, 22, index=i) for i in range(50)
                if sample_path(space2, 1.0, 22, index=i).times.size > 0)
    res = stochastic_integral(phi, space2, path, n_steps=16)
    jumps = res["jump_indices"]
    assert jumps.size == np.unique(
        np.searchsorted(res["times"], path.times)).size
    for k, m in enumerate(jumps):
        t = res["times"][m]
        hit = np.flatnonzero(np.isclose(path.times, t))
        inc = sum(phi[path.channels[j]] for j in hit)
        got = res["values"][m] - res["left_values"][k]
        assert np.max(np.abs(got - inc)) < 1e-10


def test_jump_increments_with_semigroup(space2, grid1, tab_cauchy):
    phi = random_band_limited(grid1, rng_for(21, 2), n_channels=2)
    path = sample_path(space2, 1.0, 23, index=1)
    if path.times.size == 0:
        path = sample_path(space2, 1.0, 23, index=2)
    res = stochastic_integral(phi, space2, path, table=tab_cauchy, n_steps=16)
    m = res["jump_indices"][0]
    t = res["times"][m]
    hit = np.flatnonzero(np.isclose(path.times, t))
    inc = sum(phi[path.channels[j]] for j in hit)
    got = res["values"][m] - res["left_values"][0]
    assert np.max(np.abs(got - inc)) < 1e-10


def test_compensation_centers_the_integral(space2, grid1):
    phi = random_band_limited(grid1, rng_for(21, 3), n_channels=2)
    finals = []
    for i in range(400):
        path = sample_path(space2, 1.0, 31, index=i)
        res = stochastic_integral(phi, space2, path, n_steps=24)
        finals.append(res["values"][-1])
    finals = np.asarray(finals)
    mean = finals.mean(axis=0)
    se = finals.std(axis=0, ddof=1) / np.sqrt(len(finals))
    # compensated integral is a martingale: E M(T) = 0 nodewise
    assert np.all(np.abs(mean) <= 4.0 * se + 1e-12)


def test_ito_isometry(space2, grid1):
    T, n = 1.0, 1200
    phi = random_band_limited(grid1, rng_for(21, 4), n_channels=2)
    sq = []
    for i in range(n):
        path = sample_path(space2, T, 41, index=i)
        res = stochastic_integral(phi, space2, path, n_steps=32)
        sq.append(lp_norm(res["values"][-1], grid1.cell, 2.0) ** 2)
    sq = np.asarray(sq)
    lhs, se = sq.mean(), sq.std(ddof=1) / np.sqrt(n)
    rhs = T * sum(space2.masses[c] * lp_norm(phi[c], grid1.cell, 2.0) ** 2
                  for c in range(2))
    assert abs(lhs - rhs) <= 3.0 * se


def test_moment_estimate_check(space2, grid1, tab_cauchy):
    phi = random_band_limited(grid1, rng_for(21, 5), n_channels=2)
    out = moment_estimate_check(phi, space2, tab_cauchy, 0.0, 2.0, 0.0, 1.0,
                                200, 51, table_pi=tab_cauchy, n_steps=24)
    assert out["n_paths"] == 200
    assert np.isfinite(out["C"]) and out["C"] > 0
    assert out["lhs"] > 0 and out["rhs"] > 0


def test_moment_estimate_power_guard(space2, grid1, tab_cauchy):
    phi = random_band_limited(grid1, rng_for(21, 6), n_channels=2)
    with pytest.raises(StatisticalPower):
        moment_estimate_check(phi, space2, tab_cauchy, 0.0, 4.0, 0.0, 1.0,
                              8, 52, table_pi=tab_cauchy, n_steps=24,
                              max_rel_error=1e-4)
