"""Space-time covering layer: maximal functions, decomposition, square function."""

import numpy as np
import pytest
from scipy import ndimage

from levyspec.cz import (CellPart, EmptyLevelSet, PrereqFailed, SpaceTimeGrid,
                         _footprint_max, apply_G, cz_decompose, default_radii,
                         fefferman_stein_ratio, footprint, le2_bound_check,
                         m0_bound, maximal, outer_measure, sharp,
                         verify_stoch_hormander_lp, weak_11_constant)
from levyspec.spectral import FrequencyGrid
from levyspec.util import rng_for

KAPPA = lambda r: float(r)


def st_grid(nt=24, n=64, box=8.0, d=1):
    return SpaceTimeGrid(grid=FrequencyGrid(d=d, n=n, box=box), T=1.0, nt=nt)


def test_grid_geometry():
    st = st_grid()
    assert st.shape == (24, 64)
    assert abs(st.cell - (1.0 / 24) * (8.0 / 64)) < 1e-15
    assert st.times[0] == 0.5 * st.dt


def test_footprint_geometry():
    st = st_grid()
    m = footprint(st, 0.5, KAPPA)
    assert m.ndim == 2 and m.shape[0] % 2 == 1 and m.shape[1] % 2 == 1
    assert m[::-1, ::-1].tolist() == m.tolist()  # centrally symmetric
    small = footprint(st, 0.25, KAPPA)
    assert small.shape[1] <= m.shape[1]


@pytest.mark.parametrize("d,n,nt", [(1, 64, 24), (2, 32, 12)])
def test_footprint_max_matches_dense_filter(d, n, nt):
    # the separable time/ball passes must equal the monolithic dilation
    st = st_grid(nt=nt, n=n, box=4.0, d=d)
    rng = rng_for(70, d)
    img = np.abs(rng.standard_normal(st.shape))
    for delta in (0.2, 0.7, 1.5):
        mask = footprint(st, delta, KAPPA)
        got = _footprint_max(st, img, mask)
        want = ndimage.maximum_filter(img, footprint=mask, mode="constant",
                                      cval=0.0)
        assert np.array_equal(got, want)


def test_maximal_homogeneity_and_modes():
    st = st_grid()
    f = rng_for(71, 0).standard_normal(st.shape)
    mc = maximal(st, f, KAPPA, mode="centered")
    mn = maximal(st, f, KAPPA, mode="noncentered")
    assert np.all(mn >= mc - 1e-12)
    assert np.max(np.abs(maximal(st, 2.0 * f, KAPPA) - 2.0 * mc)) < 1e-12
    assert np.all(mc >= 0)


def test_sharp_vanishes_on_constants():
    st = st_grid()
    fs = sharp(st, np.full(st.shape, 3.0), KAPPA)
    assert np.max(np.abs(fs)) < 1e-10


def test_cz_reconstruction_sweep():
    for res, (nt, n) in enumerate(((16, 64), (32, 128))):
        st = st_grid(nt=nt, n=n)
        for k in range(8):
            f = rng_for(72, 10 * res + k).standard_normal(st.shape)
            M = maximal(st, f, KAPPA, mode="noncentered")
            alpha = 0.6 * float(M.max())
            out = cz_decompose(st, f, alpha, KAPPA)
            if out["degenerate"]:
                continue
            recon = out["g"].copy()
            for part in out["parts"]:
                recon[part.index] += part.values
            assert np.array_equal(recon, f)  # reconstruction is exact
            scale = np.abs(f).max()
            for part in out["parts"]:
                assert abs(part.values.sum()) < 1e-10 * scale * part.size
            # cells are disjoint and cover O
            occ = np.zeros(st.shape, dtype=int)
            for idx in out["cells"]:
                occ[idx] += 1
            assert occ.max() <= 1
            assert np.array_equal(occ > 0, out["O_mask"])
            # g equals f off O
            assert np.array_equal(out["g"][~out["O_mask"]], f[~out["O_mask"]])


def test_cz_empty_level_set():
    st = st_grid()
    f = rng_for(72, 99).standard_normal(st.shape)
    big = 10.0 * float(np.abs(f).max())
    out = cz_decompose(st, f, big, KAPPA)
    assert out["degenerate"] and out["parts"] == []
    with pytest.raises(EmptyLevelSet):
        cz_decompose(st, f, big, KAPPA, raise_on_empty=True)


def test_cell_part_dense_roundtrip():
    idx = (np.array([0, 1]), np.array([2, 3]))
    part = CellPart(index=idx, values=np.array([1.5, -1.5]), avg=0.25)
    dense = part.dense((4, 5))
    assert dense[0, 2] == 1.5 and dense[1, 3] == -1.5
    assert part.size == 2
    assert abs(dense.sum()) < 1e-15


def test_outer_measure_engulfs_level_set():
    st = st_grid(nt=32, n=128)
    f = rng_for(73, 1).standard_normal(st.shape)
    M = maximal(st, f, KAPPA, mode="noncentered")
    out = cz_decompose(st, f, 0.5 * float(M.max()), KAPPA)
    o_size = float(out["O_mask"].sum()) * st.cell
    assert outer_measure(st, out, KAPPA) >= o_size


def test_weak_11_and_fs_stable_across_fields():
    cs, fss = [], []
    for res, (nt, n) in enumerate(((16, 64), (32, 128))):
        st = st_grid(nt=nt, n=n)
        for k in range(4):
            f = rng_for(74, 10 * res + k).standard_normal(st.shape)
            cs.append(weak_11_constant(st, f, KAPPA)["c"])
            fss.append(fefferman_stein_ratio(st, f, KAPPA, 3.0))
    assert max(cs) < 2.0 * min(cs)
    assert max(fss) < 2.0 * min(fss)
    assert all(np.isfinite(v) and v > 0 for v in cs + fss)


def test_le2_bound_rows():
    st = st_grid(nt=24, n=96)
    f = np.abs(rng_for(75, 0).standard_normal(st.shape))
    alphas = np.quantile(f, [0.6, 0.8, 0.95])
    rows = le2_bound_check(st, f, KAPPA, alphas, lam=0.05)
    assert all(r["ok"] for r in rows)


def test_apply_g_linear_and_m0():
    st = st_grid(nt=12, n=48, box=4.0)
    rng = rng_for(76, 0)
    K = rng.standard_normal(st.shape) * np.exp(-np.arange(st.nt))[:, None]
    f = rng.standard_normal(st.shape)
    g1 = apply_G(st, K, f)
    assert np.max(np.abs(apply_G(st, K, 2.0 * f) - 2.0 * g1)) < 1e-10
    m0 = m0_bound(st, K)
    lhs = np.sqrt(np.sum(g1 ** 2) * st.cell)
    rhs = m0 * np.sqrt(np.sum(f ** 2) * st.cell)
    assert lhs <= rhs * (1.0 + 1e-9)


def test_apply_g_vector_channels():
    st = st_grid(nt=10, n=32, box=4.0)
    rng = rng_for(76, 1)
    K = rng.standard_normal(st.shape)
    f = rng.standard_normal((st.nt, 2) + st.grid.shape)
    w = np.array([0.7, 0.3])
    gv = apply_G(st, K, f, mark_weights=w)
    assert gv.shape == st.shape
    assert np.all(gv >= 0)


def test_verify_stoch_hormander_lp_smoke():
    st = st_grid(nt=10, n=32, box=4.0)
    rng = rng_for(76, 2)
    K = rng.standard_normal(st.shape) * np.exp(-np.arange(st.nt))[:, None]
    corpus = [rng.standard_normal(st.shape) for _ in range(2)]
    out = verify_stoch_hormander_lp(st, K, (2.0, 3.0), corpus)
    assert [r["p"] for r in out["rows"]] == [2.0, 3.0]
    assert all(np.isfinite(r["A_p"]) for r in out["rows"])
    assert out["m0"] > 0
    with pytest.raises(PrereqFailed):
        verify_stoch_hormander_lp(st, K, (2.0,), corpus,
                                  sweep_report={"plateau": False})
