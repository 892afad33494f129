"""Helper-layer checks: RNG streams, discrete norms, CSV determinism."""

import numpy as np

from levyspec.util import (fmt_float, loglog_slope, lp_norm, rng_for,
                           run_indexed, time_lp, trapezoid_weights, vr_reduce,
                           write_csv)


def test_rng_streams_reproducible_and_distinct():
    a = rng_for(11, 3).standard_normal(64)
    b = rng_for(11, 3).standard_normal(64)
    c = rng_for(11, 4).standard_normal(64)
    d = rng_for(12, 3).standard_normal(64)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_lp_norm_constant_field():
    v = np.full(200, -3.0)
    cell = 0.05
    # |c| * (n * cell)^{1/p}
    for p in (1.0, 2.0, 3.5):
        assert abs(lp_norm(v, cell, p) - 3.0 * (200 * cell) ** (1 / p)) < 1e-12
    assert lp_norm(v, cell, np.inf) == 3.0


def test_vr_reduce_matches_manual():
    rng = rng_for(0, 1)
    v = rng.standard_normal((3, 17))
    w = np.array([0.5, 0.3, 0.2])
    got = vr_reduce(v, w, 2.0)
    want = np.sqrt(sum(w[i] * v[i] ** 2 for i in range(3)))
    assert np.allclose(got, want, atol=1e-14)
    assert np.allclose(vr_reduce(v, w, np.inf), np.abs(v).max(axis=0))


def test_time_lp_and_trapezoid_weights():
    t = np.array([0.0, 0.1, 0.4, 1.0])
    w = trapezoid_weights(t)
    assert abs(w.sum() - 1.0) < 1e-15
    # exact for affine integrands
    f = 2.0 + 3.0 * t
    assert abs(np.sum(w * f) - (2.0 + 1.5)) < 1e-14
    assert abs(time_lp(f, w, 1.0) - 3.5) < 1e-14
    assert time_lp(f, w, np.inf) == 5.0


def test_trapezoid_weights_single_node():
    assert trapezoid_weights([2.0]).tolist() == [0.0]


def test_fmt_float_roundtrip():
    rng = rng_for(3, 0)
    for x in rng.standard_normal(50) * 10.0 ** rng.integers(-9, 9, 50):
        assert float(fmt_float(x)) == x
    assert fmt_float(7) == "7"
    assert fmt_float(True) == "1"


def test_write_csv_deterministic(tmp_path):
    rows = [[1.0 / 3.0, "a", 2], [np.pi, "b", -1]]
    p1 = write_csv(tmp_path / "x1.csv", "demo", ["v", "tag", "k"], rows)
    p2 = write_csv(tmp_path / "x2.csv", "demo", ["v", "tag", "k"], rows)
    b1, b2 = open(p1, "rb").read(), open(p2, "rb").read()
    assert b1 == b2
    head = b1.decode().splitlines()[0]
    assert head == "# levyspec csv schema=1 suite=demo"


def test_run_indexed_order_independent_of_threads():
    items = list(range(40))
    f = lambda i: i * i + 1
    assert run_indexed(f, items, threads=1) == run_indexed(f, items, threads=4)


def test_loglog_slope_exact_power_law():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    y = 3.0 * x ** -2.0
    assert abs(loglog_slope(x, y) + 2.0) < 1e-12
