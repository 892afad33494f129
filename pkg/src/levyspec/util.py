"""Shared helpers: counter-based RNG streams, discrete norms, CSV output."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

CSV_SCHEMA_VERSION = 1


def rng_for(master_seed, index=0):
    """Counter-based generator for stream `index` of a master seed.

    Philox is counter based, so distinct (seed, index) keys give statistically
    independent streams and any stream can be reproduced without generating
    the others.
    """
    key = np.array([np.uint64(master_seed), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def lp_norm(values, cell, p):
    """Discrete L_p norm, Riemann sum with cell volume `cell`."""
    v = np.abs(np.asarray(values, dtype=float))
    if np.isinf(p):
        return float(v.max())
    return float((np.sum(v ** p) * cell) ** (1.0 / p))


def vr_reduce(values, weights, r):
    """Reduce a leading channel axis with the weighted ell_r norm.

    |h|_{V_r} = (sum_i w_i |h_i|^r)^{1/r}; r=inf takes the plain max.
    """
    v = np.abs(np.asarray(values, dtype=float))
    w = np.asarray(weights, dtype=float).reshape((-1,) + (1,) * (v.ndim - 1))
    if np.isinf(r):
        return v.max(axis=0)
    return (np.sum(w * v ** r, axis=0)) ** (1.0 / r)


def time_lp(values, dt_weights, p):
    """ell_p combination over a time axis with quadrature weights.

    `values` holds one norm per time node; trapezoidal weights give the
    discrete (int |.|^p dt)^{1/p}.
    """
    v = np.asarray(values, dtype=float)
    w = np.asarray(dt_weights, dtype=float)
    if np.isinf(p):
        return float(v.max())
    return float((np.sum(w * v ** p)) ** (1.0 / p))


def trapezoid_weights(t):
    """Weights w with sum_k w_k f(t_k) = trapezoid rule on the node set t."""
    t = np.asarray(t, dtype=float)
    if t.size == 1:
        return np.zeros(1)
    w = np.zeros_like(t)
    dt = np.diff(t)
    w[:-1] += 0.5 * dt
    w[1:] += 0.5 * dt
    return w


def fmt_float(x):
    """Deterministic float formatting for CSV output, 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def write_csv(path, suite, columns, rows):
    """Write a CSV with a versioned schema header comment.

    Rows are written in the order given; all floats use fmt_float so repeated
    runs are byte identical.
    """
    lines = ["# levyspec csv schema=%d suite=%s" % (CSV_SCHEMA_VERSION, suite)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt_float(v) if not isinstance(v, str) else v
                              for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def run_indexed(fn, items, threads=1):
    """Map fn over items, returning results in input order.

    Reduction order is by index regardless of thread count, so results do not
    depend on `threads`.
    """
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def loglog_slope(x, y):
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    lx = lx - lx.mean()
    return float(np.sum(lx * (ly - ly.mean())) / np.sum(lx * lx))
