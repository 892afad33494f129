"""Anisotropic Calderon-Zygmund machinery on space-time grids.

Cylinders Q_delta(t,x) = (t - kappa(delta), t + kappa(delta)) x B_delta(x)
are discretized as index footprints; cylinders are clipped at the domain
boundary and averages use the clipped cell count. The sup over radii in the
maximal and sharp functions runs over a fixed log grid of radii, making the
computed operators lower bounds of their continuum versions; all sandwich
inequalities are asserted for the discretized operators with constants
adjusted for radius snapping and boundary clipping.

The Whitney cover behind cz_decompose selects, in order of decreasing
distance function D, a maximal disjoint family of inner cylinders
Q_{c1 D(p)}(p), then assigns every point of O = {maximal > alpha} either to
the unique inner cylinder containing it or to the cylinder that blocked it.
The resulting cells C^k are exactly disjoint, cover O exactly, contain their
inner cylinder, and sit inside the outer cylinder Q_{c_out D_k}(p_k) where
c_out is enlarged adaptively so that kappa(c_out d) >= 2 kappa(c1 d) across
the radius grid (for power scalings the classical fixed factors suffice).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import ndimage, signal


class EmptyLevelSet(RuntimeError):
    """The level set {maximal > alpha} is empty; decomposition is degenerate."""


@dataclass
class CellPart:
    """One bad part b_k, stored on its cell only (cells can number in the
    thousands, so dense per-part arrays would scale quadratically)."""

    index: tuple
    values: np.ndarray
    avg: float

    @property
    def size(self):
        return self.values.size

    def dense(self, shape):
        out = np.zeros(shape)
        out[self.index] = self.values
        return out


class PrereqFailed(RuntimeError):
    """An operator bound was requested without its hypothesis report."""


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform cells on [0,T] x spatial box; times at cell centers."""

    grid: object
    T: float
    nt: int

    @property
    def dt(self):
        return self.T / self.nt

    @property
    def times(self):
        return (np.arange(self.nt) + 0.5) * self.dt

    @property
    def cell(self):
        return self.dt * self.grid.cell

    @property
    def shape(self):
        return (self.nt,) + self.grid.shape


def default_radii(st, kappa=None, n=40):
    """Log-spaced radii from a single cell to the full domain."""
    lo = 0.5 * st.grid.dx
    hi = float(st.grid.box)
    return np.geomspace(lo, hi, n)


def footprint(st, delta, kappa):
    """Boolean index footprint of Q_delta(0,0): open in time, closed ball in x."""
    kd = float(kappa(delta))
    ht = max(0, int(math.ceil(kd / st.dt - 1e-12)) - 1)
    ht = min(ht, st.nt - 1)
    hx = min(int(math.floor(delta / st.grid.dx + 1e-12)), st.grid.n - 1)
    d = st.grid.d
    ax = np.arange(-hx, hx + 1) * st.grid.dx
    if d == 1:
        sp = np.abs(ax) <= delta * (1 + 1e-12)
    else:
        sp = (ax[:, None] ** 2 + ax[None, :] ** 2) <= delta ** 2 * (1 + 1e-12)
    time_ok = np.ones(2 * ht + 1, dtype=bool)
    mask = time_ok.reshape((-1,) + (1,) * d) & sp[None]
    return mask


def _clipped_average(st, data, mask):
    """Cylinder averages of data with boundary clipping, all centers at once."""
    num = signal.fftconvolve(data, mask.astype(float), mode="same")
    den = signal.fftconvolve(np.ones_like(data), mask.astype(float), mode="same")
    return num / np.maximum(den, 0.5), den


def _shift0(a, k, axis):
    """Shift along axis by k cells, zero fill."""
    if k == 0:
        return a
    out = np.zeros_like(a)
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    if k > 0:
        dst[axis], src[axis] = slice(k, None), slice(None, a.shape[axis] - k)
    else:
        dst[axis], src[axis] = slice(None, k), slice(-k, None)
    out[tuple(dst)] = a[tuple(src)]
    return out


def _footprint_max(st, img, mask):
    """Flat dilation by the cylinder footprint, zero outside the domain.

    The footprint is a full time interval times a spatial ball, so the
    dilation separates into a time pass and per-row interval passes; this
    avoids materializing one huge nonseparable filter.
    """
    out = ndimage.maximum_filter1d(np.maximum(img, 0.0), size=mask.shape[0],
                                   axis=0, mode="constant", cval=0.0)
    sp = mask[(mask.shape[0] - 1) // 2]
    if st.grid.d == 1:
        return ndimage.maximum_filter1d(out, size=sp.shape[0], axis=1,
                                        mode="constant", cval=0.0)
    hy = (sp.shape[0] - 1) // 2
    acc = np.zeros_like(out)
    for dy in range(-hy, hy + 1):
        width = int(sp[dy + hy].sum())  # symmetric contiguous row
        if width == 0:
            continue
        dil = ndimage.maximum_filter1d(out, size=width, axis=2,
                                       mode="constant", cval=0.0)
        acc = np.maximum(acc, _shift0(dil, -dy, axis=1))
    return acc


def maximal(st, data, kappa, mode="centered", radii=None):
    """Discrete maximal function over the radius grid.

    mode 'centered': sup_delta of the clipped cylinder average at each point.
    mode 'noncentered': sup over all cylinders (any center) containing the
    point, realized by a maximum filter with the same footprint.
    """
    if radii is None:
        radii = default_radii(st, kappa)
    absd = np.abs(np.asarray(data, dtype=float))
    out = np.zeros_like(absd)
    for delta in radii:
        mask = footprint(st, delta, kappa)
        avg, _ = _clipped_average(st, absd, mask)
        avg = np.maximum(avg, 0.0)  # fft roundoff can dip below zero
        if mode == "noncentered":
            avg = _footprint_max(st, avg, mask)
        out = np.maximum(out, avg)
    return out


def _deviation(st, data, mask, avg):
    """Average of |f - f_Q| over each (clipped) cylinder, all centers."""
    nt, d = st.nt, st.grid.d
    ht = (mask.shape[0] - 1) // 2
    hx = (mask.shape[1] - 1) // 2
    pad = [(ht, ht)] + [(hx, hx)] * d
    fpad = np.pad(data, pad, mode="constant")
    wpad = np.pad(np.ones_like(data), pad, mode="constant")
    num = np.zeros_like(data)
    den = np.zeros_like(data)
    offs = np.argwhere(mask)
    for off in offs:
        sl = tuple(slice(o, o + s) for o, s in zip(off, data.shape))
        w = wpad[sl]
        num += w * np.abs(fpad[sl] - avg)
        den += w
    return num / np.maximum(den, 0.5)


def sharp(st, data, kappa, mode="noncentered", radii=None):
    """Sharp function: sup over cylinders of the mean oscillation.

    'noncentered' (the definition) takes cylinders containing the point;
    'centered' restricts to cylinders centered at the point (the natural
    companion appearing in the two-sided comparison).
    """
    if radii is None:
        radii = default_radii(st, kappa)
    data = np.asarray(data, dtype=float)
    out = np.zeros_like(data)
    for delta in radii:
        mask = footprint(st, delta, kappa)
        avg, _ = _clipped_average(st, data, mask)
        dev = _deviation(st, data, mask, avg)
        if mode == "noncentered":
            dev = ndimage.maximum_filter(dev, footprint=mask, mode="constant",
                                         cval=0.0)
        out = np.maximum(out, dev)
    return out


def _distance_function(st, in_O, kappa, radii):
    """First radius whose cylinder touches the complement F, per point of O.

    Points of O whose cylinders never reach F (F empty in range) get the
    largest radius.
    """
    D = np.full(st.shape, np.nan)
    remaining = in_O.copy()
    F = (~in_O).astype(float)
    for delta in radii:
        if not remaining.any():
            break
        mask = footprint(st, delta, kappa)
        touch = ndimage.maximum_filter(F, footprint=mask, mode="constant",
                                       cval=1.0) > 0.5  # outside domain is F
        hit = remaining & touch
        D[hit] = delta
        remaining &= ~hit
    D[remaining] = radii[-1]
    return D


def _stamp(occupancy, center, mask, value=True):
    """Write mask (or test overlap) at center with boundary clipping."""
    sl_big = []
    sl_msk = []
    for ax in range(occupancy.ndim):
        h = (mask.shape[ax] - 1) // 2
        lo = center[ax] - h
        hi = center[ax] + h + 1
        mlo = max(0, -lo)
        mhi = mask.shape[ax] - max(0, hi - occupancy.shape[ax])
        sl_big.append(slice(max(0, lo), min(occupancy.shape[ax], hi)))
        sl_msk.append(slice(mlo, mhi))
    return tuple(sl_big), tuple(sl_msk)


def adaptive_factors(kappa, radii, c1=0.25):
    """Outer factor making kappa(c_out d) >= 2 kappa(c1 d) across the radii."""
    c_out = 2.0 * c1
    kd = np.array([kappa(c1 * d) for d in radii])
    for _ in range(200):
        ok = all(kappa(c_out * d) >= 2.0 * k - 1e-30
                 for d, k in zip(radii, kd))
        if ok:
            return c_out
        c_out *= 1.05
    raise RuntimeError("no engulfing outer factor below the search cap")


def cz_decompose(st, data, alpha, kappa, radii=None,
                 factors=(0.25, 0.5, 1.0), raise_on_empty=False):
    """Calderon-Zygmund decomposition f = g + sum_k b_k at level alpha.

    O = {noncentered maximal > alpha} is covered by exactly disjoint cells
    C^k built over a Vitali family of inner cylinders; on each cell
    b_k = (f - avg_{C^k} f) chi_{C^k}, so the parts reconstruct f exactly and
    every b_k has exactly zero grid integral. Returns the parts (as CellPart
    records on their cells), the cell index tuples, and the cylinder
    geometry (center, inner/outer radius) per cell.

    factors = (c1, reserved, outer_floor): inner radius c1 D(p); the outer
    radius is max(outer_floor, adaptive engulfing factor) * D(p).
    """
    data = np.asarray(data, dtype=float)
    if radii is None:
        radii = default_radii(st, kappa)
    M = maximal(st, data, kappa, mode="noncentered", radii=radii)
    in_O = M > alpha
    if not in_O.any():
        if raise_on_empty:
            raise EmptyLevelSet("level set empty at alpha=%g" % alpha)
        return {"g": data.copy(), "parts": [], "cells": [], "cylinders": [],
                "degenerate": True, "O_mask": in_O, "maximal": M}
    c1 = factors[0]
    c_out = max(factors[2], adaptive_factors(kappa, radii, c1))
    D = _distance_function(st, in_O, kappa, radii)

    pts = np.argwhere(in_O)
    Dvals = D[in_O]
    order = np.lexsort(tuple(pts[:, ax] for ax in range(pts.shape[1] - 1, -1, -1))
                       + (-Dvals,))
    owner = np.full(st.shape, -1, dtype=np.int64)
    selected = []
    centers = []
    for idx in order:
        p = tuple(pts[idx])
        mask = footprint(st, c1 * D[p], kappa)
        sb, sm = _stamp(owner, p, mask)
        window = owner[sb]
        sub = mask[sm]
        if (window[sub] >= 0).any():
            continue
        k = len(selected)
        window[sub] = k
        selected.append(p)
        centers.append((p, float(D[p])))
    # assignment: inner-cylinder membership wins (unique, cylinders disjoint),
    # otherwise the first stamped cylinder overlapping the point's own one
    label = np.full(st.shape, -1, dtype=np.int64)
    inside = owner >= 0
    label[in_O & inside] = owner[in_O & inside]
    rest = np.argwhere(in_O & ~inside)
    for p in map(tuple, rest):
        mask = footprint(st, c1 * D[p], kappa)
        sb, sm = _stamp(owner, p, mask)
        hits = owner[sb][mask[sm]]
        hits = hits[hits >= 0]
        label[p] = int(hits.min()) if hits.size else -1
    # any point whose inner cylinder was fully clipped falls back to itself
    for p in map(tuple, np.argwhere(in_O & (label < 0))):
        k = len(selected)
        selected.append(p)
        centers.append((p, float(D[p])))
        label[p] = k

    parts = []
    cells = []
    cylinders = []
    g = data.copy()
    for k, (p, Dk) in enumerate(centers):
        idx = np.nonzero(label == k)
        if idx[0].size == 0:
            cylinders.append({"center_index": p, "D": Dk, "inner": c1 * Dk,
                              "outer": c_out * Dk, "cells": 0})
            continue
        avg = float(data[idx].mean())
        parts.append(CellPart(index=idx, values=data[idx] - avg, avg=avg))
        g[idx] = avg
        cells.append(idx)
        cylinders.append({"center_index": p, "D": Dk, "inner": c1 * Dk,
                          "outer": c_out * Dk, "cells": int(idx[0].size)})
    return {"g": g, "parts": parts, "cells": cells, "cylinders": cylinders,
            "degenerate": False, "O_mask": in_O, "maximal": M,
            "c1": c1, "c_out": c_out, "distance": D}


def outer_measure(st, result, kappa):
    """sum_k |Q^{*k}| for the decomposition's outer cylinders (clipped)."""
    total = 0.0
    for cyl in result["cylinders"]:
        mask = footprint(st, cyl["outer"], kappa)
        sb, sm = _stamp(np.empty(st.shape), cyl["center_index"], mask)
        total += float(mask[sm].sum()) * st.cell
    return total


def weak_11_constant(st, data, kappa, alphas=None, mode="noncentered",
                     radii=None):
    """Empirical c in |{M f > alpha}| <= c/alpha * int |f| over an alpha sweep."""
    M = maximal(st, data, kappa, mode=mode, radii=radii)
    l1 = float(np.sum(np.abs(data))) * st.cell
    if alphas is None:
        alphas = np.geomspace(M.max() * 1e-3, M.max() * 0.99, 12)
    best = 0.0
    rows = []
    for a in alphas:
        meas = float((M > a).sum()) * st.cell
        c = meas * a / l1
        rows.append({"alpha": float(a), "measure": meas, "c": c})
        best = max(best, c)
    return {"c": best, "rows": rows}


def fefferman_stein_ratio(st, data, kappa, p, radii=None):
    """|f|_p / |f_sharp|_p on the grid (finite for nonconstant data)."""
    fs = sharp(st, data, kappa, mode="noncentered", radii=radii)
    num = (np.sum(np.abs(data) ** p) * st.cell) ** (1.0 / p)
    den = (np.sum(fs ** p) * st.cell) ** (1.0 / p)
    return num / max(den, 1e-300)


def le2_bound_check(st, data, kappa, alphas, lam):
    """|{f > alpha}| <= (4/alpha) int_{ {Mf > lam alpha} } f_sharp, f >= 0."""
    data = np.asarray(data, dtype=float)
    M = maximal(st, data, kappa, mode="noncentered")
    fs = sharp(st, data, kappa, mode="noncentered")
    rows = []
    for a in alphas:
        lhs = float((data > a).sum()) * st.cell
        rhs = 4.0 / a * float(fs[M > lam * a].sum()) * st.cell
        rows.append({"alpha": float(a), "lhs": lhs, "rhs": rhs,
                     "ok": bool(lhs <= rhs + 1e-12)})
    return rows


# ---------------------------------------------------------------------------
# the square-function operator G


def apply_G(st, K, f, mark_weights=None):
    """(G f)(t,x) = [ sum_s dt | (K(t-s) * f(s))(x) |_V^2 ]^{1/2}.

    K: array (nt, *spatial) of kernel slices at lags 0, dt, 2dt, ... (zero
    lag slice included; causal kernels set it to zero), or a callable
    tau -> spatial array. f: (nt, *spatial) scalar data or (nt, C, *spatial)
    V-valued with channel weights mark_weights.
    """
    from .spectral import forward, inverse
    grid = st.grid
    nt = st.nt
    f = np.asarray(f, dtype=float)
    vector = f.ndim == 1 + 1 + grid.d
    if callable(K):
        K = np.stack([K(m * st.dt) for m in range(nt)])
    Khat = np.stack([forward(grid, K[m]) for m in range(nt)])
    if vector:
        C = f.shape[1]
        w = np.ones(C) if mark_weights is None else np.asarray(mark_weights)
        fhat = np.stack([[forward(grid, f[j, c]) for c in range(C)]
                         for j in range(nt)])
    else:
        fhat = np.stack([forward(grid, f[j]) for j in range(nt)])
    out = np.zeros((nt,) + grid.shape)
    for i in range(nt):
        acc = np.zeros(grid.shape)
        for m in range(nt):
            j = i - m
            if j < 0:
                break
            if vector:
                s2 = np.zeros(grid.shape)
                for c in range(C):
                    conv = inverse(grid, Khat[m] * fhat[j, c]).real
                    s2 += w[c] * conv ** 2
                acc += st.dt * s2
            else:
                conv = inverse(grid, Khat[m] * fhat[j]).real
                acc += st.dt * conv ** 2
        out[i] = np.sqrt(acc)
    return out


def m0_bound(st, K):
    """Spectral sup bound M0: |G f|_{L2} <= M0 |f|_{L2(V)}."""
    from .spectral import forward
    nt = st.nt
    if callable(K):
        K = np.stack([K(m * st.dt) for m in range(nt)])
    acc = np.zeros(st.grid.shape)
    for m in range(nt):
        acc += st.dt * np.abs(forward(st.grid, K[m])) ** 2
    return float(np.sqrt(acc.max()))


def verify_stoch_hormander_lp(st, K, p_grid, corpus, mark_weights=None,
                              sweep_report=None):
    """Empirical A_p = sup_corpus |G f|_p / |f|_p for p > 2 (p = 2: M0 route).

    Requires the Hormander sweep report of the kernel when provided; refuses
    to certify if that sweep did not plateau.
    """
    if sweep_report is not None and not sweep_report.get("plateau", False):
        raise PrereqFailed("kernel failed the Hormander plateau check")
    rows = []
    for p in p_grid:
        worst = 0.0
        for f in corpus:
            f = np.asarray(f, dtype=float)
            Gf = apply_G(st, K, f, mark_weights)
            num = (np.sum(Gf ** p) * st.cell) ** (1.0 / p)
            if f.ndim == 1 + 1 + st.grid.d:
                w = np.ones(f.shape[1]) if mark_weights is None \
                    else np.asarray(mark_weights)
                vnorm = np.sqrt(np.einsum("jc...,c->j...", f ** 2, w))
            else:
                vnorm = np.abs(f)
            den = (np.sum(vnorm ** p) * st.cell) ** (1.0 / p)
            worst = max(worst, num / max(den, 1e-300))
        rows.append({"p": float(p), "A_p": worst})
    return {"rows": rows, "m0": m0_bound(st, K)}
