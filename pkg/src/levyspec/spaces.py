"""N-adic Littlewood-Paley windows and the generalized-smoothness norms.

The window system is built from one C-infinity radial bump: with
H(x) = exp(-1/x) (x > 0) and the ramp H(x)/(H(x)+H(1-x)), the cutoff
theta equals 1 on |xi| <= 1 and 0 on |xi| >= N, and the shell windows are
telescoping differences phi_j = theta(|xi|/N^j) - theta(|xi|/N^{j-1}).
Their sum collapses to theta(|xi|/N^J) = 1 on the whole grid, so the
partition of unity holds to machine precision by construction.

Norms: H_p^{mu;s} applies the multiplier (1 - psi_sym)^s then a discrete
L_p integral; Besov norms aggregate per-shell L_p block norms in ell_q,
weighted either by the same multiplier or by kappa(N^{-j})^{-s}.
Mark-channel (V_r) values use a weighted ell_r norm over the leading axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .spectral import forward, inverse
from .util import lp_norm, vr_reduce


class BaseTooLarge(ValueError):
    """Fewer than three shells fit below the grid Nyquist frequency."""


@dataclass
class NormReport:
    space: str
    p: float
    q: Optional[float]
    s: float
    weight_mode: str
    value: float


def _ramp(x):
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.maximum(1.0 - x, 1e-300)), 0.0)
    return a / (a + b)


def _theta(rho, N):
    out = _ramp((N - rho) / (N - 1.0))
    out = np.where(rho <= 1.0, 1.0, out)
    return np.where(rho >= N, 0.0, out)


@dataclass
class LPSystem:
    """Windows phi_0..phi_J and enlarged companions on a fixed grid."""

    grid: object
    N: int
    J: int
    windows: np.ndarray
    windows_tilde: np.ndarray

    @property
    def n_shells(self):
        return self.J


def build_lp_system(N, grid):
    """Construct the N-adic window system; J covers the full grid spectrum."""
    if N < 2 or int(N) != N:
        raise ValueError("N must be an integer >= 2")
    N = int(N)
    if grid.nyquist < N * N:
        raise BaseTooLarge(
            "Nyquist %.3g supports fewer than 3 shells of base %d"
            % (grid.nyquist, N))
    rho = grid.xi_radius()
    rho_max = float(rho.max())
    J = max(3, int(math.ceil(math.log(rho_max, N))))
    windows = [_theta(rho, N)]
    for j in range(1, J + 1):
        windows.append(_theta(rho / N ** j, N) - _theta(rho / N ** (j - 1), N))
    tilde = [_theta(rho / N, N)]
    for j in range(1, J + 1):
        tilde.append(_theta(rho / N ** (j + 1), N)
                     * (1.0 - _theta(rho / N ** (j - 2), N)))
    return LPSystem(grid=grid, N=N, J=J, windows=np.stack(windows),
                    windows_tilde=np.stack(tilde))


def lp_blocks(system, values):
    """Per-shell block functions: inverse transform of phi_j * f_hat.

    values may carry leading mark-channel axes; the windows broadcast over
    them. Returns an array with a new leading shell axis of length J+1.
    """
    grid = system.grid
    fhat = forward(grid, values)
    out = []
    for j in range(system.J + 1):
        out.append(inverse(grid, system.windows[j] * fhat))
    out = np.stack(out)
    if np.isrealobj(values):
        out = out.real
    return out


def _space_norm(grid, values, p, r=None, mark_weights=None):
    """Discrete L_p of |values(x)|_{V_r}; scalar values pass through."""
    values = np.asarray(values)
    if values.ndim > grid.d:
        if r is None:
            r = 2.0
        values = vr_reduce(values.reshape((-1,) + grid.shape), mark_weights, r)
    return lp_norm(np.abs(values), grid.cell, p)


def h_norm(values, table, s, p, r=None, mark_weights=None):
    """|f|_{H_p^{mu;s}} via the multiplier (1 - psi_sym)^s."""
    from .spectral import bessel_multiplier
    grid = table.grid
    mult = bessel_multiplier(table, s)
    lifted = inverse(grid, mult * forward(grid, values))
    if np.isrealobj(values):
        lifted = lifted.real
    val = _space_norm(grid, lifted, p, r, mark_weights)
    return NormReport(space="H", p=p, q=None, s=s, weight_mode="multiplier",
                      value=float(val))


def besov_norm(values, system, weight, s, p, q, r=None, mark_weights=None):
    """Besov norm from LP blocks.

    weight: a SymbolTable selects the multiplier form (J^s applied inside
    every block); a callable kappa selects the kappa(N^{-j})^{-s} weights.
    """
    from .spectral import bessel_multiplier
    grid = system.grid
    fhat = forward(grid, np.asarray(values))
    if callable(weight):
        block_w = [float(weight(float(system.N) ** (-j))) ** (-s)
                   for j in range(system.J + 1)]
        mult = None
        mode = "kappa"
    else:
        mult = bessel_multiplier(weight, s)
        block_w = [1.0] * (system.J + 1)
        mode = "multiplier"
    terms = []
    for j in range(system.J + 1):
        spec = system.windows[j] * fhat
        if mult is not None:
            spec = mult * spec
        block = inverse(grid, spec)
        if np.isrealobj(values):
            block = block.real
        terms.append(block_w[j] * _space_norm(grid, block, p, r, mark_weights))
    val = float(np.sum(np.asarray(terms) ** q) ** (1.0 / q))
    return NormReport(space="B", p=p, q=q, s=s, weight_mode=mode, value=val)


def approximate(values, system, n, n_marks=None):
    """Band- and mark-truncated approximant: shells 0..n, first n_marks channels.

    The spectral truncation multiplies by the cumulative window
    theta(|xi|/N^n), which is exactly phi_0 + ... + phi_n by telescoping.
    """
    if n < 1:
        raise ValueError("level n must be >= 1")
    grid = system.grid
    values = np.asarray(values)
    rho = grid.xi_radius()
    cum = _theta(rho / float(system.N) ** min(n, system.J), system.N)
    if n >= system.J:
        cum = np.ones_like(rho)
    out = inverse(grid, cum * forward(grid, values))
    if np.isrealobj(values):
        out = out.real
    if n_marks is not None and values.ndim > grid.d:
        flat = out.reshape((-1,) + grid.shape)
        flat[n_marks:] = 0.0
        out = flat.reshape(values.shape)
    return out


def embedding_check(functions, system, table, s, eps, p, r=None,
                    mark_weights=None):
    """Ratios behind the embeddings B_pp^{s+eps} -> H_p^s (-> B_pp^s for p>=2).

    Returns the per-function ratios and their maxima; boundedness across a
    corpus is the checkable content (constants are not explicit).
    """
    rows = []
    for f in functions:
        hv = h_norm(f, table, s, p, r, mark_weights).value
        bv_hi = besov_norm(f, system, table, s + eps, p, p, r, mark_weights).value
        row = {"h": hv, "b_upper": bv_hi,
               "h_over_b": hv / bv_hi if bv_hi > 0 else 0.0}
        if p >= 2:
            bv_lo = besov_norm(f, system, table, s, p, p, r, mark_weights).value
            row["b_lower"] = bv_lo
            row["b_over_h"] = bv_lo / hv if hv > 0 else 0.0
        rows.append(row)
    out = {"rows": rows,
           "max_h_over_b": max(r_["h_over_b"] for r_ in rows)}
    if p >= 2:
        out["max_b_over_h"] = max(r_["b_over_h"] for r_ in rows)
    return out
