"""Scaling-function calculus.

A scaling pair is (kappa, l): kappa maps a spatial radius to a time scale and
l controls its anisotropy through kappa(eps*r) <= l(eps)*kappa(r). Everything
downstream consumes the derived objects

    a      = generalized inverse of kappa   (time -> spatial scale),
    a_inv  = running sup of kappa           (spatial scale -> time),
    gamma  = generalized inverse of l,

plus the base N of the frequency decomposition and the cylinder engulfing
constant K0. Inverses are computed on a monotone envelope by log-space
bisection, exact for power laws to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class NotScaling(ValueError):
    """The pair (kappa, l) violates kappa(eps*r) <= l(eps)*kappa(r)."""


DOMAIN = (1e-12, 1e12)
_ENVELOPE_POINTS = 4096
_BISECT_ITERS = 80


def _log_envelope(f, domain, n):
    """Sampled running max of f on a log grid; inverts non-monotone inputs."""
    x = np.geomspace(domain[0], domain[1], n)
    vals = np.maximum.accumulate(np.asarray([float(f(v)) for v in x]))
    return x, vals


def _generalized_inverse(f, domain=DOMAIN, n=_ENVELOPE_POINTS):
    """inf{r : f(r) >= t} through the running-max envelope of f."""
    x, env = _log_envelope(f, domain, n)

    def inverse(t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t_arr)
        for k, tv in enumerate(t_arr):
            if tv <= env[0]:
                out[k] = x[0]
                continue
            if tv > env[-1]:
                out[k] = np.inf
                continue
            hi = int(np.searchsorted(env, tv, side="left"))
            lo_x, hi_x = math.log(x[max(hi - 1, 0)]), math.log(x[hi])
            # envelope is f itself on increasing stretches; bisect in log space
            for _ in range(_BISECT_ITERS):
                mid = 0.5 * (lo_x + hi_x)
                if float(f(math.exp(mid))) >= tv:
                    hi_x = mid
                else:
                    lo_x = mid
            out[k] = math.exp(hi_x)
        return out if np.ndim(t) else float(out[0])

    return inverse


@dataclass
class ScalingTriple:
    """kappa/l plus derived inverses and the decomposition base."""

    kappa: Callable
    l: Callable
    a: Callable
    a_inv: Callable
    gamma: Callable
    N: int
    K0: float
    label: str = "scaling"
    checks: dict = field(default_factory=dict)


def power_scaling(sigma):
    """kappa(R) = R^sigma with l(eps) = eps^sigma, the stable calibration."""
    def kappa(r):
        return float(r) ** sigma

    def l(e):
        return float(e) ** sigma

    return derive_inverses(kappa, l, label="power%g" % sigma)


def bernstein_scaling(kernel, C1=None):
    """kappa(R) = R^{-d} / j(R) with the two-power envelope l.

    l(eps) = C1 * eps^{2 delta1} for eps <= 1 and C1 * eps^{2 delta2} beyond;
    C1 defaults to the kernel's envelope constant (1 for exact power sums).
    """
    d = kernel.d
    if C1 is None:
        from .measures import check_kernel
        # envelope constant over the full inverse-square range seen by kappa
        consts = check_kernel(kernel, n_samples=320, r_range=(1e-12, 1e12))
        C1 = max(1.0, consts["N_envelope"]) * (1.0 + 1e-6)
    d1, d2 = 2.0 * kernel.delta1, 2.0 * kernel.delta2

    def kappa(r):
        return float(r) ** (-d) / float(kernel.j(np.array([float(r)]))[0])

    def l(e):
        e = float(e)
        return C1 * e ** (d1 if e <= 1.0 else d2)

    return derive_inverses(kappa, l, label="bernstein_" + kernel.label)


def derive_inverses(kappa, l, domain=DOMAIN, n_check=32, slack=1e-9,
                    label="scaling", strict=True):
    """Validate the scaling inequality on a log grid and build the triple.

    kappa(eps*r) <= l(eps)*kappa(r) is checked on an n_check x n_check grid of
    (eps, r) in [1e-6, 1e6]^2 with multiplicative slack 1+1e-9; violation
    raises NotScaling naming the worst (eps, r).
    """
    eps = np.geomspace(1e-6, 1e6, n_check)
    r = np.geomspace(1e-6, 1e6, n_check)
    worst = (1.0, None, None)
    for e in eps:
        le = float(l(e))
        for rv in r:
            lhs = float(kappa(e * rv))
            rhs = le * float(kappa(rv))
            if lhs > rhs * (1.0 + slack):
                q = lhs / rhs
                if q > worst[0]:
                    worst = (q, e, rv)
    if worst[1] is not None and strict:
        raise NotScaling(
            "kappa(eps r) > l(eps) kappa(r) by factor %.4g at eps=%.3g, r=%.3g"
            % worst)

    a = _generalized_inverse(kappa, domain)
    x, env = _log_envelope(kappa, domain, _ENVELOPE_POINTS)

    def a_inv(svals):
        s_arr = np.atleast_1d(np.asarray(svals, dtype=float))
        idx = np.clip(np.searchsorted(x, s_arr, side="right") - 1, 0, len(x) - 1)
        out = np.maximum(env[idx], [float(kappa(v)) for v in s_arr])
        return out if np.ndim(svals) else float(out[0])

    gamma = _generalized_inverse(l, domain)

    # base: smallest integer N >= 2 with l(1/N) < 1
    N = 2
    while N < 10 ** 6 and float(l(1.0 / N)) >= 1.0:
        N += 1
    if N >= 10 ** 6:
        raise NotScaling("no admissible base: l(1/N) never drops below 1")

    # engulfing: smallest K0 >= 3 with l(1/K0) <= 1/3 on a coarse search grid,
    # refined by engulfing_constant when geometry matters
    K0 = 3.0
    while K0 < 1e3 and float(l(1.0 / K0)) > 1.0 / 3.0:
        K0 *= 1.25
    triple = ScalingTriple(kappa=kappa, l=l, a=a, a_inv=a_inv, gamma=gamma,
                           N=N, K0=float(K0), label=label,
                           checks={"scaling_ok": worst[1] is None,
                                   "worst": worst})
    return triple


@dataclass
class EngulfingReport:
    K0: float
    ok: bool
    detail: str = ""


def engulfing_constant(triple, n_delta=24, K_cap=1e3):
    """Smallest grid K0 >= 3 with both engulfing conditions verified.

    For sampled delta' <= delta and touching cylinders the containment needs
    3*delta <= K0*delta (spatial) and kappa(delta) + 2*kappa(delta') <=
    kappa(K0*delta) (temporal); the volume growth |Q_{K0 d}| <= K0^d l(K0) |Q_d|
    follows from the scaling inequality and is spot checked.
    """
    deltas = np.geomspace(1e-6, 1e6, n_delta)
    kappa = triple.kappa
    K = 3.0
    while K <= K_cap:
        ok = True
        for dl in deltas:
            kd = kappa(K * dl)
            for dp in deltas[deltas <= dl]:
                if kappa(dl) + 2.0 * kappa(dp) > kd * (1.0 + 1e-12):
                    ok = False
                    break
            if not ok:
                break
            if kd > triple.l(K) * kappa(dl) * (1.0 + 1e-9):
                ok = False
                break
        if ok:
            return EngulfingReport(K0=float(K), ok=True)
        K *= 1.25
    return EngulfingReport(K0=math.inf, ok=False,
                           detail="no engulfing constant below cap %g" % K_cap)


@dataclass
class IntegrabilityReport:
    verdicts: dict
    values: dict
    passed: bool


def _tail_integral(f, lo, hi, n_per_decade=64):
    t = np.geomspace(lo, hi, max(int(n_per_decade * np.log10(hi / lo)), 8))
    g = np.array([float(f(v)) * v for v in t])  # dt = t dlog t
    return float(np.trapezoid(g, np.log(t)))


def check_t1_integrability(triple, alpha2, p=2.0, beta0=None, beta1=0.5,
                           beta2=0.5, t_levels=(1e4, 1e6), rel_tol=0.05):
    """Numerically test the integral conditions behind the main estimates.

    Main condition: int_1^inf dt / (t * gamma(t)^{min(1,alpha2)}).
    For p > 2 additionally int_0^1 gamma^{-beta1}, int_0^1 l^{beta2} dt/t and
    int_1^inf gamma^{-beta0} dt/t with beta0 < alpha2. Each integral is
    evaluated at two truncation levels; verdict 'finite' when they agree to
    rel_tol, 'divergent' when the increment grows, else 'inconclusive'.
    """
    if beta0 is None:
        beta0 = 0.5 * alpha2
    gam = triple.gamma
    conds = {
        "main": lambda t: 1.0 / (t * gam(t) ** min(1.0, alpha2)),
    }
    if p > 2.0:
        conds["gamma_small"] = lambda t: gam(t) ** (-beta1)
        conds["l_small"] = lambda t: triple.l(t) ** beta2 / t
        conds["gamma_tail"] = lambda t: gam(t) ** (-beta0) / t
    verdicts, values = {}, {}
    for name, f in conds.items():
        if name in ("gamma_small", "l_small"):
            lo_levels = (1e-4, 1e-6)
            i1 = _tail_integral(f, lo_levels[0], 1.0)
            i2 = _tail_integral(f, lo_levels[1], 1.0)
        else:
            i1 = _tail_integral(f, 1.0, t_levels[0])
            i2 = _tail_integral(f, 1.0, t_levels[1])
        inc = abs(i2 - i1)
        rel = inc / max(abs(i2), 1e-300)
        if rel <= rel_tol:
            verdicts[name] = "finite"
        elif inc > 0.5 * abs(i1):
            verdicts[name] = "divergent"
        else:
            verdicts[name] = "inconclusive"
        values[name] = (i1, i2)
    passed = all(v == "finite" for v in verdicts.values())
    return IntegrabilityReport(verdicts=verdicts, values=values, passed=passed)
