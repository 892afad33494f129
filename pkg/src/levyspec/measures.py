"""Levy measures in radial-angular quadrature form.

A measure pi on R^d minus the origin is represented by unit vectors w_i with
angular weights S_i and a radial density rho_i per node, so that

    int f d(pi) = sum_i S_i int_0^inf f(r w_i) rho_i(r) dr.

The module provides the stable family, kernels derived from Bernstein
functions (complete-monotonicity profiles j with power-law envelopes), the
zoom rescaling  pi_R(G) = pi({y : y/R in G})  with its normalised version
kappa(R) * pi_R, and the numerical certificates used downstream:

  * domination of a fixed small-ball reference measure mu0 at every zoom level,
  * uniform small-ball / tail moment bounds across zoom levels,
  * the nondegeneracy certificate (n0, c1) for mu0 itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special


class InvalidMeasure(ValueError):
    pass


class DominationFailed(RuntimeError):
    """Raised when a rescaled measure fails to dominate the reference measure."""

    def __init__(self, R, y, ratio):
        self.R = R
        self.y = y
        self.ratio = ratio
        super().__init__(
            "domination fails at zoom R=%g near y=%s (density ratio %.3g < 1)"
            % (R, np.array2string(np.atleast_1d(y), precision=3), ratio))


class MomentUnbounded(RuntimeError):
    """Raised when the zoom-family moment bounds grow without saturating."""

    def __init__(self, which, values):
        self.which = which
        self.values = values
        super().__init__(
            "%s moments grow across the zoom grid (first %.3g, last %.3g)"
            % (which, values[0], values[-1]))


class KernelAssumptionFailed(RuntimeError):
    def __init__(self, which, detail):
        self.which = which
        super().__init__("kernel assumption %s failed: %s" % (which, detail))


def compensator_regime(sigma):
    """Jump compensation used in the symbol: none, unit ball, or everywhere."""
    if sigma < 1.0:
        return "none"
    if sigma == 1.0:
        return "ball"
    return "full"


@dataclass(frozen=True)
class LevyMeasure:
    """Radial-angular Levy measure.

    radial_density(r, i) must accept an ndarray of radii and a node index and
    return the density values of node i. r_support is an upper radius beyond
    which the density vanishes identically (np.inf when untruncated).
    """

    d: int
    sigma: float
    angular_nodes: np.ndarray
    angular_weights: np.ndarray
    radial_density: Callable[[np.ndarray, int], np.ndarray]
    symmetric: bool
    r_support: float = np.inf
    label: str = "levy"
    # same radial profile at every node; enables caching in the symbol quadrature
    radial_shared: bool = False

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.angular_nodes, dtype=float))
        object.__setattr__(self, "angular_nodes", nodes)
        object.__setattr__(self, "angular_weights",
                           np.asarray(self.angular_weights, dtype=float))
        if not 0.0 < self.sigma < 2.0:
            raise InvalidMeasure("sigma must lie in (0,2), got %r" % (self.sigma,))
        if nodes.shape[1] != self.d:
            raise InvalidMeasure("angular node dimension mismatch")
        if np.any(self.angular_weights < 0):
            raise InvalidMeasure("angular weights must be nonnegative")

    @property
    def n_nodes(self):
        return self.angular_nodes.shape[0]

    def radial(self, r, i):
        r = np.asarray(r, dtype=float)
        out = np.asarray(self.radial_density(r, i), dtype=float)
        if np.isfinite(self.r_support):
            out = np.where(r <= self.r_support, out, 0.0)
        return out

    @property
    def compensator(self):
        return compensator_regime(self.sigma)


_RADIAL_WINDOW = (1e-18, 1e18)


def radial_moment(measure, q, lo=0.0, hi=np.inf, per_node=False):
    """sum_i S_i int_lo^hi r^q rho_i(r) dr via a log substitution.

    The substitution r = e^u removes the algebraic endpoint singularity at
    r -> 0 whenever the moment is finite. Open endpoints are clamped to the
    radial window [1e-18, 1e18]; for the algebraic densities in scope the
    truncated contribution is negligible whenever the moment is finite.
    """
    hi = min(hi, measure.r_support)
    vals = np.zeros(measure.n_nodes)
    if hi <= lo:
        return (0.0, vals) if per_node else 0.0
    u_lo = np.log(max(lo, _RADIAL_WINDOW[0]))
    u_hi = np.log(min(hi, _RADIAL_WINDOW[1]))
    for i in range(measure.n_nodes):
        def f(u, i=i):
            r = np.exp(u)
            return r ** (q + 1) * float(measure.radial(np.array([r]), i)[0])
        val, _ = integrate.quad(f, u_lo, u_hi, limit=400)
        vals[i] = val
    total = float(np.sum(measure.angular_weights * vals))
    return (total, vals) if per_node else total


def validate_levy_measure(m, n_samples=64):
    """Check the defining integrability and symmetry constraints.

    Raises InvalidMeasure with the failing condition. Returns a dict of the
    computed moments for reporting.
    """
    small = radial_moment(m, 2.0, 0.0, 1.0)
    tail = radial_moment(m, 0.0, 1.0, np.inf)
    # divergence shows up as growth when the truncation window is widened
    small_in = radial_moment(m, 2.0, 1e-6, 1.0)
    tail_in = radial_moment(m, 0.0, 1.0, 1e6)
    if not np.isfinite(small) or small > 100.0 * max(small_in, 1e-300):
        raise InvalidMeasure("int_{|y|<=1} |y|^2 d pi is not finite")
    if not np.isfinite(tail) or tail > 100.0 * max(tail_in, 1e-300):
        raise InvalidMeasure("int_{|y|>1} d pi is not finite")
    out = {"second_moment_ball": small, "mass_tail": tail}
    if 1.0 < m.sigma < 2.0:
        first_tail = radial_moment(m, 1.0, 1.0, np.inf)
        first_in = radial_moment(m, 1.0, 1.0, 1e6)
        if not np.isfinite(first_tail) or first_tail > 100.0 * max(first_in, 1e-300):
            raise InvalidMeasure("int_{|y|>1} |y| d pi must be finite for sigma in (1,2)")
        out["first_moment_tail"] = first_tail
    if m.sigma == 1.0 and not m.symmetric:
        # shell means int_{R<|y|<=R'} y dpi must vanish; enforced structurally
        raise InvalidMeasure("sigma=1 requires an antipodally symmetric measure")
    r = np.geomspace(1e-8, min(m.r_support, 1e8), n_samples)
    for i in range(m.n_nodes):
        if np.any(m.radial(r, i) < 0):
            raise InvalidMeasure("radial density of node %d takes negative values" % i)
    return out


def _uniform_sphere(d, n_angles):
    if d == 1:
        nodes = np.array([[1.0], [-1.0]])
        weights = np.array([1.0, 1.0])
    elif d == 2:
        # antipodally symmetric trapezoidal rule on the circle, total mass 2*pi
        if n_angles % 2:
            n_angles += 1
        th = 2.0 * np.pi * np.arange(n_angles) / n_angles
        nodes = np.stack([np.cos(th), np.sin(th)], axis=1)
        weights = np.full(n_angles, 2.0 * np.pi / n_angles)
    else:
        raise InvalidMeasure("only d in {1,2} is supported")
    return nodes, weights


def make_stable(d, sigma, n_angles=64):
    """Rotation-invariant stable measure dy / |y|^{d+sigma}."""
    nodes, weights = _uniform_sphere(d, n_angles)

    def rho(r, i, s=sigma):
        return r ** (-1.0 - s)

    m = LevyMeasure(d=d, sigma=float(sigma), angular_nodes=nodes,
                    angular_weights=weights, radial_density=rho,
                    symmetric=True, label="stable%g_d%d" % (sigma, d),
                    radial_shared=True)
    return m


# ---------------------------------------------------------------------------
# Bernstein-function kernels


@dataclass(frozen=True)
class BernsteinKernel:
    """phi is a Bernstein function, j the matching heat-kernel average.

    lambda_nodes / lambda_weights give a quadrature for the representing
    measure of phi (used for reference checks; j itself may be closed form).
    delta1 <= delta2 are the power-envelope exponents of phi.
    """

    d: int
    phi: Callable[[np.ndarray], np.ndarray]
    j: Callable[[np.ndarray], np.ndarray]
    delta1: float
    delta2: float
    lambda_nodes: Optional[np.ndarray] = None
    lambda_weights: Optional[np.ndarray] = None
    label: str = "bernstein"


def power_sum_kernel(alphas, coeffs=None, d=1):
    """phi(r) = sum_i c_i r^{a_i} with the exact closed-form kernel

    j(r) = sum_i c_i (a_i / Gamma(1-a_i)) pi^{-d/2} 4^{a_i} Gamma(d/2+a_i) r^{-d-2 a_i}.
    """
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas <= 0) or np.any(alphas >= 1):
        raise InvalidMeasure("power exponents must lie in (0,1)")
    coeffs = np.ones_like(alphas) if coeffs is None else np.asarray(coeffs, float)
    jc = coeffs * (alphas / special.gamma(1.0 - alphas)) * np.pi ** (-d / 2.0) \
        * 4.0 ** alphas * special.gamma(d / 2.0 + alphas)

    def phi(r):
        r = np.asarray(r, dtype=float)
        return np.sum([c * r ** a for c, a in zip(coeffs, alphas)], axis=0)

    def j(r):
        r = np.asarray(r, dtype=float)
        return np.sum([c * r ** (-d - 2.0 * a) for c, a in zip(jc, alphas)], axis=0)

    # reference quadrature for the representing measure of phi:
    # density sum_i c_i a_i/Gamma(1-a_i) t^{-1-a_i} on a wide log grid
    t = np.geomspace(1e-12, 1e12, 481)
    lam = np.sum([c * (a / special.gamma(1.0 - a)) * t ** (-1.0 - a)
                  for c, a in zip(coeffs, alphas)], axis=0)
    lw = lam * t * np.gradient(np.log(t))
    return BernsteinKernel(d=d, phi=phi, j=j, delta1=float(alphas.min()),
                           delta2=float(alphas.max()), lambda_nodes=t,
                           lambda_weights=lw,
                           label="powersum" + "_".join("%g" % a for a in alphas))


def log_kernel(alpha, beta, d=1):
    """phi(r) = r^alpha * ln(1+r)^beta with beta in (0, 1-alpha).

    No explicit representing density is used; the kernel is taken in profile
    form j(r) = phi(r^{-2}) r^{-d}, which keeps the two-sided envelope checks
    meaningful while pinning j to phi exactly.
    """
    if not (0 < alpha < 1 and 0 < beta < 1 - alpha):
        raise InvalidMeasure("need 0<alpha<1 and 0<beta<1-alpha")

    def phi(r):
        r = np.asarray(r, dtype=float)
        return r ** alpha * np.log1p(r) ** beta

    def j(r):
        r = np.asarray(r, dtype=float)
        return phi(r ** -2.0) * r ** (-float(d))

    return BernsteinKernel(d=d, phi=phi, j=j, delta1=float(alpha),
                           delta2=float(alpha + beta),
                           label="log%g_%g" % (alpha, beta))


def check_kernel(kernel, n_samples=240, r_range=(1e-6, 1e6)):
    """Empirical constants for the kernel envelopes.

    Returns dict with
      N_profile : two-sided comparability constant between j(r) and
                  phi(r^{-2}) r^{-d} over the sample range,
      N_envelope: smallest N with N^{-1}(R/r)^{d1} <= phi(R)/phi(r) <= N(R/r)^{d2}
                  over sampled pairs r <= R.
    Raises KernelAssumptionFailed if either constant is not finite.
    """
    r = np.geomspace(r_range[0], r_range[1], n_samples)
    jr = kernel.j(r)
    prof = kernel.phi(r ** -2.0) * r ** (-float(kernel.d))
    if np.any(jr <= 0) or np.any(prof <= 0):
        raise KernelAssumptionFailed("profile", "nonpositive kernel values")
    ratio = jr / prof
    n_profile = float(max(ratio.max(), 1.0 / ratio.min()))

    pr = kernel.phi(r)
    n_env = 1.0
    step = max(1, n_samples // 120)
    for i in range(0, n_samples, step):
        rest = slice(i, n_samples)
        q = pr[rest] / pr[i]
        scale = (r[rest] / r[i])
        up = q / scale ** kernel.delta2
        lo = q / scale ** kernel.delta1
        n_env = max(n_env, float(up.max()), float(1.0 / lo.min()))
    if not (np.isfinite(n_profile) and np.isfinite(n_env)):
        raise KernelAssumptionFailed("envelope", "constant not finite")
    return {"N_profile": n_profile, "N_envelope": n_env}


def make_bernstein(kernel, n_angles=64, a=None, rho0=None, check=True):
    """Levy measure with radial density a(r,w) j(r) r^{d-1}.

    a (optional callable (r, node_index) -> values in [rho0_i, 1]) modulates
    the density per direction; the default a = 1 gives the reference measure
    that the two-measure estimates compare against.
    """
    if check:
        consts = check_kernel(kernel)
    else:
        consts = {}
    nodes, weights = _uniform_sphere(kernel.d, n_angles)
    dm1 = kernel.d - 1

    if a is None:
        def rho(r, i):
            return kernel.j(r) * r ** dm1
        symmetric = True
        rho0_arr = np.ones(len(weights))
    else:
        def rho(r, i):
            return a(r, i) * kernel.j(r) * r ** dm1
        rr = np.geomspace(1e-6, 1e6, 200)
        av = np.stack([np.asarray(a(rr, i), dtype=float)
                       for i in range(len(weights))])
        if np.any(av > 1.0 + 1e-12) or np.any(av < 0):
            raise KernelAssumptionFailed("modulation", "a(r,w) outside [0,1]")
        rho0_arr = av.min(axis=1) if rho0 is None else np.asarray(rho0, float)
        if np.any(av < rho0_arr[:, None] - 1e-12):
            raise KernelAssumptionFailed("modulation", "a(r,w) < rho0(w)")
        # antipodal symmetry of the modulated density, needed at sigma=1
        symmetric = _antipodal(nodes, av)
    # nondegeneracy: min over directions of sum_i S_i rho0_i (xi . w_i)^2
    xi = _uniform_sphere(kernel.d, 64)[0]
    quad = np.einsum("kd,id->ki", xi, nodes) ** 2
    c_min = float((quad * (weights * rho0_arr)).sum(axis=1).min())
    if check and c_min <= 0:
        raise KernelAssumptionFailed("nondegeneracy", "angular form degenerate")

    sigma = 2.0 * kernel.delta2
    m = LevyMeasure(d=kernel.d, sigma=sigma, angular_nodes=nodes,
                    angular_weights=weights, radial_density=rho,
                    symmetric=symmetric,
                    label=kernel.label + ("" if a is None else "_mod"),
                    radial_shared=a is None)
    object.__setattr__(m, "kernel", kernel)
    object.__setattr__(m, "kernel_constants", consts)
    object.__setattr__(m, "rho0", rho0_arr)
    object.__setattr__(m, "angular_c_min", c_min)
    return m


def _antipodal(nodes, values):
    n = nodes.shape[0]
    for i in range(n):
        diff = nodes + nodes[i]
        jm = int(np.argmin(np.einsum("ij,ij->i", diff, diff)))
        if np.linalg.norm(nodes[jm] + nodes[i]) > 1e-12:
            return False
        if values is not None and not np.allclose(values[i], values[jm]):
            return False
    return True


# ---------------------------------------------------------------------------
# zoom rescaling and the scalability certificates


def rescale(pi, R, kappa):
    """Normalised zoom kappa(R) * pi({y : y/R in .}).

    kappa may be a callable or a ScalingTriple-like object with .kappa.
    For the stable family this is the identity map for every R.
    """
    kfun = getattr(kappa, "kappa", kappa)
    kR = float(kfun(R))
    R = float(R)

    def rho(r, i):
        return kR * R * pi.radial(np.asarray(r) * R, i)

    return LevyMeasure(d=pi.d, sigma=pi.sigma, angular_nodes=pi.angular_nodes,
                       angular_weights=pi.angular_weights, radial_density=rho,
                       symmetric=pi.symmetric,
                       r_support=pi.r_support / R if np.isfinite(pi.r_support) else np.inf,
                       label=pi.label + "~R%g" % R,
                       radial_shared=pi.radial_shared)


def default_mu0(pi, c=1.0):
    """Small-ball reference measure on |y| <= 1 matched to pi's family.

    Stable pi: c * 1_{r<=1} r^{-1-sigma} on the same angular scheme.
    Bernstein pi: c * 1_{r<=1} r^{-1-2 delta1} rho0(w), per the kernel envelope.
    """
    kernel = getattr(pi, "kernel", None)
    if kernel is None:
        expo = -1.0 - pi.sigma
        scale = np.ones(pi.n_nodes)
        sig0 = pi.sigma
    else:
        expo = -1.0 - 2.0 * kernel.delta1
        scale = np.asarray(getattr(pi, "rho0", np.ones(pi.n_nodes)), float)
        sig0 = 2.0 * kernel.delta1

    def rho(r, i):
        return c * scale[i] * r ** expo

    return LevyMeasure(d=pi.d, sigma=sig0, angular_nodes=pi.angular_nodes,
                       angular_weights=pi.angular_weights, radial_density=rho,
                       symmetric=pi.symmetric, r_support=1.0,
                       label=pi.label + "_mu0",
                       radial_shared=bool(np.all(scale == scale[0])))


@dataclass
class Mu0Certificate:
    """Numerical nondegeneracy certificate for a small-ball measure."""

    mu0: LevyMeasure
    n0: float
    c1: float
    details: dict = field(default_factory=dict)


def _node_moment(mu0, i, q, lo=0.0, hi=1.0):
    """int_lo^hi r^q rho_i(r) dr for a single angular node (log substitution)."""
    hi = min(hi, mu0.r_support)
    u_lo = np.log(max(lo, _RADIAL_WINDOW[0]))

    def f(u):
        r = np.exp(u)
        return r ** (q + 1) * float(mu0.radial(np.array([r]), i)[0])

    val, _ = integrate.quad(f, u_lo, np.log(hi), limit=400)
    return val


def certify_mu0(mu0, n_r=800, n_xi=240, xi_cap=1e5, refine=True):
    """Compute the certificate pair (n0, c1) for a small-ball measure.

    n0 bounds  int |y|^2 mu0 + int |xi|^4 (1+lam)^{d+3} e^{-psi0} dxi  where
    psi0 is the symmetrised truncated symbol and lam the compensated first
    moment profile; c1 is the minimal directional second moment. The two
    quadrature refinement levels must agree to 1e-3 relative.
    """
    second = radial_moment(mu0, 2.0, 0.0, 1.0)
    chi = compensator_regime(mu0.sigma) != "none"
    S = mu0.angular_weights
    nodes = mu0.angular_nodes
    if mu0.d == 1:
        dirs, ang_w = np.array([[1.0]]), np.array([2.0])  # even integrand
    else:
        dirs, ang_w = _uniform_sphere(2, 32)

    def xi_integral(n_r_loc, n_xi_loc):
        r = np.geomspace(1e-10, 1.0, n_r_loc)
        lw = r * np.gradient(np.log(r))  # dr weights on the log grid
        lw[0] *= 0.5  # trapezoid ends, else the r = 1 node is overweighted
        lw[-1] *= 0.5
        dens = np.stack([mu0.radial(r, i) for i in range(mu0.n_nodes)])
        xi_mag = np.geomspace(1e-3, xi_cap, n_xi_loc)
        g = np.zeros(n_xi_loc)  # radial integrand in the log variable
        for k, xm in enumerate(xi_mag):
            row = 0.0
            for v, aw in zip(dirs, ang_w):
                om = 2.0 * np.pi * xm * np.einsum("id,d->i", nodes, v)
                s2 = np.sin(0.5 * np.abs(om)[:, None] * r[None, :]) ** 2
                psi0 = float(np.sum(S[:, None] * 2.0 * s2 * dens * lw[None, :]))
                if chi:
                    cap = np.minimum(xm * r, 1.0)
                    lam = float(np.sum(S[:, None] * (r * cap)[None, :] * dens
                                       * lw[None, :]))
                else:
                    lam = 0.0
                row += aw * xm ** 4 * (1.0 + lam) ** (mu0.d + 3) * np.exp(-psi0)
            g[k] = row * xm ** mu0.d  # r^{d-1} dr = r^d dlog(r)
        return float(np.trapezoid(g, np.log(xi_mag)))

    coarse = xi_integral(n_r // 2, n_xi // 2)
    fine = xi_integral(n_r, n_xi)
    rel = abs(fine - coarse) / max(abs(fine), 1e-300)
    if refine and rel > 1e-3:
        raise InvalidMeasure(
            "certificate integral did not converge across refinements (rel %.2g)" % rel)
    n0 = second + fine

    m2 = np.array([_node_moment(mu0, i, 2.0) for i in range(mu0.n_nodes)])
    xi_dirs = _uniform_sphere(mu0.d, 64)[0]
    quad = np.einsum("kd,id->ki", xi_dirs, mu0.angular_nodes) ** 2
    c1 = float((quad * (mu0.angular_weights * m2)).sum(axis=1).min())
    return Mu0Certificate(mu0=mu0, n0=float(n0), c1=c1,
                          details={"second_moment": second, "xi_integral": fine,
                                   "refinement_rel": rel})


def default_alphas(pi):
    """Default moment exponents (alpha1, alpha2) for the zoom moment bound.

    Stable sigma-regimes: (1, sigma/2) for sigma<1, (2, 1/2) at sigma=1,
    (2, (1+sigma)/2) for sigma in (1,2). Bernstein kernels follow the envelope
    prescription alpha1 > 2 delta2, alpha2 < 2 delta1.
    """
    kernel = getattr(pi, "kernel", None)
    if kernel is not None:
        a1 = min(2.0, 2.0 * kernel.delta2 + 0.5)
        a2 = 0.5 * 2.0 * kernel.delta1
        return a1, a2
    s = pi.sigma
    if s < 1.0:
        return 1.0, 0.5 * s
    if s == 1.0:
        return 2.0, 0.5
    return 2.0, 0.5 * (1.0 + s)


@dataclass
class AssumptionReport:
    passed: bool
    alpha1: float
    alpha2: float
    N0: float
    moments: dict
    domination_margin: dict
    c1_used: float
    failures: list


def check_domination(pi, kappa, mu0, R_grid, n_r=160):
    """Min density ratio (rescaled pi) / mu0 over radii in (0,1] per zoom R.

    The largest admissible scaling constant for mu0 is exactly this minimum,
    so it doubles as the certificate constant search.
    """
    r = np.geomspace(1e-8, 1.0, n_r)
    margins = {}
    worst = (None, None, np.inf)
    kfun = getattr(kappa, "kappa", kappa)
    for R in R_grid:
        scaled = rescale(pi, R, kfun)
        m = np.inf
        arg = None
        for i in range(pi.n_nodes):
            denom = mu0.radial(r, i)
            mask = denom > 0
            if not mask.any():
                continue
            ratio = scaled.radial(r[mask], i) / denom[mask]
            k = int(np.argmin(ratio))
            if ratio[k] < m:
                m = float(ratio[k])
                arg = r[mask][k] * pi.angular_nodes[i]
        margins[float(R)] = m
        if m < worst[2]:
            worst = (float(R), arg, m)
    return margins, worst


def check_moment_bound(pi, kappa, R_grid, alpha1, alpha2):
    """Small-ball and tail moments of the normalised zooms per R."""
    kfun = getattr(kappa, "kappa", kappa)
    out = {}
    for R in R_grid:
        scaled = rescale(pi, R, kfun)
        small = radial_moment(scaled, alpha1, 0.0, 1.0)
        tail = radial_moment(scaled, alpha2, 1.0, np.inf)
        out[float(R)] = (small, tail)
    return out


def check_assumptions(pi, kappa, mu0cert, R_grid=None, alpha1=None, alpha2=None,
                      strict=True, growth_factor=100.0):
    """Verify domination and uniform moment bounds across a zoom grid.

    R_grid defaults to 25 log-spaced zooms in [1e-4, 1e4]. strict=True raises
    DominationFailed / MomentUnbounded at the first violation; otherwise the
    report collects failures.
    """
    if R_grid is None:
        R_grid = np.geomspace(1e-4, 1e4, 25)
    if alpha1 is None or alpha2 is None:
        d1, d2 = default_alphas(pi)
        alpha1 = d1 if alpha1 is None else alpha1
        alpha2 = d2 if alpha2 is None else alpha2
    failures = []

    margins, worst = check_domination(pi, kappa, mu0cert.mu0, R_grid)
    if worst[2] < 1.0 - 1e-9:
        if strict:
            raise DominationFailed(worst[0], worst[1], worst[2])
        failures.append("domination: min ratio %.3g at R=%g" % (worst[2], worst[0]))

    moments = check_moment_bound(pi, kappa, R_grid, alpha1, alpha2)
    totals = np.array([moments[float(R)][0] + moments[float(R)][1] for R in R_grid])
    N0 = float(totals.max())
    # unbounded growth shows as a monotone trend reaching growth_factor
    half = len(totals) // 2
    for seq, side in ((totals[half:], "tail-zoom"), (totals[:half][::-1], "small-zoom")):
        if len(seq) >= 3 and np.all(np.diff(seq) > 0) and seq[-1] / seq[0] > growth_factor:
            if strict:
                raise MomentUnbounded(side, seq)
            failures.append("moments grow on the %s side" % side)

    return AssumptionReport(passed=not failures, alpha1=alpha1, alpha2=alpha2,
                            N0=N0, moments=moments, domination_margin=margins,
                            c1_used=mu0cert.c1, failures=failures)
