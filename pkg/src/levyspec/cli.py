"""Batch experiment driver: config in, deterministic CSV reports out.

Config files are YAML mappings.  Every key is optional except `seed` and
`suites`; defaults are filled in and the fully resolved tree is written to
the run manifest, so no default stays hidden.

    measure:
      family: stable        # stable | bernstein
      sigma: 1.0            # stable index in (0, 2)
      phi: power_sum        # bernstein function id: power_sum | log
      alphas: [0.5]         # power_sum exponents in (0, 1)
      coeffs: [1.0]         # power_sum coefficients (optional)
      alpha: 0.5            # log kernel parameters
      beta: 1.0
      n_angles: 64
    d: 1                    # 1 | 2
    grid: {n: 256, box: 16.0}
    lp_base: auto           # dyadic decomposition base N > 1, auto -> 2
    kappa: auto             # scaling function; auto, or {power: q}
    p: [1.5, 2.0, 3.0, 4.0]
    s: [0.0]
    lam: [0.0, 1.0, 10.0]
    T: 1.0
    dt: null                # solver step, default T/256
    times: [0.5, 1.0, 2.0]  # density / solver snapshot times
    paths: 2000             # Monte Carlo ensemble size
    paths_big: 4000         # ensemble size for the heavy-tailed p = 4 rows
    n_steps: 64             # stochastic-integral time resolution
    masses: [0.7, 0.3]      # mark intensities, one channel each
    nt: 32                  # space-time cells in the decomposition suite
    deltas: [0.1, 1.0, 10.0]
    C0: auto                # excluded-cylinder factor for the kernel sweep
    seed: <int>             # required
    suites: [symbols, ...]  # required, run in the order given

`levyspec run cfg.yaml --out DIR --threads K --seed S` writes one CSV per
suite plus manifest.yaml and summary.csv into DIR.  Identical config and
seed give byte-identical files, for any --threads.
"""

import argparse
import os
import sys

import numpy as np
import yaml

from . import __version__
from .measures import (DominationFailed, KernelAssumptionFailed,
                       MomentUnbounded, certify_mu0, check_assumptions,
                       default_mu0, log_kernel, make_bernstein, make_stable,
                       power_sum_kernel)
from .scaling import NotScaling, bernstein_scaling, power_scaling
from .spectral import (AliasingDetected, FrequencyGrid, density, eval_symbol,
                       random_band_limited)
from .spaces import BaseTooLarge, besov_norm, build_lp_system, h_norm
from .noise import (MarkSpace, StatisticalPower, moment_estimate_check,
                    sample_path, stochastic_integral)
from .solver import ProblemSpec, residual_check, solve
from .harness import (TruncationDominant, default_t1_specs, hormander_sweep,
                      verify_t1)
from .cz import (SpaceTimeGrid, cz_decompose, fefferman_stein_ratio, maximal,
                 weak_11_constant)
from .util import lp_norm, rng_for, run_indexed, write_csv


class ConfigError(ValueError):
    """Bad config file; `field` names the offending key path."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = "%s: %s" % (field, message)
        super().__init__(message)


class SuitePrereqError(RuntimeError):
    """A requested suite's mathematical prerequisites fail."""


class IoError(RuntimeError):
    """Artifact directory could not be created or written."""


# ---------------------------------------------------------------------------
# configuration


_DEFAULTS = {
    "measure": {"family": "stable", "sigma": 1.0, "phi": "power_sum",
                "alphas": [0.5], "coeffs": None, "alpha": 0.5, "beta": 1.0,
                "n_angles": 64},
    "d": 1,
    "grid": {"n": 256, "box": 16.0},
    "lp_base": "auto",
    "kappa": "auto",
    "p": [1.5, 2.0, 3.0, 4.0],
    "s": [0.0],
    "lam": [0.0, 1.0, 10.0],
    "T": 1.0,
    "dt": None,
    "times": [0.5, 1.0, 2.0],
    "paths": 2000,
    "paths_big": 4000,
    "n_steps": 64,
    "masses": [0.7, 0.3],
    "nt": 32,
    "deltas": [0.1, 1.0, 10.0],
    "C0": "auto",
}


def _merge(defaults, given, prefix=""):
    out = {}
    for key, dv in defaults.items():
        if key in given:
            gv = given[key]
            if isinstance(dv, dict) and not isinstance(gv, dict):
                raise ConfigError("expected a mapping", prefix + key)
            out[key] = _merge(dv, gv, prefix + key + ".") \
                if isinstance(dv, dict) else gv
        else:
            out[key] = dv
    for key in given:
        if key not in defaults:
            raise ConfigError("unknown key", prefix + key)
    return out


def _need_number(cfg, field, lo=None, hi=None, integer=False):
    parts = field.split(".")
    v = cfg
    for part in parts:
        v = v[part]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError("expected a number", field)
    if integer and int(v) != v:
        raise ConfigError("expected an integer", field)
    if lo is not None and v < lo:
        raise ConfigError("must be >= %g" % lo, field)
    if hi is not None and v > hi:
        raise ConfigError("must be <= %g" % hi, field)
    return v


def _need_list(cfg, field, lo=None, min_len=1):
    v = cfg
    for part in field.split("."):
        v = v[part]
    if not isinstance(v, (list, tuple)) or len(v) < min_len:
        raise ConfigError("expected a list of at least %d numbers" % min_len,
                          field)
    for x in v:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigError("expected numeric entries", field)
        if lo is not None and x < lo:
            raise ConfigError("entries must be >= %g" % lo, field)
    return [float(x) for x in v]


def load_config(path):
    """Parse and validate a YAML config; returns the resolved tree."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as e:
        raise IoError("cannot read config %s: %s" % (path, e)) from e
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = " at line %d" % (mark.line + 1) if mark is not None else ""
        raise ConfigError("YAML parse error%s: %s"
                          % (where, getattr(e, "problem", e))) from e
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    raw = dict(raw)
    if "seed" not in raw:
        raise ConfigError("required", "seed")
    if "suites" not in raw:
        raise ConfigError("required", "suites")
    seed = raw.pop("seed")
    suites = raw.pop("suites")
    cfg = _merge(_DEFAULTS, raw)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("expected an integer", "seed")
    cfg["seed"] = seed
    if not isinstance(suites, (list, tuple)) or not suites:
        raise ConfigError("expected a nonempty list", "suites")
    for i, name in enumerate(suites):
        if name not in SUITES:
            raise ConfigError(
                "unknown suite %r; available: %s"
                % (name, ", ".join(sorted(SUITES))), "suites[%d]" % i)
    cfg["suites"] = list(suites)

    fam = cfg["measure"]["family"]
    if fam not in ("stable", "bernstein"):
        raise ConfigError("must be 'stable' or 'bernstein'", "measure.family")
    if fam == "stable":
        _need_number(cfg, "measure.sigma", lo=1e-6, hi=2.0 - 1e-6)
    elif cfg["measure"]["phi"] == "power_sum":
        _need_list(cfg, "measure.alphas", lo=1e-6)
    elif cfg["measure"]["phi"] != "log":
        raise ConfigError("must be 'power_sum' or 'log'", "measure.phi")
    if cfg["d"] not in (1, 2):
        raise ConfigError("must be 1 or 2", "d")
    _need_number(cfg, "grid.n", lo=8, integer=True)
    _need_number(cfg, "grid.box", lo=1e-12)
    if cfg["lp_base"] != "auto":
        _need_number(cfg, "lp_base", lo=1.0 + 1e-9)
    if cfg["kappa"] != "auto":
        if not (isinstance(cfg["kappa"], dict) and "power" in cfg["kappa"]):
            raise ConfigError("must be 'auto' or {power: q}", "kappa")
        _need_number(cfg, "kappa.power", lo=1e-6)
    _need_list(cfg, "p", lo=1.0 + 1e-9)
    _need_list(cfg, "s")
    _need_list(cfg, "lam", lo=0.0)
    _need_number(cfg, "T", lo=1e-12)
    if cfg["dt"] is None:
        cfg["dt"] = cfg["T"] / 256.0
    _need_number(cfg, "dt", lo=1e-12)
    _need_list(cfg, "times", lo=0.0)
    for field in ("paths", "paths_big", "n_steps", "nt"):
        cfg[field] = int(_need_number(cfg, field, lo=1, integer=True))
    cfg["masses"] = _need_list(cfg, "masses", lo=1e-12)
    cfg["deltas"] = _need_list(cfg, "deltas", lo=1e-12)
    if cfg["C0"] != "auto":
        _need_number(cfg, "C0", lo=3.0 + 1e-9)
    if "hormander" in cfg["suites"] and cfg["d"] != 1:
        raise ConfigError("hormander suite requires d = 1", "suites")
    return cfg


class _RunContext:
    """Lazily built measure / grid / symbol / space stack for one run."""

    def __init__(self, cfg, threads=1):
        self.cfg = cfg
        self.threads = max(1, int(threads))
        self.seed = int(cfg["seed"])
        self._cache = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def kernel(self):
        m = self.cfg["measure"]
        if m["family"] != "bernstein":
            return None

        def build():
            if m["phi"] == "power_sum":
                return power_sum_kernel(m["alphas"], m["coeffs"],
                                        d=self.cfg["d"])
            return log_kernel(m["alpha"], m["beta"], d=self.cfg["d"])
        return self._get("kernel", build)

    @property
    def pi(self):
        m = self.cfg["measure"]

        def build():
            if m["family"] == "stable":
                return make_stable(self.cfg["d"], m["sigma"],
                                   n_angles=m["n_angles"])
            return make_bernstein(self.kernel, n_angles=m["n_angles"])
        return self._get("pi", build)

    @property
    def grid(self):
        return self._get("grid", lambda: FrequencyGrid(
            d=self.cfg["d"], n=int(self.cfg["grid"]["n"]),
            box=float(self.cfg["grid"]["box"])))

    @property
    def table(self):
        return self._get("table", lambda: eval_symbol(self.pi, self.grid))

    @property
    def triple(self):
        def build():
            k = self.cfg["kappa"]
            if k != "auto":
                return power_scaling(float(k["power"]))
            if self.kernel is not None:
                return bernstein_scaling(self.kernel)
            return power_scaling(self.cfg["measure"]["sigma"])
        return self._get("triple", build)

    @property
    def system(self):
        def build():
            N = 2.0 if self.cfg["lp_base"] == "auto" \
                else float(self.cfg["lp_base"])
            try:
                return build_lp_system(N, self.grid)
            except BaseTooLarge as e:
                raise ConfigError(str(e), "lp_base") from e
        return self._get("system", build)

    @property
    def space(self):
        masses = np.asarray(self.cfg["masses"], dtype=float)
        labels = tuple("m%d" % c for c in range(masses.size))
        return self._get("space", lambda: MarkSpace(
            masses=masses, labels=labels, schedule=None))

    def field(self, tag, n_channels=None):
        # one reproducible band-limited field per (seed, tag)
        return random_band_limited(self.grid, rng_for(self.seed, tag),
                                   n_channels=n_channels)

    def check_prereqs(self, suite):
        """Domination and moment assumptions for the estimate suites."""
        try:
            cert = self._get("mu0cert",
                             lambda: certify_mu0(default_mu0(self.pi)))
            self._get("assumptions", lambda: check_assumptions(
                self.pi, self.triple.kappa, cert))
        except (DominationFailed, MomentUnbounded, KernelAssumptionFailed,
                NotScaling) as e:
            raise SuitePrereqError(
                "suite %r prerequisites: %s: %s"
                % (suite, type(e).__name__, e)) from e


# ---------------------------------------------------------------------------
# suites


def _index_tuples(shape):
    return list(np.ndindex(*shape))


def _run_symbols(ctx):
    grid, tab = ctx.grid, ctx.table
    mesh = grid.xi_mesh()
    cols = (["i", "xi", "re_psi", "im_psi"] if grid.d == 1 else
            ["i", "j", "xi1", "xi2", "re_psi", "im_psi"])
    rows = []
    for idx in _index_tuples(grid.shape):
        rows.append(list(idx) + [m[idx] for m in mesh]
                    + [tab.psi[idx].real, tab.psi[idx].imag])
    ok = np.all(np.isfinite(tab.psi)) and np.all(tab.sym <= 1e-12)
    detail = "min re_psi=%.6g" % float(tab.sym.min())
    return cols, rows, ("pass" if ok else "fail"), detail


def _run_densities(ctx):
    grid = ctx.grid
    mesh = grid.x_mesh()
    cols = (["t", "i", "x", "p"] if grid.d == 1 else
            ["t", "i", "j", "x1", "x2", "p"])
    rows = []
    worst_mass = 0.0
    min_val = np.inf
    for t in ctx.cfg["times"]:
        try:
            gf = density(ctx.table, float(t))
        except AliasingDetected as e:
            return cols, rows, "fail", "t=%g: %s" % (t, e)
        vals = gf.values
        worst_mass = max(worst_mass, abs(float(vals.sum()) * grid.cell - 1.0))
        min_val = min(min_val, float(vals.min()))
        for idx in _index_tuples(grid.shape):
            rows.append([float(t)] + list(idx) + [m[idx] for m in mesh]
                        + [vals[idx]])
    ok = worst_mass < 1e-8 and min_val > -1e-8
    detail = "max mass defect=%.3g min=%.3g" % (worst_mass, min_val)
    return cols, rows, ("pass" if ok else "fail"), detail


def _run_spaces(ctx):
    cfg = ctx.cfg
    tab, system = ctx.table, ctx.system
    f = ctx.field(101)
    phi = ctx.field(102, n_channels=len(cfg["masses"]))
    masses = ctx.space.masses
    cols = ["space", "p", "q", "s", "weight_mode", "value"]
    rows = []
    for p in cfg["p"]:
        for s in cfg["s"]:
            r = h_norm(f, tab, s, p)
            rows.append(["H", p, p, s, "none", r.value])
            r = besov_norm(f, system, tab, s, p, p)
            rows.append(["B", p, p, s, "none", r.value])
        sj = 1.0 - 1.0 / p
        r = besov_norm(phi, system, tab, sj, p, p, r=p, mark_weights=masses)
        rows.append(["B", p, p, sj, "marks", r.value])
    vals = np.array([row[-1] for row in rows])
    ok = np.all(np.isfinite(vals)) and np.all(vals > 0)
    return cols, rows, ("pass" if ok else "fail"), "%d norms" % len(rows)


def _run_noise(ctx):
    cfg = ctx.cfg
    grid, space, tab = ctx.grid, ctx.space, ctx.table
    T, paths = cfg["T"], cfg["paths"]
    lam0 = cfg["lam"][0]
    phi = ctx.field(201, n_channels=space.n_channels)
    cols = ["quantity", "p", "lambda", "n_paths", "estimate", "std_error"]
    rows = []

    # compensated-integral isometry at the horizon, p = 2, no drift
    def one_path(i):
        path = sample_path(space, T, ctx.seed * 1000003 + 17, index=i)
        res = stochastic_integral(phi, space, path, lam=0.0,
                                  n_steps=cfg["n_steps"])
        return lp_norm(res["values"][-1], grid.cell, 2.0) ** 2

    sq = np.asarray(run_indexed(one_path, range(paths), ctx.threads))
    est, se = float(sq.mean()), float(sq.std(ddof=1) / np.sqrt(paths))
    rhs = T * float(sum(space.masses[c] * lp_norm(phi[c], grid.cell, 2.0) ** 2
                        for c in range(space.n_channels)))
    rows.append(["ito_isometry_lhs", 2.0, 0.0, paths, est, se])
    rows.append(["ito_isometry_rhs", 2.0, 0.0, 0, rhs, 0.0])
    iso_ok = abs(est - rhs) <= 3.0 * se

    verdict = "pass" if iso_ok else "fail"
    for p in cfg["p"]:
        try:
            r = moment_estimate_check(phi, space, tab, 0.0, p, lam0, T,
                                      paths, ctx.seed * 1000003 + 31,
                                      table_pi=ctx.table,
                                      n_steps=cfg["n_steps"],
                                      threads=ctx.threads)
        except StatisticalPower:
            verdict = "underpowered" if verdict == "pass" else verdict
            continue
        rows.append(["moment_sup", p, lam0, paths, r["lhs"], r["lhs_se"]])
        rows.append(["moment_bound", p, lam0, 0, r["rhs"], 0.0])
        if not np.isfinite(r["C"]):
            verdict = "fail"
    detail = "isometry |lhs-rhs|=%.3g (3se=%.3g)" % (abs(est - rhs), 3 * se)
    return cols, rows, verdict, detail


def _run_solver(ctx):
    cfg = ctx.cfg
    grid, space = ctx.grid, ctx.space
    T = cfg["T"]
    f = ctx.field(301)
    g0 = ctx.field(302)
    phi = ctx.field(303, n_channels=space.n_channels)
    spec = ProblemSpec(table_pi=ctx.table, lam=cfg["lam"][0], T=T, g=g0, f=f,
                       phi=phi, space=space, label="cli")
    path = sample_path(space, T, ctx.seed * 1000003 + 47, index=0)
    sol = solve(spec, path, n_steps=max(2, int(round(T / cfg["dt"]))))
    mesh = grid.x_mesh()
    cols = (["t", "i", "x", "u"] if grid.d == 1 else
            ["t", "i", "j", "x1", "x2", "u"])
    rows = []
    for t_req in cfg["times"]:
        if t_req > T:
            continue
        m = int(np.argmin(np.abs(sol["times"] - t_req)))
        t_here = float(sol["times"][m])
        for idx in _index_tuples(grid.shape):
            rows.append([t_here] + list(idx) + [c[idx] for c in mesh]
                        + [sol["values"][m][idx]])
    resid = residual_check(sol, spec)["max_residual"]
    scale = float(np.max(np.abs(sol["values"]))) + 1e-300
    ok = np.all(np.isfinite(sol["values"])) and resid < 1e-2 * scale
    detail = "residual=%.3g events=%d" % (resid, sol["path"].n_events)
    return cols, rows, ("pass" if ok else "fail"), detail


def _run_t1(ctx):
    cfg = ctx.cfg
    ctx.check_prereqs("t1")
    specs = default_t1_specs(ctx.grid, len(cfg["masses"]), seed=ctx.seed)
    res = verify_t1(specs, ctx.table, ctx.table, ctx.system, ctx.space,
                    p_grid=tuple(cfg["p"]), lam_grid=tuple(cfg["lam"]),
                    T=cfg["T"], master_seed=ctx.seed, threads=ctx.threads,
                    n_paths_small=cfg["paths"], n_paths_big=cfg["paths_big"])
    cols = ["inequality", "label", "p", "s", "lambda", "lhs", "lhs_err",
            "rhs", "C", "n_paths", "verdict", "scale_dev"]
    rows = [[r.inequality, r.spec_label, r.p, r.s, r.lam, r.lhs, r.lhs_err,
             r.rhs, r.C, r.n_paths, r.verdict, r.scale_dev]
            for r in res["reports"]]
    n_under = sum(1 for r in res["reports"] if r.verdict == "underpowered")
    bad = sum(1 for r in res["reports"]
              if r.verdict not in ("bounded", "underpowered"))
    verdict = "fail" if bad else ("underpowered" if n_under else "pass")
    detail = "rho_slope=%.4g underpowered=%d" % (res["rho_slope"], n_under)
    return cols, rows, verdict, detail, res


def _t1_summary_rows(reports):
    # the estimate splits at p = 2: below it the noise term is Besov-only
    rows = []
    for regime, sel in (("p_lt_2", lambda r: r.p < 2),
                        ("p_ge_2", lambda r: r.p >= 2)):
        group = [r for r in reports if sel(r)]
        if not group:
            continue
        rows.append([regime, len(group),
                     max(r.C for r in group),
                     max(r.scale_dev for r in group),
                     sum(1 for r in group if r.verdict == "underpowered")])
    return ["regime", "n_reports", "max_C", "max_scale_dev",
            "n_underpowered"], rows


def _run_hormander(ctx):
    cfg = ctx.cfg
    ctx.check_prereqs("hormander")
    C0 = None if cfg["C0"] == "auto" else float(cfg["C0"])
    cols = ["delta", "s", "y", "I", "I1", "I2", "tail_share"]
    try:
        rep = hormander_sweep(ctx.pi, ctx.triple, C0=C0,
                              deltas=cfg["deltas"], lam=0.0)
    except TruncationDominant as e:
        return cols, [], "fail", "TruncationDominant: %s" % e
    rows = [[r["delta"], r["s"], r["y"], r["I"], r["I1"], r["I2"],
             r["tail_share"]] for r in rep["rows"]]
    verdict = "pass" if rep["plateau"] else "fail"
    detail = "sup=%.6g plateau=%s C0=%g" % (rep["sup"], rep["plateau"],
                                            rep["C0"])
    return cols, rows, verdict, detail


def _run_cz(ctx):
    cfg = ctx.cfg
    st = SpaceTimeGrid(grid=ctx.grid, T=cfg["T"], nt=cfg["nt"])
    data = rng_for(ctx.seed, 401).standard_normal(st.shape)
    kappa = ctx.triple.kappa
    # in 2+1 dimensions the oscillation pass is O(cells * footprint), so
    # keep the radius family short of the full domain
    radii = None if ctx.grid.d == 1 else np.geomspace(
        0.5 * ctx.grid.dx, ctx.grid.box / 8.0, 10)
    M = maximal(st, data, kappa, mode="noncentered", radii=radii)
    alpha = float(np.quantile(M, 0.80))
    res = cz_decompose(st, data, alpha, kappa, radii=radii)
    d = ctx.grid.d
    cols = ["part", "center_t"] + ["center_x%d" % (k + 1) for k in range(d)] \
        + ["D", "inner", "outer", "cells", "l1"]
    none = [-1] * (1 + d)
    rows = [["g"] + none + [-1.0, -1.0, -1.0, 0,
                            float(np.sum(np.abs(res["g"]))) * st.cell]]
    recon = res["g"].copy()
    zero_means = True
    occupied = [c for c in res["cylinders"] if c["cells"] > 0]
    for k, part in enumerate(res["parts"]):
        cyl = occupied[k]
        recon[part.index] += part.values
        zero_means &= abs(float(part.values.sum())) <= 1e-9 * max(
            1.0, float(np.abs(part.values).sum()))
        rows.append(["b%04d" % k] + list(cyl["center_index"])
                    + [cyl["D"], cyl["inner"], cyl["outer"], cyl["cells"],
                       float(np.sum(np.abs(part.values))) * st.cell])
    exact = float(np.max(np.abs(recon - data))) <= 1e-12 * max(
        1.0, float(np.max(np.abs(data))))
    w11 = weak_11_constant(st, data, kappa, radii=radii)
    fs = fefferman_stein_ratio(st, data, kappa, p=2.0, radii=radii)
    ok = exact and zero_means and np.isfinite(w11["c"]) and np.isfinite(fs)
    detail = "alpha=%.6g cells=%d weak11=%.4g fs_ratio=%.4g" % (
        alpha, len(res["parts"]), w11["c"], fs)
    return cols, rows, ("pass" if ok else "fail"), detail


SUITES = {
    "symbols": ("Fourier symbol of the jump generator on the grid",
                _run_symbols),
    "densities": ("transition densities by spectral inversion at "
                  "sample times", _run_densities),
    "spaces": ("Bessel and dyadic-decomposition norms of reference fields",
               _run_spaces),
    "noise": ("compensated jump-noise ensemble: isometry and moment bounds",
              _run_noise),
    "solver": ("mild-solution snapshots and integral-form residual",
               _run_solver),
    "t1": ("a priori estimate sweep: empirical constants over p and lambda",
           _run_t1),
    "hormander": ("kernel-difference square-integrability sweep over "
                  "cylinder scales", _run_hormander),
    "cz": ("space-time Calderon-Zygmund decomposition and maximal-function "
           "constants", _run_cz),
}


# ---------------------------------------------------------------------------
# run orchestration


def _resolved_extras(ctx):
    cfg = ctx.cfg
    out = {"lp_base": 2.0 if cfg["lp_base"] == "auto" else cfg["lp_base"]}
    if cfg["kappa"] == "auto":
        out["kappa"] = ("bernstein" if cfg["measure"]["family"] == "bernstein"
                        else {"power": cfg["measure"]["sigma"]})
    else:
        out["kappa"] = cfg["kappa"]
    out["scaling_label"] = ctx.triple.label if (
        "t1" in cfg["suites"] or "hormander" in cfg["suites"]
        or "cz" in cfg["suites"]) else None
    return out


def run(config_path, out_dir=None, threads=1, seed=None):
    """Execute the configured suites; returns (exit_status, artifact_dir)."""
    cfg = load_config(config_path)
    if seed is not None:
        cfg["seed"] = int(seed)
    if out_dir is None:
        out_dir = os.environ.get("LEVYSPEC_OUT")
    if out_dir is None:
        stem = os.path.splitext(os.path.basename(config_path))[0]
        out_dir = stem + ".out"
    try:
        os.makedirs(out_dir, exist_ok=True)
        probe = os.path.join(out_dir, ".write-probe")
        with open(probe, "w") as fh:
            fh.write("ok")
        os.remove(probe)
    except OSError as e:
        raise IoError("artifact directory %s: %s" % (out_dir, e)) from e

    ctx = _RunContext(cfg, threads=threads)
    manifest = {
        "config": cfg,
        "resolved": _resolved_extras(ctx),
        "seed": cfg["seed"],
        "versions": {"levyspec": __version__,
                     "numpy": np.__version__,
                     "scipy": __import__("scipy").__version__,
                     "python": "%d.%d.%d" % sys.version_info[:3]},
    }
    summary = []
    status = 0
    for name in cfg["suites"]:
        out = SUITES[name][1](ctx)
        cols, rows, verdict, detail = out[:4]
        csv_path = os.path.join(out_dir, name + ".csv")
        try:
            write_csv(csv_path, name, cols, rows)
            if name == "t1":
                scols, srows = _t1_summary_rows(out[4]["reports"])
                write_csv(os.path.join(out_dir, "t1_summary.csv"),
                          "t1_summary", scols, srows)
        except OSError as e:
            raise IoError("writing %s: %s" % (csv_path, e)) from e
        summary.append([name, verdict, len(rows), detail])
        if verdict == "fail":
            status = 1
        print("suite %-10s %-12s %6d rows  %s" % (name, verdict, len(rows),
                                                  detail))
    try:
        with open(os.path.join(out_dir, "manifest.yaml"), "w") as fh:
            yaml.safe_dump(manifest, fh, sort_keys=True,
                           default_flow_style=False)
        write_csv(os.path.join(out_dir, "summary.csv"), "summary",
                  ["suite", "verdict", "rows", "detail"], summary)
    except OSError as e:
        raise IoError("writing manifest: %s" % e) from e
    return status, out_dir


def list_suites(query=None, stream=None):
    stream = stream or sys.stdout
    if query is not None and query not in SUITES:
        print("unknown suite %r; did you mean one of:" % query,
              file=sys.stderr)
        for name in sorted(SUITES):
            print("  %-10s %s" % (name, SUITES[name][0]), file=sys.stderr)
        return 2
    names = [query] if query else sorted(SUITES)
    for name in names:
        print("%-10s %s" % (name, SUITES[name][0]), file=stream)
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="levyspec",
        description="Verification suites for nonlocal parabolic estimates "
                    "driven by jump noise.")
    sub = parser.add_subparsers(dest="command", required=True)
    pr = sub.add_parser("run", help="run the suites from a YAML config")
    pr.add_argument("config", help="path to the config file")
    pr.add_argument("--out", default=None, help="artifact directory")
    pr.add_argument("--threads", type=int, default=1,
                    help="worker cap; results do not depend on it")
    pr.add_argument("--seed", type=int, default=None,
                    help="override the config seed")
    pl = sub.add_parser("list-suites", help="print the suite catalog")
    pl.add_argument("query", nargs="?", default=None)
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            status, out_dir = run(args.config, out_dir=args.out,
                                  threads=args.threads, seed=args.seed)
            print("artifacts in %s" % out_dir)
            return status
        return list_suites(args.query)
    except (ConfigError, SuitePrereqError, IoError) as e:
        print("%s: %s" % (type(e).__name__, e), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
