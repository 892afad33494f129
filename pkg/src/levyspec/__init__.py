"""Spectral and Monte Carlo verification toolkit for scalable Levy
measures, generalized-smoothness function spaces, and linear parabolic
equations driven by compensated jump noise.

The package is organized bottom-up:

measures   Levy measures in radial-angular form, assumption checks
scaling    scaling functions kappa / l, inverses, engulfing constants
spectral   symbols, densities, subordination, scaling identities (FFT)
spaces     Bessel-type and dyadic-decomposition norms
noise      compound-Poisson paths and compensated stochastic integrals
solver     exact-semigroup mild solutions of du = (Lu - lam u + f)dt + dM
harness    a priori estimate sweeps, Plancherel bound, kernel condition
cz         space-time Calderon-Zygmund decomposition and maximal bounds
cli        batch driver producing deterministic CSV artifacts
"""

__version__ = "0.1.0"

from .measures import (AssumptionReport, BernsteinKernel, DominationFailed,
                       InvalidMeasure, KernelAssumptionFailed, LevyMeasure,
                       MomentUnbounded, Mu0Certificate, certify_mu0,
                       check_assumptions, check_kernel, compensator_regime,
                       default_alphas, default_mu0, log_kernel,
                       make_bernstein, make_stable, power_sum_kernel,
                       radial_moment, rescale, validate_levy_measure)
from .scaling import (EngulfingReport, IntegrabilityReport, NotScaling,
                      ScalingTriple, bernstein_scaling, check_t1_integrability,
                      derive_inverses, engulfing_constant, power_scaling)
from .spectral import (AliasingDetected, FrequencyGrid, GridFunction,
                       GridMismatch, QuadratureNotConverged, SymbolTable,
                       apply_multiplier, bessel_multiplier, density,
                       eval_symbol, forward, fractional_multiplier,
                       gridfunction_to_csv, inverse, nyquist_amplitude,
                       random_band_limited, scaling_identity_check,
                       subordination_check, subordination_constant,
                       tail_bounds_check)
from .spaces import (BaseTooLarge, LPSystem, NormReport, approximate,
                     besov_norm, build_lp_system, embedding_check, h_norm,
                     lp_blocks)
from .noise import (JumpPath, MarkSpace, StatisticalPower,
                    event_adapted_times, moment_estimate_check, sample_path,
                    stochastic_integral)
from .solver import (ProblemSpec, duhamel_apply, residual_check,
                     semigroup_apply, solve)
from .harness import (EstimateReport, TruncationDominant, Underpowered,
                      default_t1_specs, hormander_point, hormander_sweep,
                      plancherel_p2, rho_lambda_slope, verify_smooth_estimate,
                      verify_t1)
from .cz import (CellPart, EmptyLevelSet, PrereqFailed, SpaceTimeGrid, apply_G,
                 cz_decompose, default_radii, fefferman_stein_ratio,
                 le2_bound_check, m0_bound, maximal, outer_measure, sharp,
                 verify_stoch_hormander_lp, weak_11_constant)
from .util import rng_for, run_indexed, write_csv
