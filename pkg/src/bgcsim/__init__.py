"""Simulation and analysis toolkit for bi-directionally constrained diffusions.

The package splits along the workflow: :mod:`bgcsim.model` defines the
coefficient fields and the constrained drift, :mod:`bgcsim.simulate`
integrates ensembles reproducibly, :mod:`bgcsim.lil` provides growth
envelopes and scale/speed diagnostics, :mod:`bgcsim.stats` summarizes
ensembles (densities, bands, barriers, lattice references), and
:mod:`bgcsim.cli` exposes the ``bgc`` command built on top of
:mod:`bgcsim.config`, :mod:`bgcsim.output`, and :mod:`bgcsim.figures`.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .config import (
    ConfigError,
    ExperimentConfig,
    apply_overrides,
    make_sde,
    parse_config,
    render_config,
    sim_config,
)
from .lil import (
    DEFAULT_T_MIN,
    EmptyWindowError,
    EnvelopeDomainError,
    EnvelopeSeries,
    MotooReport,
    NonpositiveIntegrandError,
    NoPositiveSamplesError,
    ScaleSpeedSpec,
    ZeroDiffusionError,
    adjusted_lil_envelope,
    empirical_liminf_ratio,
    empirical_limsup_ratio,
    envelope_crossover,
    envelope_series,
    kolmogorov_ratio,
    lil_envelope,
    motoo_classify,
    scale_function,
    speed_measure_density,
    sqrt_envelope,
)
from .model import (
    AsymptoticParams,
    BgcSde,
    ConditionReport,
    FieldEvaluationError,
    ScalarField,
    bgc_drift,
    check_conditions,
    constant_field,
    quadratic_constraint,
    sgn,
    zero_field,
)
from .numerics import NoRootError, QuadratureError, adaptive_simpson, bisect_root
from .simulate import (
    Ensemble,
    GaussianStream,
    Path,
    PathExplosionError,
    SimConfig,
    em_step,
    gaussian_stream,
    run_ensemble,
    simulate_path,
)
from .stats import (
    BandReport,
    BarrierEstimate,
    DegenerateSampleError,
    DensityEstimate,
    LatticeDistribution,
    detect_bands,
    escape_fraction,
    estimate_barrier,
    estimate_density,
    ks_distance,
    lattice_evolve,
    pooled_samples,
    skewness,
    terminal_samples,
)

__all__ = [
    "__version__",
    "AsymptoticParams",
    "BandReport",
    "BarrierEstimate",
    "BgcSde",
    "ConditionReport",
    "ConfigError",
    "DEFAULT_T_MIN",
    "DegenerateSampleError",
    "DensityEstimate",
    "EmptyWindowError",
    "Ensemble",
    "EnvelopeDomainError",
    "EnvelopeSeries",
    "ExperimentConfig",
    "FieldEvaluationError",
    "GaussianStream",
    "LatticeDistribution",
    "MotooReport",
    "NoPositiveSamplesError",
    "NoRootError",
    "NonpositiveIntegrandError",
    "Path",
    "PathExplosionError",
    "QuadratureError",
    "ScalarField",
    "ScaleSpeedSpec",
    "SimConfig",
    "ZeroDiffusionError",
    "adaptive_simpson",
    "adjusted_lil_envelope",
    "apply_overrides",
    "bgc_drift",
    "bisect_root",
    "check_conditions",
    "constant_field",
    "detect_bands",
    "em_step",
    "empirical_liminf_ratio",
    "empirical_limsup_ratio",
    "envelope_crossover",
    "envelope_series",
    "escape_fraction",
    "estimate_barrier",
    "estimate_density",
    "gaussian_stream",
    "kolmogorov_ratio",
    "ks_distance",
    "lattice_evolve",
    "lil_envelope",
    "make_sde",
    "motoo_classify",
    "parse_config",
    "pooled_samples",
    "quadratic_constraint",
    "render_config",
    "run_ensemble",
    "scale_function",
    "sgn",
    "sim_config",
    "simulate_path",
    "skewness",
    "speed_measure_density",
    "sqrt_envelope",
    "terminal_samples",
    "zero_field",
]
