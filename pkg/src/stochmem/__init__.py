"""Simulation and analysis toolkit for stochastic memristive models.

Four model families of a scalar memductance G driven by a cosine voltage:
a linear relaxation model with a deterministic asymptotic delay, a
symmetric-broken double-well model with additive noise, a linear model
with correlated multiplicative and additive noise (plus a shifted variant
pinned to its noise-cancellation point), and a monostable power-law
model. The oracle module carries the closed-form stationary mean,
variance and correlation function of the correlated linear family and the
additive-noise resonance point; the integrate and ensemble modules
produce trajectories and reproducible ensemble statistics; spectral and
analysis cover periodograms, SNR, hysteresis loops, dwell times and the
correlated-noise plateau decomposition.
"""

from .core import (
    DriveSignal,
    TimeDelayModel,
    DoubleWellModel,
    CorrelatedLinearModel,
    ShiftedCorrelatedLinearModel,
    MonostablePowerModel,
    ModelSpec,
    drive_voltage,
    current,
    drift,
    autonomous_drift,
    diffusion,
    stratonovich_correction,
    potential_value,
    potential_slope,
    stationary_points,
    well_depths,
    w_polynomial,
    default_initial_state,
    resonance_holds,
)
from .noise import (
    NoiseStream,
    gaussian_increments,
    correlated_pair,
    uniform_angles,
    streams_for,
)
from .integrate import (
    Scheme,
    Trajectory,
    BlowUpError,
    DEFAULT_DT,
    step,
    integrate,
    samples_per_period,
)
from .ensemble import (
    EnsembleError,
    EnsembleResult,
    AbortRecord,
    RealizationRecord,
    CHUNK_SIZE,
    run_ensemble,
)
from .spectral import (
    PsdEstimate,
    SnrResult,
    periodogram,
    averaged_psd,
    snr,
    autocorrelation,
)
from .analysis import (
    HysteresisLoop,
    DwellStats,
    PlateauResult,
    loop_area,
    extract_loops,
    dwell_times,
    plateau_decomposition,
)
from .oracle import (
    DomainError,
    GuardBandError,
    ValidityReport,
    validate,
    nonneg_drive_bound,
    timedelay_parameters,
    timedelay_solution,
    g_infinity,
    asymptotic_variance,
    correlation_components,
    correlation_fn,
    resonance_q,
)
from .config import ConfigError, ExperimentConfig, parse_config, parse_config_text

__version__ = "0.1.0"

__all__ = [
    "DriveSignal",
    "TimeDelayModel",
    "DoubleWellModel",
    "CorrelatedLinearModel",
    "ShiftedCorrelatedLinearModel",
    "MonostablePowerModel",
    "ModelSpec",
    "drive_voltage",
    "current",
    "drift",
    "autonomous_drift",
    "diffusion",
    "stratonovich_correction",
    "potential_value",
    "potential_slope",
    "stationary_points",
    "well_depths",
    "w_polynomial",
    "default_initial_state",
    "resonance_holds",
    "NoiseStream",
    "gaussian_increments",
    "correlated_pair",
    "uniform_angles",
    "streams_for",
    "Scheme",
    "Trajectory",
    "BlowUpError",
    "DEFAULT_DT",
    "step",
    "integrate",
    "samples_per_period",
    "EnsembleError",
    "EnsembleResult",
    "AbortRecord",
    "RealizationRecord",
    "CHUNK_SIZE",
    "run_ensemble",
    "PsdEstimate",
    "SnrResult",
    "periodogram",
    "averaged_psd",
    "snr",
    "autocorrelation",
    "HysteresisLoop",
    "DwellStats",
    "PlateauResult",
    "loop_area",
    "extract_loops",
    "dwell_times",
    "plateau_decomposition",
    "DomainError",
    "GuardBandError",
    "ValidityReport",
    "validate",
    "nonneg_drive_bound",
    "timedelay_parameters",
    "timedelay_solution",
    "g_infinity",
    "asymptotic_variance",
    "correlation_components",
    "correlation_fn",
    "resonance_q",
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "parse_config_text",
]
