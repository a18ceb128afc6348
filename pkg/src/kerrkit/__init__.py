"""Modelling and fitting toolkit for kinetic-inductance Kerr resonators."""

__version__ = "0.1.0"

from .bcs import BcsParams, ComplexConductivity, freq_shift_ratio, gap_of_t, mattis_bardeen, q_conduction, q_total
from .errors import (
    DomainError,
    FitError,
    KerrkitError,
    ParametricThresholdError,
    TraceFormatError,
    UnsupportedRegimeError,
)
from .fitting import (
    FitResult,
    fit_kerr_from_shift,
    fit_linear_trace,
    fit_nonlinear_trace,
    fit_qi_vs_temperature,
    fit_tls,
)
from .io import emit_results, load_result, load_trace, save_trace
from .losses import KerrGeometry, TlsParams, cross_kerr, kerr_scaling, q3_bound, qi_of_power
from .materials import FilmProperties, UniversalFit, fit_universal, sheet_inductance, universal_tc
from .mixing import PumpPoint, gain_forward, gain_idler, gain_one_port, gain_sweep, pump_point
from .resonator import (
    XI_CRIT,
    ComplexTrace,
    DriveCondition,
    ResonatorParams,
    SteadyState,
    gamma_reflection,
    photons_from_power,
    resonance_shift,
    s21_linear,
    s21_nonlinear,
    select_branch,
    solve_photon_cubic,
)
from .synth import DEFAULT_SEED, synth_trace
