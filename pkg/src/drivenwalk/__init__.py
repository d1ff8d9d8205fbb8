"""Driven discrete-time quantum walks.

Coined walks on lines and 2D tori where coherent walkers are injected at
every step. The package computes exact intensity dynamics in the physical
and eigenmode bases, provides closed-form oracles for the matched and
mismatched injection regimes, and implements a marked-vertex lattice search
driven from a single known vertex.
"""

__version__ = "0.1.0"

from .coins import BUILTIN_COINS, CoinAssignment, grover4, hadamard, \
    minus_identity4, pauli_x
from .engine import InjectionSchedule, RunRecord, WalkOperator, \
    build_coin_operator, build_step_operator, compose_walk_operator, \
    driven_step, evolve_step, injection_vector, make_walk_operator, \
    run_driven_walk, step_permutation, wrap_watch_modes
from .errors import ConfigError, NumericalIntegrityError, UndefinedGapError
from .kernels import BACKEND as KERNEL_BACKEND
from .lattice import Line, Mode, Topology, Torus2D, mode_from_index, mode_index
from .search import LocalizedModeReport, SearchInstance, SearchResult, \
    build_search_instance, default_step_count, exclusion_zone, \
    localized_mode_check, run_search
from .spectral import EigenDecomposition, MismatchProfile, \
    analytic_displacement_amplitude, analytic_mode_intensity, eigendecompose, \
    frequency_cluster, from_eigenbasis, matched_injection_phase, \
    matched_mode_index, mismatch_profile, spectral_gap, subspace_projection, \
    to_eigenbasis, wrap_phase
from .state import AmplitudeState, intensity_by_mode, intensity_by_vertex, \
    total_intensity
from .config import SearchConfig, WalkConfig, bundled_config_path, load_config

__all__ = [
    "__version__",
    "KERNEL_BACKEND",
    # lattice
    "Line", "Torus2D", "Topology", "Mode", "mode_index", "mode_from_index",
    # coins
    "CoinAssignment", "BUILTIN_COINS", "hadamard", "pauli_x", "grover4",
    "minus_identity4",
    # state
    "AmplitudeState", "intensity_by_mode", "intensity_by_vertex",
    "total_intensity",
    # engine
    "WalkOperator", "InjectionSchedule", "RunRecord", "build_coin_operator",
    "build_step_operator", "step_permutation", "wrap_watch_modes",
    "compose_walk_operator", "make_walk_operator", "injection_vector",
    "evolve_step", "driven_step", "run_driven_walk",
    # spectral
    "EigenDecomposition", "MismatchProfile", "eigendecompose", "to_eigenbasis",
    "from_eigenbasis", "mismatch_profile", "matched_injection_phase",
    "matched_mode_index", "analytic_mode_intensity",
    "analytic_displacement_amplitude", "spectral_gap", "frequency_cluster",
    "subspace_projection", "wrap_phase",
    # search
    "SearchInstance", "SearchResult", "LocalizedModeReport",
    "build_search_instance", "run_search", "localized_mode_check",
    "exclusion_zone", "default_step_count",
    # config
    "WalkConfig", "SearchConfig", "load_config", "bundled_config_path",
    # errors
    "ConfigError", "NumericalIntegrityError", "UndefinedGapError",
]
