"""Geometric phases of a spin 1/2 driven classically or quantum mechanically.

The package computes the phase picked up by a spin-1/2 whose quantization
axis is dragged around a closed loop, for three kinds of driving:

* a clean precessing field (the circular-loop solid-angle result),
* a precessing field with weak stochastic noise (per-realization and
  ensemble-averaged perturbative phases, checked against exact curve
  quadrature and direct Schrodinger evolution),
* a quantum vector operator coupled to the spin (Schmidt-decomposed
  eigenstates, the anti-aligned weight p_minus, and its perturbative
  fluctuation/commutator breakdown).
"""

from .classical import (
    ANGULAR_SHAPE_ARGMAX,
    ANGULAR_SHAPE_MAX,
    EnsembleResult,
    angular_shape,
    circular_phase,
    compare_averaging_conventions,
    derive_seed,
    ensemble_average,
    ensemble_mean_prediction,
    phase_perturbative_phi,
    phase_perturbative_time,
    recover_noise_strength,
    time_domain_samples,
    z_only_shift,
)
from .dynamics import (
    BerryPhaseResult,
    EvolutionConfig,
    EvolutionResult,
    aligned_spin_state,
    angular_momentum_path,
    berry_phase_numeric,
    composite_jz_diagonal,
    evolve,
    noisy_spin_path,
    noisy_spin_reference,
    precessing_direction,
    precessing_spin_path,
    precessing_spin_reference,
    rotating_reference,
    spin_direction_reference,
    two_spin_path,
    two_spin_reference,
)
from .errors import (
    AdiabaticityBroken,
    ConfigError,
    DegenerateDrivingField,
    DegenerateField,
    InsufficientResolution,
    IntegratorFailure,
    ParametrizationError,
    PoleSingularity,
    SpinPhaseError,
    TrackingAmbiguity,
)
from .frames import (
    AdaptedFrame,
    Direction,
    SphericalCurve,
    adapted_frame,
    curve_from_field,
    frame_vectors,
    solid_angle_phase,
)
from .noise import (
    NoiseRealization,
    NoiseStatistics,
    field_from_noise,
    sample_noise,
)
from .operators import (
    VectorOperatorSystem,
    angular_momentum,
    angular_momentum_system,
    sho_system,
    two_spin_system,
    verify_vector_operator,
)
from .quantum import (
    CompositeState,
    ExactLmResult,
    SchmidtResult,
    TransverseMoments,
    build_hamiltonian,
    classical_correspondence_phase,
    composite_reference,
    exact_lm_scenario,
    p_minus_lm,
    p_minus_perturbative,
    schmidt,
    spin_phase_from_schmidt,
    spin_phase_perturbative,
    total_system_phase,
    tracked_eigenstate,
)
from .reports import PhaseReport

__version__ = "0.1.0"

__all__ = [
    "ANGULAR_SHAPE_ARGMAX",
    "ANGULAR_SHAPE_MAX",
    "AdaptedFrame",
    "AdiabaticityBroken",
    "BerryPhaseResult",
    "CompositeState",
    "ConfigError",
    "DegenerateDrivingField",
    "DegenerateField",
    "Direction",
    "EnsembleResult",
    "EvolutionConfig",
    "EvolutionResult",
    "ExactLmResult",
    "InsufficientResolution",
    "IntegratorFailure",
    "NoiseRealization",
    "NoiseStatistics",
    "ParametrizationError",
    "PhaseReport",
    "PoleSingularity",
    "SchmidtResult",
    "SphericalCurve",
    "SpinPhaseError",
    "TrackingAmbiguity",
    "TransverseMoments",
    "VectorOperatorSystem",
    "adapted_frame",
    "aligned_spin_state",
    "angular_momentum",
    "angular_momentum_path",
    "angular_momentum_system",
    "angular_shape",
    "berry_phase_numeric",
    "build_hamiltonian",
    "circular_phase",
    "classical_correspondence_phase",
    "compare_averaging_conventions",
    "composite_jz_diagonal",
    "composite_reference",
    "curve_from_field",
    "derive_seed",
    "ensemble_average",
    "ensemble_mean_prediction",
    "evolve",
    "exact_lm_scenario",
    "field_from_noise",
    "frame_vectors",
    "noisy_spin_path",
    "noisy_spin_reference",
    "p_minus_lm",
    "p_minus_perturbative",
    "phase_perturbative_phi",
    "phase_perturbative_time",
    "precessing_direction",
    "precessing_spin_path",
    "precessing_spin_reference",
    "recover_noise_strength",
    "rotating_reference",
    "sample_noise",
    "schmidt",
    "sho_system",
    "solid_angle_phase",
    "spin_direction_reference",
    "spin_phase_from_schmidt",
    "spin_phase_perturbative",
    "time_domain_samples",
    "total_system_phase",
    "tracked_eigenstate",
    "two_spin_path",
    "two_spin_reference",
    "two_spin_system",
    "verify_vector_operator",
    "z_only_shift",
]
