"""Composite pulse sequences that suppress leakage in a three-level qubit."""

__version__ = "0.1.0"

from .analysis import (
    GateReport,
    closed_form_identity_errors,
    closed_form_rzxz_leakage,
    computational_error,
    gate_report,
    leakage_probabilities,
    process_fidelity,
    scaling_exponent_fit,
)
from .bloch import TwoSphereState, map_to_spheres, record_trajectory, spheres_to_state
from .hamiltonian import (
    CqLocalizedParams,
    ModelParams,
    build_cq_localized,
    build_model,
    eigenvalue_sweep,
    to_cel_basis,
)
from .optimizer import (
    CompositeRzxzTemplate,
    OptimizationProblem,
    OptimizationResult,
    SingleXTemplate,
    optimize_gate,
    sweep_optimize,
)
from .propagator import (
    DEFAULT_DT,
    NoiseSample,
    ZERO_NOISE,
    bare_ux,
    bare_uz,
    evolve_schedule,
    expm_hermitian,
    unitarity_defect,
)
from .pulse import (
    PulseSchedule,
    PulseSegment,
    build_smooth_schedule,
    erf_switch,
    sample_schedule,
    schedule_from_steps,
)
from .sequences import (
    GateSpec,
    RzxzSpec,
    arbitrary_rotation,
    constraint_eps_q,
    identity_sequence,
    rzxz,
    rzxz_target,
    two_pulse_leakage_coeffs,
    two_pulse_nogo_scan,
    x_minus_half_pi,
)

__all__ = [name for name in dir() if not name.startswith("_")]
