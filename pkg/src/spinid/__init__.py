"""Identifiability analysis and entry-wise identification of single-probe
spin-chain Hamiltonians.

The package models two exchange-chain families probed through one end
qubit, compresses their dynamics to small linear systems, decides which
parameters the probe can determine (producing re-checkable certificates
when it cannot), and reconstructs parameter values from sampled traces
with explicit truncation bounds.
"""

from .errors import (
    AtypicalInstanceError,
    ConditioningError,
    DimensionError,
    ResourceLimitError,
    SpecFileError,
    SpinidError,
)
from .estimator import (
    DataTrace,
    EntryEstimate,
    ErrorScalingPoint,
    EstimationResult,
    ExperimentConfig,
    ParameterizedSystem,
    TruncationBound,
    default_error_scaling_spec,
    default_truncation_order,
    error_scaling_csv,
    estimate_entry,
    identify_hamiltonian,
    run_error_scaling,
    simulate_trace,
    truncation_bound,
)
from .identifiability import (
    CounterexampleCertificate,
    IdentifiabilityVerdict,
    SearchBudget,
    StaCandidate,
    VerdictStatus,
    assess_identifiability,
    atypicality_probe,
    certificate_from_text,
    certificate_to_text,
    criterion1_unidentifiable_params,
    criterion2_search,
    expected_family_verdict,
    field_x1_counterexample,
    output_equivalence_distance,
    sta_residual,
    validate_certificate,
)
from .linsys import (
    DecompositionResult,
    LinearSystem,
    ProbedMinimal,
    evolve_output,
    extract_probed_minimal,
    kalman_decompose,
    markov_parameters,
    markov_scale,
    numerical_rank,
    propagator,
    reachability_matrices,
    scaled_markov_parameters,
    similarity_transform,
)
from .specfile import (
    ExperimentSpec,
    apply_overrides,
    dump_spec,
    load_spec_file,
    parse_spec_text,
)
from .spin_models import (
    AccessibleSet,
    Family,
    HamiltonianSpec,
    Measurement,
    accessible_set,
    build_linear_model,
    calibrate_convention,
    canonical_state_basis,
    field_coupling_matrix,
    hamiltonian_matrix,
    hamiltonian_terms,
    parameter_locations,
    quantum_oracle_trace,
    rearrange_block_form,
    structure_matrix,
)

__version__ = "0.1.0"
