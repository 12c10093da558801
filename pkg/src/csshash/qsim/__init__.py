"""Dense linear algebra for desk-scale identity checks and claim validators."""

from .claims import (
    bound_validator_props23,
    corollary_terms,
    default_ensemble,
    prefactor_sweep,
    prefactor_validator,
)
from .dense import (
    DenseOperator,
    DenseState,
    MatrixEnsemble,
    ball_projector,
    bell_expand,
    bell_state,
    fidelity,
    hadamard_layer,
    max_entangled,
    nested_projector,
    partial_trace,
    pauli_projector,
    purification_state,
    trace_distance,
)
from .identities import (
    completeness_residual,
    lemma7_residual,
    lemma_decomposition_residual,
    projector_algebra,
)
