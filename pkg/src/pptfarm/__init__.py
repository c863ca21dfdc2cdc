"""Construction and numerical audit of a multipartite family of PPT-candidate states."""

from .errors import (
    CapacityError,
    DomainError,
    InvalidIndexError,
    NumericError,
    PptFarmError,
    StructureError,
    UnsupportedDecompositionError,
)
from .tensor_core import (
    FactorSpace,
    MultiIndex,
    SymMatrix,
    flat_index,
    min_eigenvalue,
    multi_index,
    partial_transpose,
    trace_distance,
    trace_norm,
    validate_density,
)
from .family import (
    BlockPair,
    FamilyParams,
    block_layout,
    build_mixture,
    build_rho0,
    build_rho_l,
    canonical_blocks,
    count_patterns,
    enumerate_patterns,
    label_map,
    support_orthogonality_check,
)
from .analysis import (
    analytic_conditions,
    bound_report,
    dims_for_epsilon,
    ppt_audit,
    q_star,
    rho0_sep_bound,
    sep_distance_lower_bound,
    verify_lemma1,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DomainError",
    "InvalidIndexError",
    "NumericError",
    "PptFarmError",
    "StructureError",
    "UnsupportedDecompositionError",
    "FactorSpace",
    "MultiIndex",
    "SymMatrix",
    "flat_index",
    "min_eigenvalue",
    "multi_index",
    "partial_transpose",
    "trace_distance",
    "trace_norm",
    "validate_density",
    "BlockPair",
    "FamilyParams",
    "block_layout",
    "build_mixture",
    "build_rho0",
    "build_rho_l",
    "canonical_blocks",
    "count_patterns",
    "enumerate_patterns",
    "label_map",
    "support_orthogonality_check",
    "analytic_conditions",
    "bound_report",
    "dims_for_epsilon",
    "ppt_audit",
    "q_star",
    "rho0_sep_bound",
    "sep_distance_lower_bound",
    "verify_lemma1",
]
