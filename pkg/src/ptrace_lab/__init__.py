"""Numerical toolkit for partial traces of non-normal matrices.

Dilations with structured partners (normal, unitary, nilpotent,
idempotent), joint dilations of prescribed Jordan forms, norm bounds
relating a matrix to its partial traces, the sharp constants behind
those bounds, and entanglement applications built on them.
"""

from .applications import (
    SearchConfig,
    SearchResult,
    WernerParams,
    WitnessSpec,
    check_two_copy,
    confirm_violation,
    kpositive_choi,
    kpositive_map_apply,
    search_two_copy_violation,
    sharp_witness_example,
    werner_state,
    witness_apply_vector,
    witness_matrix,
    witness_value,
)
from .core import (
    DecompositionError,
    MatrixFormatError,
    RandomSpec,
    Tolerance,
    default_tolerance,
    fingerprint,
    generate,
    matrix_from_payload,
    matrix_to_payload,
    rank_tol,
    singular_values,
)
from .dilations import (
    DilationResult,
    FlandersResult,
    JordanSpec,
    SegreCharacteristic,
    ShodaDecomposition,
    adjust_dilation_rank,
    check_dimension_constraint,
    constant_diagonal_form,
    flanders_similar,
    idempotent_dilation,
    jordan_block,
    joint_rank_one_dilation,
    joint_rank_two_dilation,
    nilpotent_dilation,
    normal_dilation,
    purify,
    segre_at_zero,
    shoda_decomposition,
    unitary_dilation,
)
from .inequalities import (
    NormSpec,
    check_audenaert_family,
    check_individual_bound,
    check_kron_majorization,
    check_kyfan_family,
    check_large_rank,
    check_normal_rank_r,
    check_rank_one_gamma,
    check_template,
    dual_gauge,
    kyfan_tilde,
    majorization_gap,
    norm,
    weak_submajorize,
)
from .kappa import (
    KappaEstimate,
    KappaQuery,
    KappaResult,
    LambdaProfile,
    build_lambda,
    kappa_bruteforce,
    kappa_kyfan,
    kappa_schatten,
    kappa_value,
)
from .reports import InequalityReport, verdict_tolerance
from .tensor import (
    TensorSpace,
    check_ptrace_traces,
    embed_factor,
    embed_on_factors,
    flip_operator,
    kronecker_sum,
    omega_vector,
    partial_trace,
    permute_factors,
    range_inclusion_check,
    support_values,
)

__version__ = "0.1.0"

__all__ = [
    "DecompositionError",
    "DilationResult",
    "FlandersResult",
    "InequalityReport",
    "JordanSpec",
    "KappaEstimate",
    "KappaQuery",
    "KappaResult",
    "LambdaProfile",
    "MatrixFormatError",
    "NormSpec",
    "RandomSpec",
    "SearchConfig",
    "SearchResult",
    "SegreCharacteristic",
    "ShodaDecomposition",
    "TensorSpace",
    "Tolerance",
    "WernerParams",
    "WitnessSpec",
    "adjust_dilation_rank",
    "build_lambda",
    "check_audenaert_family",
    "check_dimension_constraint",
    "check_individual_bound",
    "check_kron_majorization",
    "check_kyfan_family",
    "check_large_rank",
    "check_normal_rank_r",
    "check_ptrace_traces",
    "check_rank_one_gamma",
    "check_template",
    "check_two_copy",
    "confirm_violation",
    "constant_diagonal_form",
    "default_tolerance",
    "dual_gauge",
    "embed_factor",
    "embed_on_factors",
    "fingerprint",
    "flanders_similar",
    "flip_operator",
    "generate",
    "idempotent_dilation",
    "jordan_block",
    "joint_rank_one_dilation",
    "joint_rank_two_dilation",
    "kappa_bruteforce",
    "kappa_kyfan",
    "kappa_schatten",
    "kappa_value",
    "kpositive_choi",
    "kpositive_map_apply",
    "kronecker_sum",
    "kyfan_tilde",
    "majorization_gap",
    "matrix_from_payload",
    "matrix_to_payload",
    "nilpotent_dilation",
    "norm",
    "normal_dilation",
    "omega_vector",
    "partial_trace",
    "permute_factors",
    "purify",
    "range_inclusion_check",
    "rank_tol",
    "search_two_copy_violation",
    "segre_at_zero",
    "sharp_witness_example",
    "shoda_decomposition",
    "singular_values",
    "support_values",
    "unitary_dilation",
    "verdict_tolerance",
    "weak_submajorize",
    "werner_state",
    "witness_apply_vector",
    "witness_matrix",
    "witness_value",
]
