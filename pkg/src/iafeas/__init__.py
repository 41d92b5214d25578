"""Feasibility analysis and numerical alignment for MIMO interference
networks.

Describe a network as ``"(MxN,d)..."`` text or build a
:class:`SystemSpec` directly, classify it as proper or improper by
exact equation/variable counting, and corroborate the verdict with the
alternating leakage-minimization solver over random channels.
"""

from .feasibility import (
    AssignmentEntry,
    Classification,
    CountReport,
    EquationId,
    SaturatingAssignment,
    SubsetSearchError,
    TotalVerdict,
    VariableBlock,
    Verdict,
    ViolatingSubset,
    antenna_transfer,
    brute_force_proper,
    classify_proper,
    classify_total,
    count_equations,
    count_report,
    count_variables,
    dof_ratio_bound,
    enumerate_equations,
    max_symmetric_dof,
    symmetric_proper,
    transfer_group,
)
from .model import (
    SpecSyntaxError,
    SymmetricSpec,
    SystemSpec,
    UserConfig,
    Violation,
    format_system,
    parse_system,
    validate,
)
from .numerics import (
    ChannelSet,
    EigenResult,
    adjoint,
    complex_gaussian,
    frobenius_norm,
    hermitian_eigen,
    matmul,
    orthonormalize,
    random_channel_set,
    trace,
)
from .solver import (
    AlignmentReport,
    AlignmentSolution,
    ExperimentSummary,
    SolverOptions,
    TrialResult,
    alternating_minimization,
    feasibility_experiment,
    interference_covariance,
    leakage_fraction,
    solution_summary,
    verify_alignment,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentReport",
    "AlignmentSolution",
    "AssignmentEntry",
    "ChannelSet",
    "Classification",
    "CountReport",
    "EigenResult",
    "EquationId",
    "ExperimentSummary",
    "SaturatingAssignment",
    "SolverOptions",
    "SpecSyntaxError",
    "SubsetSearchError",
    "SymmetricSpec",
    "SystemSpec",
    "TotalVerdict",
    "TrialResult",
    "UserConfig",
    "VariableBlock",
    "Verdict",
    "ViolatingSubset",
    "Violation",
    "adjoint",
    "alternating_minimization",
    "antenna_transfer",
    "brute_force_proper",
    "classify_proper",
    "classify_total",
    "complex_gaussian",
    "count_equations",
    "count_report",
    "count_variables",
    "dof_ratio_bound",
    "enumerate_equations",
    "feasibility_experiment",
    "format_system",
    "frobenius_norm",
    "hermitian_eigen",
    "interference_covariance",
    "leakage_fraction",
    "matmul",
    "max_symmetric_dof",
    "orthonormalize",
    "parse_system",
    "random_channel_set",
    "solution_summary",
    "symmetric_proper",
    "trace",
    "transfer_group",
    "validate",
    "verify_alignment",
]
