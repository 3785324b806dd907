"""Erasure-robust K-frame analysis toolbox."""

from .errors import (
    BudgetExceededError,
    DependentInputError,
    DofTooLargeError,
    FrameKitError,
    HypothesesNotMetError,
    InfeasibleError,
    NoConnectedPairAvailableError,
    NotDualError,
    NotKFrameError,
    NotKInvariantError,
    NotOneUniformError,
    NotPSDError,
    NotPairError,
    NotParsevalError,
    NotTwoUniformError,
    NumericalError,
)
from .frames import (
    DEFAULT_TOL,
    RANK_TOL,
    DualKind,
    DualParameterization,
    DualSystem,
    Frame,
    OperatorSpec,
    build_dual_system,
    build_frame,
    build_operator,
    canonical_k_dual,
    dual_parameterization,
    frame_operator,
    is_parseval_k_frame,
    k_frame_bounds,
    reconstruct_dual,
    verify_k_dual,
)
from .erasures import (
    ErasurePattern,
    ErasureReport,
    Measure,
    build_report,
    error_operator,
    o1,
    op_norm_error,
    r1,
    r2_closed_form,
    r2_simplified_uniform,
    report_to_dict,
    rm_bruteforce,
    spectral_radius_error,
    uniformity,
)
from .pairs import (
    Branch,
    PairBounds,
    construct_optimal_self_dual,
    is_o1_optimal_pair,
    is_r1_optimal_pair,
    is_r2_optimal_pair,
    pair_bounds,
    uniform_parseval_frame,
    unitary_transport,
)
from .duals import (
    ConnectedDecomposition,
    OptimalityCertificate,
    PerturbationFamily,
    Verdict,
    WeightPartition,
    canonical_certificate,
    connected_decomposition,
    construct_spectrally_optimal_dual,
    improve_dual_step,
    is_linearly_connected_pair,
    min_r1_fixed_frame,
    perturbation_family,
    r2_special_closed_form,
    solve_equal_inner_products,
    spans_intersect_trivially,
    two_uniform_spectral_optimality,
    weight_partition,
)
from .search import (
    GridOracleResult,
    MinimizeResult,
    SearchConfig,
    brute_force_grid_oracle,
    minimize_measure,
    minimize_r2_within_uniform,
)

__version__ = "0.1.0"
