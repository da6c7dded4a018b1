"""Certified two-sided bounds for spectral sets of banded bi-infinite operators.

The package factorizes finite windows of a band operator with Givens
rotations, recycles the factorization as the window slides, estimates
smallest singular values iteratively against a dense oracle, assembles
certified inner/outer approximations of resolvent level sets, and traces
their boundaries on a triangular mesh.
"""

from __future__ import annotations

from .bounds import (
    BoundConfig,
    BoundReport,
    delta_bound,
    evaluate_bounds,
    nu_window_inf,
)
from .cli import (
    ImpuritySpec,
    JobError,
    JobSpec,
    OperatorSpec,
    main,
    parse_job,
    run,
    serialize_job,
)
from .givens import (
    GivensRotation,
    RotationPattern,
    RotationSequence,
    apply_rotation_left,
    compute_rotation,
    reorder_first_row,
    shift_through,
    shift_through_higher,
)
from .operators import (
    BandOperator,
    DiagonalBandOperator,
    LaurentOperator,
    LaurentSymbol,
    SplitBandOperator,
    WindowMatrix,
    add_impurity,
    adjoint,
    block_norm_sup,
    demo_periodic_operator,
    enumerate_positions,
    fejer_band_approx,
    fish_symbol,
    grcar_block,
    laurent_operator,
    singular_integral_operator,
    truncate_to_band,
    window,
    window_column,
)
from .qh_engine import (
    QHState,
    StepRecord,
    TriangularFactor,
    advance,
    complete_qr,
    estimate_restart_period,
    qh_factorize,
    run_sequence,
)
from .sigma_min import (
    SOLVER_BACKOFF,
    NearSingular,
    SigmaResult,
    back_substitute,
    dense_svd_factors,
    dense_svd_oracle,
    smallest_singular_value,
    smallest_singular_value_with_vector,
)
from .tracer import (
    ContourSet,
    GridField,
    Polyline,
    Triangulation,
    find_seed,
    grid_scan,
    trace_contour,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # operators
    "BandOperator",
    "DiagonalBandOperator",
    "LaurentOperator",
    "LaurentSymbol",
    "SplitBandOperator",
    "WindowMatrix",
    "add_impurity",
    "adjoint",
    "block_norm_sup",
    "demo_periodic_operator",
    "enumerate_positions",
    "fejer_band_approx",
    "fish_symbol",
    "grcar_block",
    "laurent_operator",
    "singular_integral_operator",
    "truncate_to_band",
    "window",
    "window_column",
    # rotations
    "GivensRotation",
    "RotationPattern",
    "RotationSequence",
    "apply_rotation_left",
    "compute_rotation",
    "reorder_first_row",
    "shift_through",
    "shift_through_higher",
    # factorization engine
    "QHState",
    "StepRecord",
    "TriangularFactor",
    "advance",
    "complete_qr",
    "estimate_restart_period",
    "qh_factorize",
    "run_sequence",
    # singular values
    "SOLVER_BACKOFF",
    "NearSingular",
    "SigmaResult",
    "back_substitute",
    "dense_svd_factors",
    "dense_svd_oracle",
    "smallest_singular_value",
    "smallest_singular_value_with_vector",
    # bounds
    "BoundConfig",
    "BoundReport",
    "delta_bound",
    "evaluate_bounds",
    "nu_window_inf",
    # tracer
    "ContourSet",
    "GridField",
    "Polyline",
    "Triangulation",
    "find_seed",
    "grid_scan",
    "trace_contour",
    # cli
    "ImpuritySpec",
    "JobError",
    "JobSpec",
    "OperatorSpec",
    "main",
    "parse_job",
    "run",
    "serialize_job",
]
