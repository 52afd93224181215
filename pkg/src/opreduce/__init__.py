"""Exact decoupling of linear systems of operator equations ``A(x) = B x + φ``."""

from .canonical_forms import (
    Decomposition,
    Orientation,
    RankOneSpec,
    build_matrix,
    invariant_factors,
    jordan_decomposition,
    rank_one_char_poly,
    rank_one_min_poly,
    rational_decomposition,
)
from .exact_linalg import Mat, Poly, adjugate_char_coeffs, char_poly, delta_minor_sum, det
from .oracle import (
    DerivativeOracle,
    PolyExpFunction,
    SequenceVec,
    ShiftOracle,
    apply_power,
    check_reduced,
    eval_poly_in_A,
    synthesize_instance,
)
from .reduction import (
    ForcingExpr,
    OperatorSystem,
    PartialSystem,
    ReducedEquation,
    partial_reduce_companion_blocks,
    partial_reduce_jordan,
    partial_reduce_rational,
    total_reduce_adjugate,
    total_reduce_minors,
    total_reduce_rank_one,
)

__version__ = "0.1.0"
