"""Optimal grace-period strategies for transactional conflict resolution."""

from .adversary import AdversaryModel, remaining_time, sample_length, worst_case_for_det
from .costmodel import (
    ConflictInstance,
    CostBreakdown,
    expected_cost,
    opt_cost,
    pointwise_cost,
    ratio_profile,
)
from .oracle import (
    abort_density_comparison,
    lagrange_identity_check,
    optimality_probe,
    run_verification_suite,
    verify_pdf,
    worst_case_ratio,
)
from .rng import Stream, derive_seed, stream
from .strategy import (
    ConflictMode,
    GracePeriodStrategy,
    RatioReport,
    StrategyKind,
    StrategySpec,
    Variant,
    competitive_ratio,
    det_competitive_ratio,
    det_threshold,
    lagrange_corner,
    make_strategy,
    threshold_condition,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryModel", "ConflictInstance", "ConflictMode", "CostBreakdown",
    "GracePeriodStrategy", "RatioReport", "StrategyKind", "StrategySpec",
    "Stream", "Variant", "abort_density_comparison", "competitive_ratio",
    "derive_seed", "det_competitive_ratio", "det_threshold", "expected_cost",
    "lagrange_corner", "lagrange_identity_check", "make_strategy",
    "optimality_probe", "opt_cost", "pointwise_cost", "ratio_profile",
    "remaining_time", "run_verification_suite", "sample_length", "stream",
    "threshold_condition", "verify_pdf", "worst_case_ratio",
    "worst_case_for_det",
]
