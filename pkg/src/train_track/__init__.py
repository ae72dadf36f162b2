"""Train track representatives on roses and their Perron-Frobenius data."""

from .compressed import CompressedLoop
from .maps import (
    GrowthConstants,
    LegalStructure,
    MarkedGraph,
    SurvivalResult,
    TrainTrackCheck,
    TrainTrackMap,
    bounded_cancellation,
    cancellation_bound,
    check_train_track,
    critical_constant,
    direction_map,
    eigen_metric,
    geometric_flag_consistent,
    growth_constants,
    illegal_turns_crossed,
    iterate_tighten,
    legal_segments,
    legal_structure,
    legality,
    longest_legal_run,
    periodic_classes,
    survival_check,
    transition_matrix,
)
from .perron_frobenius import EigenMetric, growth_rate, is_primitive_matrix

__all__ = [
    "CompressedLoop",
    "EigenMetric",
    "GrowthConstants",
    "LegalStructure",
    "MarkedGraph",
    "SurvivalResult",
    "TrainTrackCheck",
    "TrainTrackMap",
    "bounded_cancellation",
    "cancellation_bound",
    "check_train_track",
    "critical_constant",
    "direction_map",
    "eigen_metric",
    "geometric_flag_consistent",
    "growth_constants",
    "growth_rate",
    "illegal_turns_crossed",
    "is_primitive_matrix",
    "iterate_tighten",
    "legal_segments",
    "legal_structure",
    "legality",
    "longest_legal_run",
    "periodic_classes",
    "survival_check",
    "transition_matrix",
]
