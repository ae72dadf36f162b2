"""Finite approximations of limit trees and currents, and experiments on them."""

from .currents import (
    CurrentApprox,
    CurrentRecipe,
    current_from_aut,
    dual_current,
    dual_of_translate,
    pairing_current,
    push_current,
    stable_current,
    subword_frequencies,
)
from .experiments import (
    DualScan,
    ScalingReport,
    T2Result,
    chain_monotonicity,
    dual_scan,
    scaling_diagnostic,
    t2_experiment,
)
from .trees import (
    LengthFunctionApprox,
    PairingEstimate,
    TestSet,
    TrainTrackPair,
    TreeSource,
    default_test_set,
    evaluate_source,
    growth_scale,
    length_function,
    pairing,
    stable_tree_length,
)

__all__ = [
    "CurrentApprox",
    "CurrentRecipe",
    "DualScan",
    "LengthFunctionApprox",
    "PairingEstimate",
    "ScalingReport",
    "T2Result",
    "TestSet",
    "TrainTrackPair",
    "TreeSource",
    "chain_monotonicity",
    "current_from_aut",
    "default_test_set",
    "dual_current",
    "dual_of_translate",
    "dual_scan",
    "evaluate_source",
    "growth_scale",
    "length_function",
    "pairing",
    "pairing_current",
    "push_current",
    "scaling_diagnostic",
    "stable_current",
    "stable_tree_length",
    "subword_frequencies",
    "t2_experiment",
]
