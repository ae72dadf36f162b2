"""Exact combinatorics of free groups and their outer automorphisms."""

from .automorphisms import (
    FreeGroupAut,
    OuterFingerprint,
    apply_aut,
    certify_inverse,
    compose,
    enumerate_ball,
    fingerprint,
    identity_aut,
    is_inner,
    nielsen_generators,
)
from .whitehead import (
    WhiteheadGraph,
    has_cut_vertex_or_disconnected,
    is_primitive,
    primitive_classes,
    whitehead_graph,
)
from .words import Basis, ConjClass, Word, cyclic_reduce, parse_class, parse_word, reduce

__all__ = [
    "Basis",
    "ConjClass",
    "FreeGroupAut",
    "OuterFingerprint",
    "WhiteheadGraph",
    "Word",
    "apply_aut",
    "certify_inverse",
    "compose",
    "cyclic_reduce",
    "enumerate_ball",
    "fingerprint",
    "has_cut_vertex_or_disconnected",
    "identity_aut",
    "is_inner",
    "is_primitive",
    "nielsen_generators",
    "parse_class",
    "parse_word",
    "primitive_classes",
    "reduce",
    "whitehead_graph",
]
