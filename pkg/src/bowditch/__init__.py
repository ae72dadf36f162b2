"""Annulus systems, crossratios and the graph on triples, generically and for Out(F_n)."""

from .annuli import Annulus, AnnulusSystem, Membership, SamplePoint, annulus_less, membership
from .crossratio import (
    MODES,
    AxiomReport,
    ChainDAG,
    CrossratioAxiomReport,
    CrossratioTable,
    TriangleReport,
    axiom_scan,
    build_table,
    crossratio,
    crossratio_axioms,
    path_crossratio_check,
    separation_count,
    triangle_check,
)
from .graph import (
    BowditchGraph,
    Triple,
    build_graph,
    connectivity_threshold,
    distance_correlation,
    estimate_delta,
    make_triple,
    rank_correlation,
    rho,
    rho_matrix,
    select_triples,
)
from .orbits import (
    OrbitReport,
    TranslationReport,
    WPDReport,
    orbit_diameter,
    translation_length,
    wpd_census,
)
from .out_instance import OutInstance, OutSettings
from .tree_model import (
    caterpillar,
    path_example,
    subtree_distance,
    tree_model,
    tripod_center,
    tripod_centers,
)

__all__ = [
    "MODES",
    "Annulus",
    "AnnulusSystem",
    "AxiomReport",
    "BowditchGraph",
    "ChainDAG",
    "CrossratioAxiomReport",
    "CrossratioTable",
    "Membership",
    "OrbitReport",
    "OutInstance",
    "OutSettings",
    "SamplePoint",
    "TranslationReport",
    "TriangleReport",
    "Triple",
    "WPDReport",
    "annulus_less",
    "axiom_scan",
    "build_graph",
    "build_table",
    "caterpillar",
    "connectivity_threshold",
    "crossratio",
    "crossratio_axioms",
    "distance_correlation",
    "estimate_delta",
    "make_triple",
    "membership",
    "orbit_diameter",
    "path_crossratio_check",
    "path_example",
    "rank_correlation",
    "rho",
    "rho_matrix",
    "select_triples",
    "separation_count",
    "subtree_distance",
    "translation_length",
    "tree_model",
    "triangle_check",
    "tripod_center",
    "tripod_centers",
    "wpd_census",
]
