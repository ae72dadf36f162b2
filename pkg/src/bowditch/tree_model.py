"""Finite trees as annulus systems, with distance oracles to check them against.

Every directed edge of a tree splits the leaves in two; taking those leaf
sets as the sides of an annulus makes the annulus-counted crossratio equal
to the number of edges between the spanned subtrees.
"""

import logging
from collections.abc import Iterable, Sequence

import networkx as nx

from ..utils.errors import InputError
from .annuli import Annulus, AnnulusSystem, SamplePoint

logger = logging.getLogger(__name__)


def caterpillar(n_leaves: int) -> tuple[nx.Graph, list[str]]:
    """Spine s0..s(m-1), one leaf per inner spine vertex and two at each end.

    Three leaves give a star. No vertex has degree 2.
    """
    if n_leaves < 3:
        raise InputError(f"A caterpillar needs at least 3 leaves, got {n_leaves}")
    tree = nx.Graph()
    leaves: list[str] = []

    def hang(vertex: str) -> None:
        leaf = f"l{len(leaves)}"
        tree.add_edge(vertex, leaf)
        leaves.append(leaf)

    if n_leaves == 3:
        for _ in range(3):
            hang("s0")
        return tree, leaves

    spine = [f"s{i}" for i in range(n_leaves - 2)]
    nx.add_path(tree, spine)
    for i, vertex in enumerate(spine):
        hang(vertex)
        if i in (0, len(spine) - 1):
            hang(vertex)
    return tree, leaves


def path_example() -> tuple[nx.Graph, list[str]]:
    """Spine a-b-c-d-e, a leaf on b, c, d and two on each end."""
    tree = nx.Graph()
    nx.add_path(tree, ["a", "b", "c", "d", "e"])
    leaves = []
    for vertex, count in (("a", 2), ("b", 1), ("c", 1), ("d", 1), ("e", 2)):
        for k in range(count):
            leaf = f"{vertex}{k}"
            tree.add_edge(vertex, leaf)
            leaves.append(leaf)
    return tree, leaves


def tree_model(tree: nx.Graph, leaves: Sequence[str]) -> AnnulusSystem:
    """One annulus per directed edge: leaves behind the edge, leaves ahead of it."""
    if not nx.is_tree(tree):
        raise InputError("tree_model needs a tree")
    missing = [leaf for leaf in leaves if leaf not in tree]
    if missing:
        raise InputError(f"Unknown leaves {missing}")
    index = {leaf: i for i, leaf in enumerate(leaves)}
    sample = tuple(SamplePoint(i, leaf, leaf) for i, leaf in enumerate(leaves))

    candidates = []
    for u, v in tree.edges:
        cut = tree.copy()
        cut.remove_edge(u, v)
        behind = nx.node_connected_component(cut, u)
        minus = frozenset(index[x] for x in leaves if x in behind)
        plus = frozenset(index[x] for x in leaves if x not in behind)
        candidates.append(Annulus(minus, plus, f"{u}->{v}"))
    return AnnulusSystem.from_candidates(sample, candidates)


def steiner_nodes(tree: nx.Graph, points: Iterable[str]) -> set[str]:
    points = list(points)
    nodes = {points[0]}
    for p in points[1:]:
        nodes.update(nx.shortest_path(tree, points[0], p))
    return nodes


def subtree_distance(tree: nx.Graph, K: Iterable[str], L: Iterable[str]) -> int:
    """Edge distance between the subtrees spanned by K and by L."""
    left, right = steiner_nodes(tree, K), steiner_nodes(tree, L)
    if left & right:
        return 0
    lengths = nx.multi_source_dijkstra_path_length(tree, left)
    return int(min(lengths[v] for v in right))


def tripod_center(tree: nx.Graph, x: str, y: str, z: str) -> str:
    """The median vertex shared by the three geodesics between x, y and z."""
    common = (
        set(nx.shortest_path(tree, x, y))
        & set(nx.shortest_path(tree, y, z))
        & set(nx.shortest_path(tree, x, z))
    )
    (center,) = common
    return center


def tripod_centers(
    tree: nx.Graph, leaves: Sequence[str], triples: Iterable[tuple[int, int, int]]
) -> dict[tuple[int, int, int], str]:
    """Tripod center of each triple of leaf indices."""
    return {t: tripod_center(tree, *(leaves[i] for i in t)) for t in triples}
