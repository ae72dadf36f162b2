"""Whitehead graphs, Whitehead automorphisms and the primitivity test."""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from functools import cache

import networkx as nx

from ..utils.errors import InputError
from .automorphisms import FreeGroupAut
from .words import Basis, ConjClass, enumerate_classes, reduce

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WhiteheadGraph:
    """Vertices are signed letters; one edge (u^-1, v) per cyclic adjacency uv."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def multiplicity(self, u: int, v: int) -> int:
        key = (min(u, v), max(u, v))
        return Counter(self.edges)[key]

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges)
        return graph


def whitehead_graph(alpha: ConjClass) -> WhiteheadGraph:
    if len(alpha) == 0:
        raise InputError("Whitehead graph of the trivial class is undefined")
    word = alpha.cyclic
    edges = []
    for i, u in enumerate(word):
        v = word[(i + 1) % len(word)]
        edges.append((min(-u, v), max(-u, v)))
    return WhiteheadGraph(alpha.basis.letters, tuple(edges))


def has_cut_vertex_or_disconnected(graph: WhiteheadGraph) -> bool:
    """True when the graph is disconnected or some vertex separates it."""
    simple = nx.Graph()
    simple.add_nodes_from(graph.vertices)
    simple.add_edges_from(graph.edges)
    if simple.number_of_nodes() <= 1:
        return False
    if not nx.is_connected(simple):
        return True
    return any(True for _ in nx.articulation_points(simple))


@cache
def whitehead_automorphisms(basis: Basis) -> tuple[FreeGroupAut, ...]:
    """Type I (signed permutations) followed by type II moves, in a fixed order."""
    n = basis.rank
    moves = []

    for perm in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product((1, -1), repeat=n):
            if perm == tuple(range(1, n + 1)) and all(s == 1 for s in signs):
                continue
            images = [(s * p,) for p, s in zip(perm, signs, strict=True)]
            inverse = [()] * n
            for i, (p, s) in enumerate(zip(perm, signs, strict=True), start=1):
                inverse[p - 1] = (s * i,)
            moves.append(_move(basis, images, inverse, f"perm{perm}{signs}"))

    for a in basis.letters:
        others = [x for x in range(1, n + 1) if x != abs(a)]
        for choice in itertools.product(range(4), repeat=len(others)):
            if not any(choice):
                continue
            images = [(x,) for x in range(1, n + 1)]
            inverse = [(x,) for x in range(1, n + 1)]
            for x, c in zip(others, choice, strict=True):
                images[x - 1], inverse[x - 1] = _type_two(x, a, c)
            moves.append(_move(basis, images, inverse, f"wh({basis.symbol(a)},{choice})"))
    return tuple(moves)


def _type_two(x: int, a: int, choice: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """x -> x, x a, a^-1 x or a^-1 x a, with the matching inverse image."""
    if choice == 0:
        return (x,), (x,)
    if choice == 1:
        return (x, a), (x, -a)
    if choice == 2:
        return (-a, x), (a, x)
    return (-a, x, a), (a, x, -a)


def _move(
    basis: Basis,
    images: list[tuple[int, ...]],
    inverse: list[tuple[int, ...]],
    name: str,
) -> FreeGroupAut:
    return FreeGroupAut(
        basis,
        tuple(reduce(basis, w) for w in images),
        tuple(reduce(basis, w) for w in inverse),
        name,
    )


def whitehead_minimize(alpha: ConjClass) -> ConjClass:
    """Greedy steepest descent in cyclic length under type II moves."""
    if len(alpha) == 0:
        raise InputError("Cannot minimize the trivial class")
    moves = [m for m in whitehead_automorphisms(alpha.basis) if m.name.startswith("wh")]
    current = alpha
    while len(current) > 1:
        best = None
        for move in moves:
            image = move.on_class(current)
            if len(image) < len(current) and (best is None or len(image) < len(best)):
                best = image
        if best is None:
            break
        current = best
    return current


def is_primitive(alpha: ConjClass) -> bool:
    """True iff the class contains an element of some free basis."""
    return len(whitehead_minimize(alpha)) == 1


def primitive_classes(basis: Basis, max_length: int) -> list[ConjClass]:
    found = []
    for length in range(1, max_length + 1):
        found.extend(c for c in enumerate_classes(basis, length) if is_primitive(c))
    logger.info(f"Found {len(found)} primitive classes of length <= {max_length}")
    return found
