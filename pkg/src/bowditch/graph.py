"""The triple quasi-metric rho and the graphs G_r built from it."""

import itertools
import logging
import math
import random
from collections.abc import Sequence
from dataclasses import dataclass

import networkx as nx
import numpy as np
import pandas as pd

from ..utils.errors import DegeneracyError, InputError
from .crossratio import CrossratioTable, sample_subsets

logger = logging.getLogger(__name__)

Triple = tuple[int, int, int]


def make_triple(a: int, b: int, c: int) -> Triple:
    """Triples are unordered: reordering does not change rho."""
    if len({a, b, c}) != 3:
        raise InputError(f"Triple points must be distinct, got {(a, b, c)}")
    x, y, z = sorted((a, b, c))
    return (x, y, z)


def select_triples(n_points: int, budget: int = 1500, seed: int = 0) -> list[Triple]:
    """All triples when within budget, otherwise a seeded sample."""
    if math.comb(n_points, 3) <= budget:
        return list(itertools.combinations(range(n_points), 3))
    rng = random.Random(seed)
    chosen: set[Triple] = set()
    while len(chosen) < budget:
        chosen.add(make_triple(*rng.sample(range(n_points), 3)))
    return sorted(chosen)


def _triple_pairs(table: CrossratioTable, triples: Sequence[Triple]) -> np.ndarray:
    arr = np.asarray(triples, dtype=np.int64)
    pi = table.pair_index
    return np.stack(
        [pi[arr[:, 0], arr[:, 1]], pi[arr[:, 0], arr[:, 2]], pi[arr[:, 1], arr[:, 2]]], axis=1
    )


def rho(a: Triple, b: Triple, table: CrossratioTable) -> int:
    """Max of (a_i a_j | b_k b_l) over the nine pair-vs-pair entries."""
    return int(rho_matrix([a, b], table)[0, 1])


def rho_matrix(triples: Sequence[Triple], table: CrossratioTable) -> np.ndarray:
    """rho between every two triples, by gathering the crossratio table."""
    if not triples:
        return np.zeros((0, 0), dtype=np.int64)
    pairs = _triple_pairs(table, triples)
    out = np.zeros((len(triples), len(triples)), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            np.maximum(out, table.values[np.ix_(pairs[:, i], pairs[:, j])], out=out)
    return out


@dataclass
class BowditchGraph:
    triples: list[Triple]
    rho: np.ndarray
    r: int
    graph: nx.Graph

    @property
    def connected(self) -> bool:
        return self.graph.number_of_nodes() > 0 and nx.is_connected(self.graph)

    def components(self) -> list[set[Triple]]:
        return [set(c) for c in nx.connected_components(self.graph)]

    def distance_matrix(self) -> np.ndarray:
        """All-pairs BFS distances, -1 where unreachable."""
        index = {t: i for i, t in enumerate(self.triples)}
        dist = np.full((len(self.triples), len(self.triples)), -1, dtype=np.int64)
        for source, lengths in nx.all_pairs_shortest_path_length(self.graph):
            for target, d in lengths.items():
                dist[index[source], index[target]] = d
        return dist

    def to_dot(self) -> str:
        lines = ["graph G {"]
        for t in self.triples:
            lines.append(f'  "{t}";')
        for u, v in sorted(self.graph.edges):
            lines.append(f'  "{u}" -- "{v}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_graph(triples: Sequence[Triple], rho_table: np.ndarray, r: int) -> BowditchGraph:
    """Vertices are triples; A and B are adjacent iff rho(A, B) <= r."""
    if r < 0:
        raise InputError(f"r must be nonnegative, got {r}")
    triples = list(triples)
    graph = nx.Graph()
    graph.add_nodes_from(triples)
    rows, cols = np.nonzero(np.triu(rho_table <= r, k=1))
    graph.add_edges_from((triples[i], triples[j]) for i, j in zip(rows, cols, strict=True))
    logger.info(f"G_{r}: {len(triples)} vertices, {graph.number_of_edges()} edges")
    return BowditchGraph(triples, rho_table, r, graph)


def connectivity_threshold(triples: Sequence[Triple], rho_table: np.ndarray) -> int:
    """Smallest r for which G_r is connected."""
    if len(triples) <= 1:
        return 0
    for r in np.unique(rho_table).tolist():
        if build_graph(triples, rho_table, int(r)).connected:
            return int(r)
    return int(rho_table.max())


def estimate_delta(g: BowditchGraph, budget: int = 100_000, seed: int = 0) -> float:
    """Four-point delta: half the gap between the two largest pair sums, maximized."""
    if not g.connected:
        raise DegeneracyError(
            "graph is disconnected", {"components": len(list(nx.connected_components(g.graph)))}
        )
    dist = g.distance_matrix()
    quads, _ = sample_subsets(len(g.triples), 4, budget, seed)
    if len(quads) == 0:
        return 0.0
    w, x, y, z = quads.T
    sums = np.sort(
        np.stack([dist[w, x] + dist[y, z], dist[w, y] + dist[x, z], dist[w, z] + dist[x, y]], 1),
        axis=1,
    )
    delta = float((sums[:, 2] - sums[:, 1]).max()) / 2.0
    logger.info(f"delta = {delta} over {len(quads)} quadruples")
    return delta


def rank_correlation(a: Sequence[float], b: Sequence[float]) -> float:
    """Spearman correlation: Pearson correlation of average ranks."""
    frame = pd.DataFrame({"a": a, "b": b})
    ranks = frame.rank(method="average")
    return float(ranks["a"].corr(ranks["b"]))


def distance_correlation(g: BowditchGraph) -> float:
    """Rank correlation of graph distance against rho over distinct reachable pairs."""
    dist = g.distance_matrix()
    rows, cols = np.triu_indices(len(g.triples), k=1)
    keep = dist[rows, cols] >= 0
    return rank_correlation(g.rho[rows, cols][keep].tolist(), dist[rows, cols][keep].tolist())
