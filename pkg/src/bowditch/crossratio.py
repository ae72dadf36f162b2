"""Crossratios counted by annuli, and scans of the crossratio axioms."""

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from ..utils.errors import DegeneracyError, InputError
from .annuli import AnnulusSystem

logger = logging.getLogger(__name__)

MODES = ("chain", "separating")


class ChainDAG:
    """The relation A < B on instances, with longest chain lengths between any two."""

    def __init__(self, system: AnnulusSystem):
        less = system.less_matrix
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(system)))
        graph.add_edges_from(map(tuple, np.argwhere(less).tolist()))
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise DegeneracyError(
                "degenerate annulus system: shrink ε or raise margin",
                {"cycle": [system.instances[u].label for u, _ in cycle]},
            )
        self.graph = graph

        n = len(system)
        longest = np.full((n, n), -1, dtype=np.int64)
        np.fill_diagonal(longest, 0)
        for node in nx.topological_sort(graph):
            preds = list(graph.predecessors(node))
            if not preds:
                continue
            via = longest[:, preds].max(axis=1)
            reach = via >= 0
            longest[reach, node] = np.maximum(longest[reach, node], via[reach] + 1)
        self.longest = longest
        logger.debug(f"Chain DAG: {n} instances, {graph.number_of_edges()} relations")

    def chain_length(self, mask: np.ndarray) -> int:
        """Longest chain inside a convex set of instances, counted in annuli."""
        nodes = np.flatnonzero(mask)
        if nodes.size == 0:
            return 0
        return int(self.longest[np.ix_(nodes, nodes)].max()) + 1


def crossratio(
    K: Iterable[int],
    L: Iterable[int],
    system: AnnulusSystem,
    mode: str = "chain",
    dag: ChainDAG | None = None,
) -> int:
    """(K|L): longest chain K < A_1 < ... < A_n < L, or the number of separating annuli."""
    K, L = set(K), set(L)
    if mode not in MODES:
        raise InputError(f"Unknown crossratio mode {mode!r}")
    if K & L:
        return 0
    mask = system.separating(K, L)
    if mode == "separating":
        return int(mask.sum())
    return (dag or ChainDAG(system)).chain_length(mask)


def separation_count(K: Iterable[int], L: Iterable[int], system: AnnulusSystem) -> int:
    return crossratio(K, L, system, mode="separating")


@dataclass
class CrossratioTable:
    """(K|L) for every pair of unordered pairs, and (K|x) for every pair and point."""

    n_points: int
    pairs: tuple[tuple[int, int], ...]
    values: np.ndarray
    point_values: np.ndarray
    mode: str = "chain"

    @cached_property
    def pair_index(self) -> np.ndarray:
        index = np.full((self.n_points, self.n_points), -1, dtype=np.int64)
        for k, (i, j) in enumerate(self.pairs):
            index[i, j] = index[j, i] = k
        return index

    def value(self, K: Sequence[int], L: Sequence[int]) -> int:
        return int(self.values[self.pair_index[K[0], K[1]], self.pair_index[L[0], L[1]]])

    def partitions(self, quads: np.ndarray) -> np.ndarray:
        """Columns (xy|zw), (xz|yw), (xw|yz) for rows (x, y, z, w)."""
        pi = self.pair_index
        x, y, z, w = quads.T
        return np.stack(
            [
                self.values[pi[x, y], pi[z, w]],
                self.values[pi[x, z], pi[y, w]],
                self.values[pi[x, w], pi[y, z]],
            ],
            axis=1,
        )

    def entries(self) -> list[list[int]]:
        """Sparse nonzero entries [i, j, k, l, value] with (i, j) <= (k, l)."""
        out = []
        for a, b in zip(*np.nonzero(np.triu(self.values)), strict=True):
            (i, j), (k, l) = self.pairs[a], self.pairs[b]
            out.append([i, j, k, l, int(self.values[a, b])])
        return out

    def point_entries(self) -> list[list[int]]:
        """Sparse nonzero (pair | point) entries [i, j, x, value]."""
        return [
            [*self.pairs[a], int(x), int(self.point_values[a, x])]
            for a, x in zip(*np.nonzero(self.point_values), strict=True)
        ]

    @classmethod
    def from_entries(
        cls,
        n_points: int,
        entries: Iterable[Sequence[int]],
        point_entries: Iterable[Sequence[int]] = (),
        mode: str = "chain",
    ) -> "CrossratioTable":
        pairs = tuple(itertools.combinations(range(n_points), 2))
        table = cls(
            n_points,
            pairs,
            np.zeros((len(pairs), len(pairs)), dtype=np.int64),
            np.zeros((len(pairs), n_points), dtype=np.int64),
            mode,
        )
        pi = table.pair_index
        for i, j, k, l, value in entries:
            a, b = pi[i, j], pi[k, l]
            table.values[a, b] = table.values[b, a] = value
        for i, j, x, value in point_entries:
            table.point_values[pi[i, j], x] = value
        return table


def build_table(system: AnnulusSystem, mode: str = "chain") -> CrossratioTable:
    if mode not in MODES:
        raise InputError(f"Unknown crossratio mode {mode!r}")
    n = len(system.sample)
    pairs = tuple(itertools.combinations(range(n), 2))
    if not pairs:
        raise InputError("Crossratio table needs at least two sample points")
    first = np.array([i for i, _ in pairs])
    second = np.array([j for _, j in pairs])
    minus, plus = system.minus_matrix, system.plus_matrix
    sources = (minus[:, first] & minus[:, second]).T
    sinks = (plus[:, first] & plus[:, second]).T

    if mode == "separating":
        values = sources.astype(np.int64) @ sinks.T.astype(np.int64)
        point_values = sources.astype(np.int64) @ plus.astype(np.int64)
    else:
        dag = ChainDAG(system)
        values = np.zeros((len(pairs), len(pairs)), dtype=np.int64)
        for a in range(len(pairs)):
            for b in range(a, len(pairs)):
                values[a, b] = values[b, a] = dag.chain_length(sources[a] & sinks[b])
        point_values = np.zeros((len(pairs), n), dtype=np.int64)
        for a in range(len(pairs)):
            for x in range(n):
                point_values[a, x] = dag.chain_length(sources[a] & plus[:, x])

    shared = (
        (first[:, None] == first[None, :])
        | (first[:, None] == second[None, :])
        | (second[:, None] == first[None, :])
        | (second[:, None] == second[None, :])
    )
    values[shared] = 0
    logger.info(f"Crossratio table ({mode}): {len(pairs)} pairs, max {int(values.max())}")
    return CrossratioTable(n, pairs, values, point_values, mode)


def sample_subsets(n: int, size: int, budget: int, seed: int) -> tuple[np.ndarray, bool]:
    """All size-subsets of range(n) when within budget, else a seeded sample; rows sorted."""
    total = math.comb(n, size)
    if total == 0:
        return np.zeros((0, size), dtype=np.int64), True
    if total <= budget:
        return np.array(list(itertools.combinations(range(n), size)), dtype=np.int64), True
    rng = np.random.default_rng(seed)
    seen: set[tuple[int, ...]] = set()
    while len(seen) < budget:
        seen.add(tuple(sorted(rng.choice(n, size, replace=False).tolist())))
    return np.array(sorted(seen), dtype=np.int64), False


@dataclass
class AxiomReport:
    """A1 as the largest value seen, A2 as the smallest k that holds on every scanned quadruple."""

    a1_max: int
    a2_k: int
    a2_zero_fraction: float
    quadruples: int
    exhaustive: bool


def axiom_scan(table: CrossratioTable, budget: int = 100_000, seed: int = 0) -> AxiomReport:
    quads, exhaustive = sample_subsets(table.n_points, 4, budget, seed)
    if len(quads) == 0:
        return AxiomReport(int(table.values.max()), 0, 1.0, 0, exhaustive)
    parts = np.sort(table.partitions(quads), axis=1)
    second = parts[:, 1]
    logger.info(f"Axiom scan over {len(quads)} quadruples: A2 k = {int(second.max())}")
    return AxiomReport(
        a1_max=int(parts[:, 2].max()),
        a2_k=int(second.max()),
        a2_zero_fraction=float(np.mean(second == 0)),
        quadruples=len(quads),
        exhaustive=exhaustive,
    )


@dataclass
class CrossratioAxiomReport:
    c1_k: int
    c2_k: int
    quadruples: int
    quintuples: int
    path_checked: int
    path_passed: int

    @property
    def k(self) -> int:
        return max(self.c1_k, self.c2_k)

    def passes(self, k: int) -> bool:
        return self.k <= k


def _c2_deviation(table: CrossratioTable, quints: np.ndarray) -> np.ndarray:
    """Per 5-subset, the best labeling's largest deviation from the three relations."""
    pi, v = table.pair_index, table.values
    best = np.full(len(quints), np.iinfo(np.int64).max, dtype=np.int64)
    for perm in itertools.permutations(range(5)):
        x, y, z, w, u = quints[:, list(perm)].T
        xy_zu = v[pi[x, y], pi[z, u]]
        xy_wu = v[pi[x, y], pi[w, u]]
        xu_zw = v[pi[x, u], pi[z, w]]
        yu_zw = v[pi[y, u], pi[z, w]]
        xy_zw = v[pi[x, y], pi[z, w]]
        worst = np.maximum.reduce(
            [np.abs(xy_zu - xy_wu), np.abs(xu_zw - yu_zw), np.abs(xy_zw - xy_zu - xu_zw)]
        )
        best = np.minimum(best, worst)
    return best


def crossratio_axioms(
    table: CrossratioTable,
    k: int = 0,
    budget4: int = 100_000,
    budget5: int = 20_000,
    path_budget: int = 200,
    seed: int = 0,
) -> CrossratioAxiomReport:
    """Smallest k for (C1) and (C2) over scanned subsets, plus path-property spot checks."""
    quads, _ = sample_subsets(table.n_points, 4, budget4, seed)
    quints, _ = sample_subsets(table.n_points, 5, budget5, seed)
    c1 = int(np.sort(table.partitions(quads), axis=1)[:, 1].max()) if len(quads) else 0
    c2 = int(_c2_deviation(table, quints).max()) if len(quints) else 0
    checked, passed = path_crossratio_check(table, max(k, c1, c2), path_budget, seed)
    logger.info(f"Crossratio axioms: C1 k={c1}, C2 k={c2}, path {passed}/{checked}")
    return CrossratioAxiomReport(c1, c2, len(quads), len(quints), checked, passed)


def path_crossratio_check(
    table: CrossratioTable, k: int, budget: int = 200, seed: int = 0
) -> tuple[int, int]:
    """Count intermediate values p of (xy|zw) realized by some u with (xy:u:zw)."""
    quads, _ = sample_subsets(table.n_points, 4, budget, seed)
    pi, v = table.pair_index, table.values

    def cr(a, b, c, d):
        return v[pi[a, b], pi[c, d]]

    def split(a, b, c, d):
        return cr(a, c, b, d) <= k and cr(a, d, b, c) <= k

    checked = passed = 0
    for quad in quads.tolist():
        parts = table.partitions(np.array([quad]))[0]
        labelings = [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)]
        a, b, c, d = (quad[i] for i in labelings[int(np.argmax(parts))])
        x, y, z, w = a, b, c, d
        total = int(cr(x, y, z, w))
        others = [u for u in range(table.n_points) if u not in quad]
        for p in range(1, total):
            checked += 1
            for u in others:
                if (
                    split(x, y, z, w)
                    and split(y, u, z, w)
                    and split(x, u, z, w)
                    and split(x, y, u, w)
                    and split(x, y, u, z)
                    and abs(int(cr(x, y, z, u)) - p) <= k
                ):
                    passed += 1
                    break
    return checked, passed


@dataclass
class TriangleReport:
    checked: int
    violations: int
    worst_excess: int

    @property
    def holds(self) -> bool:
        return self.violations == 0


def triangle_check(table: CrossratioTable) -> TriangleReport:
    """(A|B) <= (A|x) + (x|B) + 1 over every pair A, pair B and point x."""
    violations = 0
    worst = 0
    for x in range(table.n_points):
        col = table.point_values[:, x]
        excess = table.values - (col[:, None] + col[None, :] + 1)
        violations += int((excess > 0).sum())
        worst = max(worst, int(excess.max()))
    checked = table.values.size * table.n_points
    return TriangleReport(checked, violations, max(worst, 0))
