"""Orbit experiments in the Out(F_n) instance: translation, bounded orbits, WPD census."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from ..free_group.automorphisms import FreeGroupAut, compose, enumerate_ball, identity_aut
from ..free_group.whitehead import is_primitive
from ..utils.errors import InputError
from .graph import Triple, build_graph, connectivity_threshold, rho_matrix, select_triples
from .out_instance import OutInstance

logger = logging.getLogger(__name__)


@dataclass
class TranslationReport:
    slope: float
    distances: list[float]
    metric: str
    r: int | None
    flagged: bool


def translation_length(
    inst: OutInstance,
    x: Triple,
    f: FreeGroupAut,
    n_max: int,
    r: int | None = None,
    triple_budget: int = 1500,
    seed: int = 0,
) -> TranslationReport:
    """Least-squares slope of N -> d(x, x.f^N) over N = 1..n_max.

    rho stands in when the orbit leaves the component of x in G_r.
    """
    if n_max < 2:
        raise InputError(f"n_max must be at least 2, got {n_max}")
    orbit = [x]
    power = identity_aut(f.basis)
    for _ in range(n_max):
        power = compose(power, f)
        orbit.append(inst.act_triple(x, power))

    table = inst.table()
    triples = sorted(set(select_triples(len(inst.points), triple_budget, seed)) | set(orbit))
    rho = rho_matrix(triples, table)
    if r is None:
        r = connectivity_threshold(triples, rho) + 1
    graph = build_graph(triples, rho, r).graph
    lengths = nx.single_source_shortest_path_length(graph, x)

    index = {t: i for i, t in enumerate(triples)}
    if all(t in lengths for t in orbit):
        distances = [float(lengths[t]) for t in orbit[1:]]
        metric, flagged = "graph", False
    else:
        logger.warning("Orbit leaves the component of x in G_r; using rho")
        distances = [float(rho[index[x], index[t]]) for t in orbit[1:]]
        metric, flagged = "rho", True

    slope = float(np.polyfit(np.arange(1, n_max + 1), distances, 1)[0])
    return TranslationReport(slope, distances, metric, r, flagged)


@dataclass
class OrbitReport:
    diameter: int
    n_marker: int
    orbit_size: int
    lower_bound: int

    @property
    def bound(self) -> int:
        return 2 * self.n_marker + 2

    @property
    def holds(self) -> bool:
        return self.diameter <= self.bound


def orbit_diameter(
    inst: OutInstance, stab_gens: Sequence[FreeGroupAut], x: Triple, radius: int
) -> OrbitReport:
    """rho-diameter of x under a ball in a marker stabilizer, against 2N + 2."""
    marker = inst.marker
    marker_id = inst.marker_id
    if marker is None or marker_id is None:
        raise InputError("orbit_diameter needs a marker class on the instance")
    if marker_id in x:
        raise InputError("The base triple must not contain the marker point")
    if not is_primitive(marker):
        raise InputError(f"Marker {marker} is not primitive")
    for g in stab_gens:
        if g.on_class(marker) != marker:
            raise InputError(f"Generator {g.name or g} moves the marker {marker}")

    ball = enumerate_ball(stab_gens, radius) if stab_gens else [identity_aut(marker.basis)]
    orbit = sorted({inst.act_triple(x, g) for g in ball})
    table = inst.table()
    diameter = int(rho_matrix(orbit, table).max())

    def to_marker(t: Triple) -> int:
        pairs = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
        return max(int(table.point_values[table.pair_index[a, b], marker_id]) for a, b in pairs)

    n_marker = to_marker(x)
    lower = max(to_marker(t) for t in orbit)
    logger.info(f"Orbit of {len(orbit)} triples: diameter {diameter}, N = {n_marker}")
    return OrbitReport(diameter, n_marker, len(orbit), lower)


@dataclass
class WPDReport:
    counts: dict[int, int]
    members: dict[int, list[str]] = field(default_factory=dict)

    def nonincreasing(self) -> bool:
        values = [self.counts[n] for n in sorted(self.counts)]
        return all(a >= b for a, b in zip(values, values[1:], strict=False))


def wpd_census(
    inst: OutInstance,
    f: FreeGroupAut,
    x: Triple,
    C: int,
    Ns: Sequence[int],
    ball: Sequence[FreeGroupAut],
) -> WPDReport:
    """For each N, the g with d(x, x.g) <= C and d(x.f^N, x.f^N.g) <= C, using rho."""
    plans = {}
    for n in Ns:
        power = identity_aut(f.basis)
        for _ in range(n):
            power = compose(power, f)
        far = inst.act_triple(x, power)
        rows = [(g, inst.act_triple(x, g), inst.act_triple(x, compose(power, g))) for g in ball]
        plans[n] = (far, rows)

    table = inst.table()
    counts, members = {}, {}
    for n, (far, rows) in plans.items():
        chosen = []
        for g, xg, farg in rows:
            near = rho_matrix([x, xg], table)[0, 1]
            moved = rho_matrix([far, farg], table)[0, 1]
            if near <= C and moved <= C:
                chosen.append(g.name or str(g))
        counts[n] = len(chosen)
        members[n] = chosen
        logger.info(f"WPD census N={n}: {len(chosen)} of {len(rows)} elements")
    return WPDReport(counts, members)
