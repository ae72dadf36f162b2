"""Command handlers: each maps a config and parameters to a Report."""

import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import networkx as nx
import numpy as np
import pandas as pd

from ..bowditch.annuli import AnnulusSystem
from ..bowditch.crossratio import (
    CrossratioTable,
    axiom_scan,
    build_table,
    crossratio_axioms,
    triangle_check,
)
from ..bowditch.graph import (
    build_graph,
    connectivity_threshold,
    distance_correlation,
    estimate_delta,
    rho_matrix,
    select_triples,
)
from ..bowditch.orbits import orbit_diameter, translation_length, wpd_census
from ..bowditch.tree_model import caterpillar, subtree_distance, tree_model, tripod_centers
from ..free_group.automorphisms import certify_inverse
from ..free_group.words import short_classes
from ..limits.currents import dual_current, pairing_current, stable_current
from ..limits.experiments import chain_monotonicity, dual_scan, scaling_diagnostic, t2_experiment
from ..limits.trees import TreeSource, length_function
from ..train_track.maps import (
    TrainTrackMap,
    bounded_cancellation,
    check_train_track,
    geometric_flag_consistent,
    growth_constants,
    iterate_tighten,
    periodic_classes,
)
from ..train_track.perron_frobenius import is_primitive_matrix
from ..utils.config import Config
from ..utils.errors import InputError
from ..utils.report import Report, read_report

logger = logging.getLogger(__name__)

BASE_TRIPLE = (0, 1, 2)
CORRELATION_TARGET = 0.9
MONOTONE_TARGET = 0.9
GROWTH_DEPTH = 10


@dataclass
class Outcome:
    results: dict[str, Any]
    assertions: dict[str, bool] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    truncation: dict[str, Any] = field(default_factory=dict)
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    dot: str | None = None


def _need(cfg: Config | None) -> Config:
    if cfg is None:
        raise InputError("This command needs --config")
    return cfg


def _experiment(cfg: Config, name: str) -> Any:
    spec = getattr(cfg.experiments, name)
    if spec is None:
        raise InputError(f"Config has no [experiments.{name}] table")
    return spec


def analyze(cfg: Config | None, map_name: str) -> Outcome:
    cfg = _need(cfg)
    f = cfg.aut(map_name)
    results: dict[str, Any] = {"map": map_name, "images": f.describe()}
    if f.has_inverse:
        certify_inverse(f)
        results["inverse_certified"] = True

    check = check_train_track(f)
    results["train_track"] = check.is_train_track
    results["illegal_turns"] = check.structure.render(f.basis)
    assertions = {"train_track": check.is_train_track}
    if not check.is_train_track:
        results["offending_edge"] = f.basis.symbol(check.offending_edge or 1)
        if check.offending_turn is not None:
            results["offending_turn"] = [f.basis.symbol(d) for d in check.offending_turn]
        results["degenerates_at"] = check.iterate
        return Outcome(results, assertions)

    m = TrainTrackMap.from_aut(f)
    short = short_classes(m.basis, 3)
    growth = growth_constants(m, short + [iterate_tighten(m, c, GROWTH_DEPTH) for c in short])
    warnings = []
    if growth.classes_checked == 0:
        warnings.append("no class reached the legality threshold: growth constants unmeasured")
    results.update(
        {
            "lambda": m.lam,
            "edge_lengths": m.lengths,
            "eigen_residual": m.metric.residual(m.matrix.T),
            "frequencies": m.frequencies.vector,
            "matrix": m.matrix,
            "primitive": is_primitive_matrix(m.matrix),
            "k0": m.k0,
            "bounded_cancellation": bounded_cancellation(m),
            "critical_constant": m.critical,
            "periodic_classes": periodic_classes(m),
            "growth_constants": growth,
        }
    )
    declared = cfg.model.maps[map_name].geometric if map_name in cfg.model.maps else None
    if declared is not None:
        assertions["geometric_flag"] = geometric_flag_consistent(m, declared)
    truncation = {"power_iterations": m.metric.iterations, "tolerance": m.metric.tolerance}
    return Outcome(results, assertions, warnings, truncation)


def limits(
    cfg: Config | None,
    map_name: str,
    L: int = 2,
    k: int = 20,
    sign: int = 1,
    element: str | None = None,
    testset: str | None = None,
    tol: float | None = None,
    k_max: int | None = None,
) -> Outcome:
    cfg = _need(cfg)
    s = cfg.settings
    tol = tol if tol is not None else s.tol
    k_max = k_max if k_max is not None else s.k_max
    pair = cfg.pair(map_name)
    classes = cfg.testset_file(testset) if testset else cfg.testset()
    g = cfg.element(element) if element else None
    chosen = length_function(pair, sign, g, classes, tol, k_max, s.workers)
    plus = length_function(pair, 1, None, classes, tol, k_max, s.workers)
    minus = length_function(pair, -1, None, classes, tol, k_max, s.workers)
    current = stable_current(pair, 1, L, k)
    finer = stable_current(pair, 1, L + 1, k)
    marginal_error = max(
        abs(value - current.as_dict().get(word, 0.0)) for word, value in finer.marginal().items()
    )
    scan = dual_scan([plus, minus], dual_current(pair, 1, L, k), 1e-3, plus, s.eps)
    results = {
        "map": map_name,
        "tree": chosen.source.label(),
        "values": chosen.as_dict(),
        "k_used": chosen.k_used,
        "error_estimate": chosen.error_estimate,
        "lambda": pair.lam,
        "mu": pair.mu,
        "T_plus": plus.as_dict(),
        "T_minus": minus.as_dict(),
        "pole_distance": plus.distance(minus),
        "current": current.labelled(),
        "current_length": current.length,
        "marginal_error": marginal_error,
        "dual_vanishing": scan.vanishing,
    }
    assertions = {
        "poles_distinct": plus.distance(minus) > s.eps_eq,
        "marginal_consistent": marginal_error < 1e-6,
        "dual_consistent": scan.consistent,
    }
    truncation = {
        "k_used": max(chosen.k_used, plus.k_used, minus.k_used),
        "error_estimate": max(chosen.error_estimate, plus.error_estimate, minus.error_estimate),
        "tol": tol,
        "k_max": k_max,
        "current_depth": k,
        "test_set": classes.labels(),
    }
    return Outcome(results, assertions, truncation=truncation)


def _graph_results(
    table: CrossratioTable, r: int | None, budget: int, seed: int
) -> tuple[dict[str, Any], list[str], str]:
    triples = select_triples(table.n_points, budget, seed)
    rho = rho_matrix(triples, table)
    if r is None:
        r = connectivity_threshold(triples, rho) + 1
    graph = build_graph(triples, rho, r)
    warnings = []
    delta = None
    if graph.connected:
        delta = estimate_delta(graph, seed=seed)
    else:
        warnings.append(f"G_{r} is disconnected: delta not estimated")
    rows, cols = np.nonzero(np.triu(rho, k=1))
    results = {
        "triples": triples,
        "rho": [[int(i), int(j), int(rho[i, j])] for i, j in zip(rows, cols, strict=True)],
        "r": r,
        "connected": graph.connected,
        "delta": delta,
    }
    return results, warnings, graph.to_dot()


def _system(cfg: Config | None, leaves: int | None, radius: int | None) -> AnnulusSystem:
    if leaves is not None:
        tree, names = caterpillar(leaves)
        return tree_model(tree, names)
    return _need(cfg).instance(radius).system()


def complex_build(
    cfg: Config | None,
    leaves: int | None = None,
    radius: int | None = None,
    mode: str | None = None,
    r: int | None = None,
) -> Outcome:
    mode = mode or ("chain" if leaves is not None else "separating")
    budget, seed = (cfg.settings.triple_budget, cfg.settings.seed) if cfg else (1500, 0)
    if r is None and cfg is not None:
        r = cfg.settings.r
    system = _system(cfg, leaves, radius)
    table = build_table(system, mode)
    graph_results, warnings, dot = _graph_results(table, r, budget, seed)
    results = {
        "sample": [p.label for p in system.sample],
        "annuli": len(system),
        "dropped": system.dropped,
        "mode": mode,
        "table": table.entries(),
        "point_table": table.point_entries(),
        **graph_results,
    }
    truncation = {"triple_budget": budget, "radius": radius, "leaves": leaves}
    assertions = {"connected": graph_results["connected"]}
    return Outcome(results, assertions, warnings, truncation, dot=dot)


def complex_check(cfg: Config | None, path: str, budget: int = 100_000, seed: int = 0) -> Outcome:
    stored = read_report(path)["results"]
    n = len(stored["sample"])
    table = CrossratioTable.from_entries(n, stored["table"], stored["point_table"], stored["mode"])
    roundtrip = (
        table.entries() == stored["table"] and table.point_entries() == stored["point_table"]
    )
    triples = [tuple(t) for t in stored["triples"]]
    rho = rho_matrix(triples, table)
    rows, cols = np.nonzero(np.triu(rho, k=1))
    rho_sparse = [[int(i), int(j), int(rho[i, j])] for i, j in zip(rows, cols, strict=True)]
    scan = axiom_scan(table, budget, seed)
    axioms = crossratio_axioms(table, seed=seed)
    triangle = triangle_check(table)
    results = {
        "source": str(path),
        "axioms": scan,
        "crossratio_axioms": axioms,
        "triangle": triangle,
    }
    assertions = {
        "table_roundtrip": roundtrip,
        "rho_roundtrip": rho_sparse == stored["rho"],
        "triangle": triangle.holds,
    }
    return Outcome(results, assertions, truncation={"quadruples": scan.quadruples})


def experiment_t2(
    cfg: Config | None, f: str | None = None, g: str | None = None, max_length: int | None = None
) -> Outcome:
    cfg = _need(cfg)
    spec = _experiment(cfg, "t2")
    s = cfg.settings
    f, g = f or spec.f, g or spec.g
    max_length = max_length or spec.max_length
    result = t2_experiment(
        TreeSource.pole(cfg.pair(f), 1),
        TreeSource.pole(cfg.pair(g), 1),
        max_length,
        cfg.testset(),
        s.eps_eq,
        spec.all_classes,
        s.tol,
        s.k_max,
        s.workers,
    )
    assertions = {
        "delta_positive": result.delta > 0,
        "ceiling_finite": math.isfinite(result.ceiling),
    }
    truncation = {"max_length": max_length, "all_classes": spec.all_classes, "tol": s.tol}
    return Outcome(result.summary(), assertions, truncation=truncation, tables={"t2": result.table})


def experiment_a1a2(cfg: Config | None, radii: tuple[int, ...] = (3, 4)) -> Outcome:
    cfg = _need(cfg)
    s = cfg.settings
    if not radii:
        raise InputError("a1a2 needs at least one radius")
    rows = []
    for radius in radii:
        scan = axiom_scan(cfg.instance(radius).table(), s.quadruple_budget, s.seed)
        rows.append({"radius": radius, **vars(scan)})
    table = pd.DataFrame(rows)
    last = rows[-1]
    assertions = {"a2_zero": last["a2_k"] == 0}
    if len(rows) >= 2:
        assertions["a1_stable"] = rows[-1]["a1_max"] == rows[-2]["a1_max"]
    results = {"radii": list(radii), "scans": rows, "eps": s.eps, "mu": s.mu}
    truncation = {"quadruple_budget": s.quadruple_budget, "sample_size": s.sample_size}
    return Outcome(results, assertions, truncation=truncation, tables={"a1a2": table})


def experiment_axioms(
    cfg: Config | None, leaves: int | None = None, k: int = 0, radius: int | None = None
) -> Outcome:
    budget4, budget5, seed = (
        (cfg.settings.quadruple_budget, cfg.settings.quintuple_budget, cfg.settings.seed)
        if cfg
        else (100_000, 20_000, 0)
    )
    mode = "chain" if leaves is not None else "separating"
    table = build_table(_system(cfg, leaves, radius), mode)
    report = crossratio_axioms(table, k, budget4, budget5, seed=seed)
    triangle = triangle_check(table)
    results = {
        "mode": mode,
        "points": table.n_points,
        "crossratio_axioms": report,
        "triangle": triangle,
    }
    assertions = {"within_k": report.passes(k), "triangle": triangle.holds}
    truncation = {"quadruple_budget": budget4, "quintuple_budget": budget5, "radius": radius}
    return Outcome(results, assertions, truncation=truncation)


def experiment_translation(
    cfg: Config | None, element: str | None = None, n_max: int | None = None
) -> Outcome:
    cfg = _need(cfg)
    spec = _experiment(cfg, "translation")
    s = cfg.settings
    inst = cfg.instance()
    f = cfg.element(element or spec.map)
    r = spec.r if spec.r is not None else s.r
    report = translation_length(
        inst, BASE_TRIPLE, f, n_max or spec.n_max, r, s.triple_budget, s.seed
    )
    warnings = ["orbit left G_r: distances are rho values"] if report.flagged else []
    return Outcome(
        {"element": f.name, **vars(report)},
        {"slope_positive": report.slope >= 0.1},
        warnings,
        {"radius": s.radius, "sample_size": s.sample_size, "triple_budget": s.triple_budget},
    )


def experiment_orbit(cfg: Config | None) -> Outcome:
    cfg = _need(cfg)
    spec = _experiment(cfg, "orbit")
    inst = cfg.instance()
    inst.set_marker(cfg.classes([spec.marker])[0])
    gens = [cfg.element(e) for e in spec.generators]
    report = orbit_diameter(inst, gens, BASE_TRIPLE, spec.radius)
    results = {
        "marker": spec.marker,
        "generators": spec.generators,
        **vars(report),
        "bound": report.bound,
    }
    return Outcome(results, {"diameter_bounded": report.holds}, truncation={"radius": spec.radius})


def experiment_wpd(cfg: Config | None) -> Outcome:
    cfg = _need(cfg)
    spec = _experiment(cfg, "wpd")
    inst = cfg.instance()
    ball = cfg.ball(spec.radius)
    report = wpd_census(inst, cfg.aut(spec.map), BASE_TRIPLE, spec.C, spec.N, ball)
    results = {
        "map": spec.map,
        "C": spec.C,
        "counts": report.counts,
        "members": report.members,
        "nonincreasing": report.nonincreasing(),
    }
    assertions = {"identity_counted": all(c >= 1 for c in report.counts.values())}
    return Outcome(results, assertions, truncation={"radius": spec.radius, "ball": len(ball)})


def experiment_treemodel(cfg: Config | None, leaves: int = 6) -> Outcome:
    tree, names = caterpillar(leaves)
    system = tree_model(tree, names)
    tables = {mode: build_table(system, mode) for mode in ("chain", "separating")}
    pairs = tables["chain"].pairs
    oracle = np.array(
        [
            [subtree_distance(tree, [names[i] for i in K], [names[i] for i in L]) for L in pairs]
            for K in pairs
        ]
    )
    for K_index, K in enumerate(pairs):
        for L_index, L in enumerate(pairs):
            if set(K) & set(L):
                oracle[K_index, L_index] = 0
    mismatches = {mode: int((t.values != oracle).sum()) for mode, t in tables.items()}

    chain = tables["chain"]
    axioms = crossratio_axioms(chain, 0)
    triangle = triangle_check(chain)
    graph_results, warnings, dot = _graph_results(chain, None, 1500, 0)

    triples = [tuple(t) for t in graph_results["triples"]]
    rho = rho_matrix(triples, chain)
    g0 = build_graph(triples, rho, 0)
    centers = tripod_centers(tree, names, triples)
    groups = {frozenset(t for t in triples if centers[t] == c) for c in set(centers.values())}
    components = {frozenset(c) for c in nx.connected_components(g0.graph)}
    g_r = build_graph(triples, rho, graph_results["r"])

    results = {
        "leaves": leaves,
        "pairs": len(pairs),
        "mismatches": mismatches,
        "crossratio_axioms": axioms,
        "triangle": triangle,
        "r": graph_results["r"],
        "delta": graph_results["delta"],
        "rank_correlation": distance_correlation(g_r),
        "g0_components": len(components),
    }
    if results["rank_correlation"] < CORRELATION_TARGET:
        warnings.append(
            f"rank correlation {results['rank_correlation']:.3f} below {CORRELATION_TARGET}"
        )
    delta = graph_results["delta"]
    assertions = {
        "oracle_match": all(v == 0 for v in mismatches.values()),
        "crossratio_k0": axioms.k == 0,
        "triangle": triangle.holds,
        "delta_at_most_one": delta is not None and delta <= 1,
        "g0_tripod_centers": components == groups,
    }
    return Outcome(results, assertions, warnings, {"leaves": leaves}, dot=dot)


def experiment_pairing(
    cfg: Config | None, map_name: str | None = None, k: int | None = None
) -> Outcome:
    cfg = _need(cfg)
    spec = _experiment(cfg, "pairing")
    s = cfg.settings
    k = k or spec.k
    pair = cfg.pair(map_name or spec.map)
    T = length_function(pair, 1, None, cfg.testset(), s.tol, s.k_max, s.workers)
    dual = pairing_current(T, stable_current(pair, -1, 1, k), spec.start)
    own = pairing_current(T, stable_current(pair, 1, 1, k), spec.start)
    results = {
        "map": pair.name,
        "dual_history": dual.history,
        "own_history": own.history,
        "dual_value": dual.value,
        "own_value": own.value,
    }
    assertions = {
        "dual_vanishes": dual.value < 1e-3,
        "own_floor": own.value >= 0.1 * own.history[0],
    }
    error = max(dual.error_estimate, own.error_estimate)
    truncation = {"k": k, "start": spec.start, "error": error}
    return Outcome(results, assertions, truncation=truncation)


def experiment_scaling(cfg: Config | None) -> Outcome:
    cfg = _need(cfg)
    spec = _experiment(cfg, "scaling")
    s = cfg.settings
    testset = cfg.testset()
    p0 = TreeSource.pole(cfg.pair(spec.p), 1)
    q0 = TreeSource.pole(cfg.pair(spec.q), -1)
    gs = [cfg.element(e) for e in spec.elements]
    lengths = [len(e.split("*")) for e in spec.elements]
    report = scaling_diagnostic(p0, q0, gs, testset, lengths, s.tol)
    fraction = chain_monotonicity(
        p0, q0, cfg.generators(), testset, spec.chains, spec.chain_length, s.seed, s.tol
    )
    results = {"violations": report.violations, "monotone_chain_fraction": fraction}
    warnings = []
    if fraction < MONOTONE_TARGET:
        warnings.append(f"monotone chain fraction {fraction:.3f} below {MONOTONE_TARGET}")
    return Outcome(
        results, warnings=warnings, tables={"scaling": report.table}, truncation={"tol": s.tol}
    )


COMMANDS: dict[str, Callable[..., Outcome]] = {
    "analyze": analyze,
    "limits": limits,
    "complex build": complex_build,
    "complex check": complex_check,
    "experiment t2": experiment_t2,
    "experiment a1a2": experiment_a1a2,
    "experiment axioms": experiment_axioms,
    "experiment translation": experiment_translation,
    "experiment orbit": experiment_orbit,
    "experiment wpd": experiment_wpd,
    "experiment treemodel": experiment_treemodel,
    "experiment pairing": experiment_pairing,
    "experiment scaling": experiment_scaling,
}


def run(command: str, config: Config | None = None, timing: bool = False, **params: Any) -> Report:
    """Dispatch one command and wrap its outcome in a Report."""
    handler = COMMANDS.get(command)
    if handler is None:
        raise InputError(f"Unknown command {command!r}")
    start = time.perf_counter()
    outcome = handler(config, **params)
    elapsed = time.perf_counter() - start
    logger.info(f"{command} finished in {elapsed:.2f}s")
    echo = {"params": params}
    if config is not None:
        echo.update(source=config.source, model=config.echo())
    return Report(
        command=command,
        config=echo,
        results=outcome.results,
        assertions=outcome.assertions,
        warnings=outcome.warnings,
        truncation=outcome.truncation,
        timing=elapsed if timing else None,
        tables=outcome.tables,
        dot=outcome.dot,
    )
