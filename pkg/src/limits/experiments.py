"""Experiments on limit trees: uniform length comparison, scaling, dual scans."""

import logging
import random
from collections.abc import Sequence
from dataclasses import dataclass, field

import pandas as pd

from ..free_group.automorphisms import FreeGroupAut, compose
from ..free_group.whitehead import primitive_classes
from ..free_group.words import ConjClass, enumerate_classes
from ..utils.errors import DegeneracyError, InputError
from ..utils.workers import parallel_map
from .currents import CurrentApprox, pairing_current
from .trees import (
    DEFAULT_K_MAX,
    DEFAULT_TOL,
    LengthFunctionApprox,
    TestSet,
    TreeSource,
    evaluate_source,
)

logger = logging.getLogger(__name__)


@dataclass
class T2Result:
    """Uniform lower bound delta and comparable-lengths ceiling over scanned classes."""

    delta: float
    ceiling: float
    witness: str
    table: pd.DataFrame
    classes_scanned: int
    max_length: int

    def summary(self) -> dict:
        return {
            "delta": self.delta,
            "ceiling": self.ceiling,
            "witness": self.witness,
            "classes_scanned": self.classes_scanned,
            "max_length": self.max_length,
        }


def t2_experiment(
    source_f: TreeSource,
    source_g: TreeSource,
    max_length: int,
    testset: TestSet,
    eps_eq: float = 1e-6,
    all_classes: bool = False,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
    workers: int = 1,
) -> T2Result:
    """delta = min over alpha of max(<T_f, alpha>, <T_g, alpha>) / |alpha|."""
    point_f = evaluate_source(source_f, testset, tol, k_max, workers)
    point_g = evaluate_source(source_g, testset, tol, k_max, workers)
    separation = point_f.distance(point_g)
    if separation < eps_eq:
        raise DegeneracyError(
            "trees are projectively equal on the test set",
            {"f": source_f.label(), "g": source_g.label(), "distance": separation},
        )

    basis = source_f.pair.basis
    if all_classes:
        classes = [c for n in range(1, max_length + 1) for c in enumerate_classes(basis, n)]
    else:
        classes = primitive_classes(basis, max_length)

    def row(alpha: ConjClass) -> dict:
        f_len = source_f.length(alpha, tol, k_max).value / point_f.scale
        g_len = source_g.length(alpha, tol, k_max).value / point_g.scale
        return {
            "class": str(alpha),
            "length": len(alpha),
            "T_f": f_len,
            "T_g": g_len,
            "ratio": max(f_len, g_len) / len(alpha),
            "sum_ratio": (f_len + g_len) / len(alpha),
        }

    table = pd.DataFrame(parallel_map(row, classes, workers))
    witness = table.loc[table["ratio"].idxmin()]
    logger.info(f"t2: scanned {len(table)} classes, delta={witness['ratio']:.6g}")
    return T2Result(
        delta=float(witness["ratio"]),
        ceiling=float(table["sum_ratio"].max()),
        witness=str(witness["class"]),
        table=table,
        classes_scanned=len(table),
        max_length=max_length,
    )


@dataclass
class ScalingReport:
    """Unnormalized scales of p0.g and q0.g along a sequence of elements."""

    table: pd.DataFrame
    violations: list[str] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return not self.violations


def scaling_diagnostic(
    p0: TreeSource,
    q0: TreeSource,
    gs: Sequence[FreeGroupAut],
    testset: TestSet,
    word_lengths: Sequence[int] | None = None,
    tol: float = DEFAULT_TOL,
) -> ScalingReport:
    """Report where max(scale(p0.g), scale(q0.g)) drops as word length grows."""
    if word_lengths is not None and len(word_lengths) != len(gs):
        raise InputError("word_lengths must match the element sequence")
    lengths = list(word_lengths) if word_lengths is not None else list(range(len(gs)))
    if not gs:
        return ScalingReport(pd.DataFrame(columns=["element", "word_length", "max_scale"]))

    rows = []
    for g, n in zip(gs, lengths, strict=True):
        scale_p = evaluate_source(p0.translated(g), testset, tol).scale
        scale_q = evaluate_source(q0.translated(g), testset, tol).scale
        rows.append(
            {
                "element": g.name or str(g),
                "word_length": n,
                "scale_p": scale_p,
                "scale_q": scale_q,
                "max_scale": max(scale_p, scale_q),
            }
        )
    table = pd.DataFrame(rows).sort_values("word_length", kind="stable").reset_index(drop=True)

    violations = []
    for previous, current in zip(table.itertuples(), table.iloc[1:].itertuples(), strict=False):
        if current.word_length > previous.word_length and current.max_scale < previous.max_scale:
            violations.append(current.element)
    return ScalingReport(table, violations)


def chain_monotonicity(
    p0: TreeSource,
    q0: TreeSource,
    generators: Sequence[FreeGroupAut],
    testset: TestSet,
    chains: int = 10,
    length: int = 4,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> float:
    """Fraction of random generator chains along which the max scale never drops."""
    if not generators:
        raise InputError("chain_monotonicity needs generators")
    rng = random.Random(seed)
    monotone = 0
    for _ in range(chains):
        steps = [rng.choice(generators) for _ in range(length)]
        element = steps[0]
        sequence = [element]
        for step in steps[1:]:
            element = compose(element, step)
            sequence.append(element)
        report = scaling_diagnostic(p0, q0, sequence, testset, range(1, length + 1), tol)
        monotone += report.monotone
    return monotone / chains


@dataclass
class DualScan:
    vanishing: list[int]
    expected: list[int]

    @property
    def consistent(self) -> bool:
        return self.vanishing == self.expected


def dual_scan(
    points: Sequence[LengthFunctionApprox],
    current: CurrentApprox,
    tol: float,
    dual_pole: LengthFunctionApprox,
    eps: float,
) -> DualScan:
    """Points pairing to zero with ``current`` should be exactly those near ``dual_pole``."""
    vanishing, expected = [], []
    for i, point in enumerate(points):
        estimate = pairing_current(point, current, start=current.recipe.k)
        if estimate.value < tol:
            vanishing.append(i)
        if point.distance(dual_pole) < eps:
            expected.append(i)
    logger.info(f"dual scan: {len(vanishing)} vanishing, {len(expected)} near the dual pole")
    return DualScan(vanishing, expected)
