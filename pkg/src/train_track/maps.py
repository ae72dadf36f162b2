"""Train track maps on roses: legal structure, transition matrix, eigen-metric.

A rose has one vertex and one petal per basis letter, so edge paths are words
and directions at the vertex are signed letters: the path ``u v`` takes the
turn ``{u^-1, v}``.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..free_group.automorphisms import FreeGroupAut
from ..free_group.words import (
    Basis,
    ConjClass,
    Word,
    enumerate_classes,
    free_reduce,
    is_reduced,
)
from ..utils.errors import DegeneracyError, InputError
from .perron_frobenius import EigenMetric, growth_rate

logger = logging.getLogger(__name__)

Turn = frozenset[int]


@dataclass(frozen=True)
class MarkedGraph:
    """The rose R_n, marked by the identity: petal i is the basis letter x_i."""

    basis: Basis

    @property
    def vertices(self) -> tuple[int, ...]:
        return (0,)

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(range(1, self.basis.rank + 1))

    @property
    def directed_edges(self) -> tuple[int, ...]:
        return self.basis.letters

    @staticmethod
    def reverse(edge: int) -> int:
        return -edge

    def marking(self, edge: int) -> Word:
        return Word(self.basis, (edge,))


@dataclass(frozen=True)
class LegalStructure:
    """Illegal turns at the single vertex of the rose."""

    illegal_turns: frozenset[Turn]

    def is_legal(self, d1: int, d2: int) -> bool:
        return d1 != d2 and frozenset((d1, d2)) not in self.illegal_turns

    def path_is_legal(self, letters: Sequence[int]) -> bool:
        return all(self.is_legal(-u, v) for u, v in zip(letters, letters[1:], strict=False))

    def render(self, basis: Basis) -> list[str]:
        rendered = []
        for turn in self.illegal_turns:
            pair = sorted(turn, key=lambda d: (abs(d), d < 0))
            rendered.append("{" + ",".join(basis.symbol(d) for d in pair) + "}")
        return sorted(rendered)


@dataclass(frozen=True)
class TrainTrackCheck:
    """Verdict of check_train_track, with the first offending edge when it fails."""

    is_train_track: bool
    structure: LegalStructure
    offending_edge: int | None = None
    offending_turn: tuple[int, int] | None = None
    iterate: int | None = None


def direction_map(f: FreeGroupAut) -> dict[int, int]:
    """Df: a direction goes to the first letter of the image of its edge."""
    return {d: f.image_of(d)[0] for d in f.basis.letters}


def _degeneration_depth(dmap: dict[int, int], d1: int, d2: int, limit: int) -> int | None:
    """Number of Df steps until the turn degenerates, or None if it never does."""
    seen = set()
    for depth in range(limit + 1):
        if d1 == d2:
            return depth
        key = (d1, d2)
        if key in seen:
            return None
        seen.add(key)
        d1, d2 = dmap[d1], dmap[d2]
    return None


def legal_structure(f: FreeGroupAut) -> LegalStructure:
    dmap = direction_map(f)
    directions = f.basis.letters
    limit = len(directions) ** 2
    illegal = set()
    for i, d1 in enumerate(directions):
        for d2 in directions[i + 1 :]:
            if _degeneration_depth(dmap, d1, d2, limit) is not None:
                illegal.add(frozenset((d1, d2)))
    return LegalStructure(frozenset(illegal))


def check_train_track(candidate: FreeGroupAut) -> TrainTrackCheck:
    """Decide whether every iterate of the candidate is locally injective on edges."""
    for i, image in enumerate(candidate.images, start=1):
        if not is_reduced(image.letters):
            raise InputError(f"Image of edge {candidate.basis.symbol(i)} is not reduced")

    structure = legal_structure(candidate)
    dmap = direction_map(candidate)
    limit = len(candidate.basis.letters) ** 2
    for edge, image in enumerate(candidate.images, start=1):
        letters = image.letters
        for u, v in zip(letters, letters[1:], strict=False):
            if not structure.is_legal(-u, v):
                depth = _degeneration_depth(dmap, -u, v, limit)
                logger.debug(
                    f"Edge {candidate.basis.symbol(edge)} crosses illegal turn "
                    f"({candidate.basis.symbol(-u)},{candidate.basis.symbol(v)})"
                )
                return TrainTrackCheck(
                    False,
                    structure,
                    offending_edge=edge,
                    offending_turn=(-u, v),
                    iterate=None if depth is None else depth + 1,
                )
    return TrainTrackCheck(True, structure)


def transition_matrix(f: FreeGroupAut) -> np.ndarray:
    """Entry (i, j) counts occurrences of edge i, either direction, in the image of edge j."""
    n = f.basis.rank
    matrix = np.zeros((n, n), dtype=np.int64)
    for j, image in enumerate(f.images):
        for x in image.letters:
            matrix[abs(x) - 1, j] += 1
    return matrix


@dataclass(frozen=True)
class TrainTrackMap:
    """A verified train track representative on the rose."""

    represents: FreeGroupAut
    graph: MarkedGraph = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "graph", MarkedGraph(self.represents.basis))

    @classmethod
    def from_aut(cls, f: FreeGroupAut) -> "TrainTrackMap":
        verdict = check_train_track(f)
        if not verdict.is_train_track:
            raise InputError(
                f"{f.name or f} is not a train track map: edge "
                f"{f.basis.symbol(verdict.offending_edge or 1)} crosses an illegal turn"
            )
        return cls(f)

    @property
    def basis(self) -> Basis:
        return self.represents.basis

    @property
    def name(self) -> str:
        return self.represents.name

    @property
    def edge_images(self) -> dict[int, Word]:
        return dict(zip(self.graph.edges, self.represents.images, strict=True))

    @cached_property
    def structure(self) -> LegalStructure:
        return legal_structure(self.represents)

    @cached_property
    def matrix(self) -> np.ndarray:
        return transition_matrix(self.represents)

    @cached_property
    def metric(self) -> EigenMetric:
        return eigen_metric(self)

    @cached_property
    def frequencies(self) -> EigenMetric:
        """PF data of M itself: limiting letter frequencies of iterated edges."""
        return growth_rate(self.matrix)

    @property
    def lam(self) -> float:
        return self.metric.lam

    @cached_property
    def lengths(self) -> np.ndarray:
        return self.metric.vector

    @cached_property
    def k0(self) -> int:
        return cancellation_bound(self)

    @cached_property
    def critical(self) -> float:
        return critical_constant(self)

    def metric_length(self, letters: Iterable[int]) -> float:
        counts = np.bincount(
            np.abs(np.fromiter(letters, dtype=np.int64)), minlength=self.basis.rank + 1
        )
        return float(counts[1:] @ self.lengths)

    def step(self, alpha: ConjClass) -> ConjClass:
        return self.represents.on_class(alpha)


def eigen_metric(m: TrainTrackMap) -> EigenMetric:
    """Edge lengths with length(rho(e)) = lambda * length(e): PF vector of M^T."""
    return growth_rate(m.matrix.T)


def _cancellation(left: Sequence[int], right: Sequence[int]) -> int:
    k = 0
    while k < min(len(left), len(right)) and left[-1 - k] == -right[k]:
        k += 1
    return k


def cancellation_bound(m: TrainTrackMap) -> int:
    """K0: most letters cancelled when tightening rho(u) rho(v) over reduced paths uv."""
    f = m.represents
    best = 0
    for u in f.basis.letters:
        for v in f.basis.letters:
            if v == -u:
                continue
            best = max(best, _cancellation(f.image_of(u), f.image_of(v)))
    return best


def bounded_cancellation(m: TrainTrackMap) -> float:
    """Kbcc = K0 * longest edge * lambda / (lambda - 1), in eigen-metric units."""
    lam = m.lam
    if lam <= 1.0:
        raise DegeneracyError(f"Growth rate {lam} <= 1: no critical constant")
    return m.k0 * float(np.max(m.lengths)) * lam / (lam - 1.0)


def critical_constant(m: TrainTrackMap) -> float:
    """C = 2 Kbcc / (lambda - 1) + 1."""
    return 2.0 * bounded_cancellation(m) / (m.lam - 1.0) + 1.0


def iterate_tighten(m: TrainTrackMap, alpha: ConjClass, n: int) -> ConjClass:
    """[rho^n(alpha)], cyclically reducing after every single step."""
    current = alpha
    for _ in range(n):
        current = m.step(current)
    return current


def illegal_positions(m: TrainTrackMap, letters: Sequence[int], cyclic: bool = True) -> list[int]:
    """Indices i such that the turn between letters i and i+1 is illegal."""
    n = len(letters)
    last = n if cyclic else n - 1
    structure = m.structure
    return [i for i in range(last) if not structure.is_legal(-letters[i], letters[(i + 1) % n])]


def illegal_turns_crossed(m: TrainTrackMap, alpha: ConjClass) -> list[tuple[int, int]]:
    """Illegal turns taken by the cyclic path, wraparound included."""
    word = alpha.cyclic
    return [(-word[i], word[(i + 1) % len(word)]) for i in illegal_positions(m, word)]


def legal_segments(m: TrainTrackMap, alpha: ConjClass) -> list[tuple[tuple[int, ...], float]]:
    """Maximal legal pieces of the cyclic path, each with its metric length."""
    word = alpha.cyclic
    if not word:
        raise InputError("Legal segments of the trivial class are undefined")
    cuts = illegal_positions(m, word)
    if not cuts:
        return [(word, m.metric_length(word))]
    pieces = []
    for start, stop in zip(cuts, cuts[1:] + [cuts[0] + len(word)], strict=True):
        piece = tuple(word[(i + 1) % len(word)] for i in range(start, stop))
        pieces.append((piece, m.metric_length(piece)))
    return pieces


def legality(m: TrainTrackMap, alpha: ConjClass) -> float:
    """Metric fraction of alpha carried by maximal legal pieces of length >= C."""
    threshold = m.critical
    pieces = legal_segments(m, alpha)
    total = sum(length for _, length in pieces)
    long_part = sum(length for _, length in pieces if length >= threshold)
    return long_part / total


def longest_legal_run(m: TrainTrackMap, letters: Sequence[int]) -> float:
    """Metric length of the longest legal subpath of a linear path."""
    if not letters:
        return 0.0
    cuts = illegal_positions(m, letters, cyclic=False)
    bounds = [-1, *cuts, len(letters) - 1]
    return max(
        m.metric_length(letters[a + 1 : b + 1]) for a, b in zip(bounds, bounds[1:], strict=False)
    )


@dataclass(frozen=True)
class SurvivalResult:
    """Legal survival of a long legal middle segment after one tightened step."""

    middle_length: float
    surviving: float
    lower_bound: float

    @property
    def holds(self) -> bool:
        return self.surviving >= self.lower_bound - 1e-9


def survival_check(
    m: TrainTrackMap, u: Sequence[int], v: Sequence[int], w: Sequence[int]
) -> SurvivalResult:
    """Tighten rho(u v w) and measure the longest legal piece against lambda|v| - 2 Kbcc."""
    path = list(u) + list(v) + list(w)
    if not is_reduced(path):
        raise InputError("survival_check needs a reduced path u.v.w")
    if not m.structure.path_is_legal(v):
        raise InputError("Middle segment is not legal")
    image = free_reduce(m.represents.substitute(path))
    middle = m.metric_length(v)
    return SurvivalResult(
        middle_length=middle,
        surviving=longest_legal_run(m, image),
        lower_bound=m.lam * middle - 2.0 * bounded_cancellation(m),
    )


@dataclass(frozen=True)
class GrowthConstants:
    """Measured growth data for classes that start with legality above a threshold."""

    threshold: float
    factor: float
    predicted_steps: int
    measured_steps: int
    classes_checked: int
    failures: tuple[str, ...]


def growth_constants(
    m: TrainTrackMap,
    classes: Sequence[ConjClass],
    threshold: float = 0.2,
    factor: float = 2.0,
) -> GrowthConstants:
    """Steps needed for legality-rich classes to grow by ``factor``."""
    predicted = math.ceil(math.log(factor / threshold) / math.log(m.lam)) + 2
    worst = 0
    checked = 0
    failures = []
    for alpha in classes:
        if legality(m, alpha) < threshold:
            continue
        checked += 1
        start = m.metric_length(alpha.cyclic)
        current = alpha
        for step in range(1, predicted + 1):
            current = m.step(current)
            if m.metric_length(current.cyclic) >= factor * start:
                worst = max(worst, step)
                break
        else:
            failures.append(str(alpha))
    return GrowthConstants(threshold, factor, predicted, worst, checked, tuple(failures))


def periodic_classes(
    m: TrainTrackMap, max_length: int = 4, max_period: int = 6
) -> list[ConjClass]:
    """Short classes mapped to themselves or their inverse by some power of rho."""
    found = []
    for length in range(1, max_length + 1):
        for alpha in enumerate_classes(m.basis, length):
            inverse = alpha.inverse()
            current = alpha
            for _ in range(max_period):
                current = m.step(current)
                if len(current) > 4 * max_length * max_length:
                    break
                if current in (alpha, inverse):
                    found.append(alpha)
                    break
    return found


def geometric_flag_consistent(m: TrainTrackMap, declared: bool, max_length: int = 4) -> bool:
    """A declared geometric map should have a short periodic class, and conversely."""
    return bool(periodic_classes(m, max_length)) == declared
