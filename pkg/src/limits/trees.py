"""Stable and unstable trees as projective length functions on a test set.

A point T.g of the sample space is stored only through its lengths
<T.g, alpha> = <T, g(alpha)>, where <T_f^+, beta> is the limit of
|[rho^k(beta)]| / lambda^k in the eigen-metric of a train track for f.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..free_group.automorphisms import FreeGroupAut, compose, identity_aut
from ..free_group.whitehead import primitive_classes
from ..free_group.words import Basis, ConjClass, short_classes
from ..train_track.compressed import DEFAULT_WINDOW, CompressedLoop
from ..train_track.maps import TrainTrackMap
from ..utils.errors import ConvergenceError, DegeneracyError, InputError
from ..utils.workers import parallel_map

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_K_MAX = 60
DEFAULT_PRIMITIVE_EXTRAS = 20


@dataclass(frozen=True)
class TrainTrackPair:
    """Train tracks for f and for f^-1, the maps behind T_f^+ and T_f^-."""

    forward: TrainTrackMap
    backward: TrainTrackMap | None
    name: str = ""
    geometric: bool = False
    fixed_class: ConjClass | None = None

    @classmethod
    def from_aut(
        cls,
        f: FreeGroupAut,
        backward: FreeGroupAut | None = None,
        geometric: bool = False,
        fixed_class: ConjClass | None = None,
    ) -> "TrainTrackPair":
        if backward is None and f.has_inverse:
            backward = f.inverse()
        return cls(
            TrainTrackMap.from_aut(f),
            TrainTrackMap.from_aut(backward) if backward is not None else None,
            f.name,
            geometric,
            fixed_class,
        )

    @property
    def basis(self) -> Basis:
        return self.forward.basis

    def map(self, sign: int) -> TrainTrackMap:
        if sign not in (1, -1):
            raise InputError(f"sign must be +1 or -1, got {sign}")
        if sign > 0:
            return self.forward
        if self.backward is None:
            raise InputError(f"{self.name or 'map'}: no inverse train track for the unstable tree")
        return self.backward

    @property
    def lam(self) -> float:
        return self.forward.lam

    @property
    def mu(self) -> float:
        return self.map(-1).lam


@dataclass(frozen=True)
class TestSet:
    """Classes on which length functions are sampled."""

    __test__ = False

    classes: tuple[ConjClass, ...]

    def __post_init__(self):
        if not self.classes:
            raise InputError("Test set is empty")
        if any(len(c) == 0 for c in self.classes):
            raise InputError("Test set contains the trivial class")
        if len(set(self.classes)) != len(self.classes):
            raise InputError("Test set contains duplicate classes")

    def __len__(self) -> int:
        return len(self.classes)

    def labels(self) -> list[str]:
        return [str(c) for c in self.classes]


def default_test_set(
    basis: Basis,
    extras: Sequence[ConjClass] = (),
    exclude: ConjClass | None = None,
    primitive_extras: int = DEFAULT_PRIMITIVE_EXTRAS,
) -> TestSet:
    """Classes of length <= 2, then the first primitive classes of length 3, then extras."""
    chosen: list[ConjClass] = list(short_classes(basis, 2))
    length_three = [c for c in primitive_classes(basis, 3) if len(c) == 3]
    chosen.extend(length_three[:primitive_extras])
    for c in extras:
        if c not in chosen:
            chosen.append(c)
    if exclude is not None:
        banned = {exclude, exclude.inverse()}
        chosen = [c for c in chosen if c not in banned]
    return TestSet(tuple(chosen))


@dataclass(frozen=True)
class PairingEstimate:
    """A truncated limit: value at depth k_used and the last step difference."""

    value: float
    k_used: int
    error_estimate: float
    history: tuple[float, ...] = field(default=(), compare=False)


@lru_cache(maxsize=1 << 16)
def _stable_length(
    m: TrainTrackMap, alpha: ConjClass, tol: float, k_max: int, window: int
) -> PairingEstimate:
    loop = CompressedLoop(m, alpha, window)
    lam = m.lam
    previous = loop.metric_length
    history = [previous]
    for k in range(1, k_max + 1):
        loop.step()
        current = loop.metric_length / lam**k
        history.append(current)
        delta = abs(current - previous)
        if delta < tol:
            return PairingEstimate(current, k, delta, tuple(history))
        previous = current
    raise ConvergenceError(
        f"Stable length of {alpha} under {m.name or 'map'} did not settle within {k_max} steps",
        history,
    )


def stable_tree_length(
    m: TrainTrackMap,
    alpha: ConjClass,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
    window: int = DEFAULT_WINDOW,
) -> PairingEstimate:
    """<T^+, alpha> for the stable tree of the map ``m``."""
    if len(alpha) == 0:
        raise InputError("Stable length of the trivial class is undefined")
    if m.lam <= 1.0:
        raise DegeneracyError(f"Growth rate {m.lam} <= 1")
    return _stable_length(m, alpha, tol, k_max, window)


@dataclass(frozen=True)
class TreeSource:
    """The point T_f^sign . translate, given by a train track pair."""

    pair: TrainTrackPair
    sign: int
    translate: FreeGroupAut

    @classmethod
    def pole(cls, pair: TrainTrackPair, sign: int) -> "TreeSource":
        return cls(pair, sign, identity_aut(pair.basis))

    @property
    def map(self) -> TrainTrackMap:
        return self.pair.map(self.sign)

    def translated(self, g: FreeGroupAut) -> "TreeSource":
        """(T.h).g = T.(h o g)."""
        return TreeSource(self.pair, self.sign, compose(self.translate, g))

    def length(self, alpha: ConjClass, tol: float = DEFAULT_TOL, k_max: int = DEFAULT_K_MAX):
        return stable_tree_length(self.map, self.translate.on_class(alpha), tol, k_max)

    def label(self) -> str:
        pole = "+" if self.sign > 0 else "-"
        return f"T[{self.pair.name}]{pole}.{self.translate.name or 'g'}"


@dataclass(frozen=True)
class LengthFunctionApprox:
    """Normalized length vector of a tree over a test set."""

    source: TreeSource
    classes: tuple[ConjClass, ...]
    values: tuple[float, ...]
    scale: float
    k_used: int
    error_estimate: float
    tol: float = DEFAULT_TOL
    k_max: int = DEFAULT_K_MAX
    weight: float = 1.0

    @property
    def vector(self) -> np.ndarray:
        return self.weight * np.asarray(self.values, dtype=float)

    def as_dict(self) -> dict[str, float]:
        return {str(c): v for c, v in zip(self.classes, self.vector, strict=True)}

    def distance(self, other: "LengthFunctionApprox") -> float:
        """Sup-norm distance between the two projective classes.

        Measured in units of the mean test-set value.
        """
        if self.classes != other.classes:
            raise InputError("Length functions sampled on different test sets")
        gap = np.abs(np.asarray(self.values) - np.asarray(other.values))
        return float(len(gap) * np.max(gap))

    def equals(self, other: "LengthFunctionApprox", eps_eq: float) -> bool:
        return self.distance(other) < eps_eq

    def rescaled(self, factor: float) -> "LengthFunctionApprox":
        return LengthFunctionApprox(
            self.source,
            self.classes,
            self.values,
            self.scale,
            self.k_used,
            self.error_estimate,
            self.tol,
            self.k_max,
            self.weight * factor,
        )


def length_function(
    pair: TrainTrackPair,
    sign: int,
    g: FreeGroupAut | None,
    testset: TestSet,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
    workers: int = 1,
) -> LengthFunctionApprox:
    source = TreeSource(pair, sign, g if g is not None else identity_aut(pair.basis))
    return evaluate_source(source, testset, tol, k_max, workers)


def evaluate_source(
    source: TreeSource,
    testset: TestSet,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
    workers: int = 1,
) -> LengthFunctionApprox:
    estimates = parallel_map(lambda c: source.length(c, tol, k_max), testset.classes, workers)
    raw = np.array([e.value for e in estimates])
    scale = float(raw.sum())
    if not math.isfinite(scale) or scale <= tol * len(raw):
        raise DegeneracyError(
            "degenerate test set for this tree", {"source": source.label(), "scale": scale}
        )
    logger.debug(f"{source.label()}: scale {scale:.6g}, depth {max(e.k_used for e in estimates)}")
    return LengthFunctionApprox(
        source=source,
        classes=testset.classes,
        values=tuple(float(v) for v in raw / scale),
        scale=scale,
        k_used=max(e.k_used for e in estimates),
        error_estimate=max(e.error_estimate for e in estimates),
        tol=tol,
        k_max=k_max,
    )


def growth_scale(source: TreeSource, testset: TestSet, tol: float = DEFAULT_TOL) -> float:
    """Sum of unnormalized lengths over the test set."""
    return evaluate_source(source, testset, tol).scale


def pairing(T: LengthFunctionApprox, gamma: ConjClass) -> float:
    """<T, gamma> in the normalization of T, for any nontrivial class."""
    estimate = T.source.length(gamma, T.tol, T.k_max)
    return T.weight * estimate.value / T.scale
