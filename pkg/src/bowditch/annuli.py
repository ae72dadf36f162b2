"""Annuli on a finite sample and the nesting relation A < B."""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from ..utils.errors import DegeneracyError, InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SamplePoint:
    """A point of the sampled space: a tree length function or an abstract label."""

    id: int
    label: str
    payload: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Membership:
    """Where a point sits relative to an annulus, with the distances that decided it."""

    in_minus: bool
    in_plus: bool
    distance_minus: float | None = None
    distance_plus: float | None = None

    @property
    def in_gap(self) -> bool:
        return not (self.in_minus or self.in_plus)


@dataclass(frozen=True)
class Annulus:
    """Interiors of the two sides, as sets of sample ids."""

    minus: frozenset[int]
    plus: frozenset[int]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.minus & self.plus:
            raise DegeneracyError(
                f"Annulus {self.label or '?'} has overlapping sides",
                {"shared": sorted(self.minus & self.plus)},
            )

    def negate(self) -> "Annulus":
        label = self.label[1:] if self.label.startswith("-") else f"-{self.label}"
        return Annulus(self.plus, self.minus, label)

    @property
    def signature(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(sorted(self.minus)), tuple(sorted(self.plus))


def membership(p: SamplePoint, annulus: Annulus) -> Membership:
    return Membership(p.id in annulus.minus, p.id in annulus.plus)


def annulus_less(a: Annulus, b: Annulus, sample: Sequence[SamplePoint]) -> bool:
    """A < B iff int A+ and int B- cover the sample."""
    if a == b:
        return False
    ids = {p.id for p in sample}
    return ids <= (a.plus | b.minus)


@dataclass
class AnnulusSystem:
    """A deduplicated, negation-closed family of annuli over a fixed sample."""

    sample: tuple[SamplePoint, ...]
    instances: tuple[Annulus, ...]
    dropped: int = 0

    def __post_init__(self):
        ids = [p.id for p in self.sample]
        if ids != list(range(len(ids))):
            raise InputError("Sample ids must be 0..N-1 in order")

    @classmethod
    def from_candidates(
        cls, sample: Sequence[SamplePoint], candidates: Iterable[Annulus]
    ) -> "AnnulusSystem":
        """Close under negation, deduplicate by signature, drop instances no chain can use."""
        everything = frozenset(p.id for p in sample)
        seen: dict[tuple, Annulus] = {}
        for candidate in candidates:
            for a in (candidate, candidate.negate()):
                seen.setdefault(a.signature, a)
        kept = tuple(
            a
            for a in seen.values()
            if a.minus and a.plus and a.minus != everything and a.plus != everything
        )
        dropped = len(seen) - len(kept)
        if dropped:
            logger.warning(f"Dropped {dropped} annulus instances with an empty or full side")
        logger.info(f"Annulus system: {len(kept)} instances over {len(sample)} points")
        return cls(tuple(sample), kept, dropped)

    def __len__(self) -> int:
        return len(self.instances)

    @cached_property
    def minus_matrix(self) -> np.ndarray:
        return self._side_matrix("minus")

    @cached_property
    def plus_matrix(self) -> np.ndarray:
        return self._side_matrix("plus")

    def _side_matrix(self, side: str) -> np.ndarray:
        matrix = np.zeros((len(self.instances), len(self.sample)), dtype=bool)
        for i, a in enumerate(self.instances):
            matrix[i, sorted(getattr(a, side))] = True
        return matrix

    @cached_property
    def less_matrix(self) -> np.ndarray:
        """less[i, j] iff instance i < instance j."""
        outside_plus = (~self.plus_matrix).astype(np.int64)
        outside_minus = (~self.minus_matrix).astype(np.int64)
        less = (outside_plus @ outside_minus.T) == 0
        np.fill_diagonal(less, False)
        return less

    def separating(self, K: Iterable[int], L: Iterable[int]) -> np.ndarray:
        """Boolean mask of instances with K in the minus side and L in the plus side."""
        k, l = sorted(set(K)), sorted(set(L))
        return self.minus_matrix[:, k].all(axis=1) & self.plus_matrix[:, l].all(axis=1)
