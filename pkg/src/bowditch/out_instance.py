"""The annulus system on translates of stable and unstable trees.

Sample points are trees T_i^s . h for h in an enumerated ball of Out(F_n),
together with points walked along each axis: the poles of the other pairs
translated by f_i^n for 0 < |n| <= axis. The base annulus of the pair i is
(D_i^-, D_i^+), the epsilon-balls around the two poles, and its translates are
A_i . g for g in the ball and A_i . f_i^k for |k| <= axis. A point p lies in a
side of A_i . g when p . g^-1 lies in that side of A_i.

Distances are sup-norm gaps measured in units of the mean test-set value, in
which the two poles of a Fibonacci-type map sit about 1.8 apart.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from ..free_group.automorphisms import (
    FreeGroupAut,
    compose,
    enumerate_ball,
    fingerprint,
    identity_aut,
)
from ..free_group.words import ConjClass
from ..limits.trees import (
    DEFAULT_K_MAX,
    DEFAULT_TOL,
    LengthFunctionApprox,
    TestSet,
    TrainTrackPair,
    TreeSource,
    evaluate_source,
    pairing,
)
from ..utils.errors import DegeneracyError, InputError
from ..utils.workers import parallel_map
from .annuli import Annulus, AnnulusSystem, Membership, SamplePoint
from .crossratio import CrossratioTable, build_table
from .graph import Triple, make_triple

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OutSettings:
    eps: float = 0.5
    mu: float = 0.05
    eps_eq: float = 1e-6
    sample_size: int = 48
    tol: float = DEFAULT_TOL
    k_max: int = DEFAULT_K_MAX
    workers: int = 1
    axis: int = 5

    def __post_init__(self):
        if not 0 < self.mu < self.eps:
            raise InputError(f"Need 0 < mu < eps, got mu={self.mu}, eps={self.eps}")
        if self.eps_eq <= 0 or self.sample_size < 4:
            raise InputError("eps_eq must be positive and sample_size at least 4")
        if self.axis < 0:
            raise InputError(f"axis must be non-negative, got {self.axis}")


@dataclass(frozen=True)
class _Origin:
    pair: int
    sign: int
    translate: FreeGroupAut


class OutInstance:
    """Sample, memoized length vectors and annulus system for a set of train track pairs."""

    def __init__(
        self,
        pairs: Sequence[TrainTrackPair],
        testset: TestSet,
        ball: Sequence[FreeGroupAut],
        settings: OutSettings | None = None,
    ):
        if not pairs:
            raise InputError("OutInstance needs at least one train track pair")
        if not ball:
            raise InputError("OutInstance needs a nonempty ball")
        self.pairs = list(pairs)
        self.testset = testset
        self.ball = list(ball)
        self.settings = settings or OutSettings()
        self.marker: ConjClass | None = None
        self.points: list[SamplePoint] = []
        self._origins: list[_Origin | None] = []
        self._vectors: dict[tuple, LengthFunctionApprox] = {}
        self._system: AnnulusSystem | None = None

        identity = identity_aut(self.pairs[0].basis)
        self.powers = self._axis_powers()
        self.poles = {
            (i, s): self.vector(i, s, identity) for i in range(len(self.pairs)) for s in (1, -1)
        }
        for i in range(len(self.pairs)):
            gap = self.poles[i, 1].distance(self.poles[i, -1])
            if gap <= 2 * self.settings.eps:
                raise DegeneracyError(
                    "poles closer than 2 eps: shrink eps",
                    {"pair": self.pairs[i].name, "separation": gap},
                )
        self._populate()

    @classmethod
    def build(
        cls,
        pairs: Sequence[TrainTrackPair],
        testset: TestSet,
        generators: Sequence[FreeGroupAut],
        radius: int,
        settings: OutSettings | None = None,
    ) -> "OutInstance":
        return cls(pairs, testset, enumerate_ball(generators, radius), settings)

    def vector(self, pair: int, sign: int, h: FreeGroupAut) -> LengthFunctionApprox:
        """Normalized lengths of T_pair^sign . h, memoized by outer class of h."""
        key = (pair, sign, fingerprint(h).key)
        if key not in self._vectors:
            source = TreeSource(self.pairs[pair], sign, h)
            self._vectors[key] = evaluate_source(
                source, self.testset, self.settings.tol, self.settings.k_max
            )
        return self._vectors[key]

    def _axis_powers(self) -> dict[tuple[int, int], FreeGroupAut]:
        """f_i^k for 0 < |k| <= axis, keyed by (i, k)."""
        powers = {}
        for i, pair in enumerate(self.pairs):
            f = pair.forward.represents
            if not f.has_inverse:
                logger.warning(f"{pair.name}: no inverse images, skipping its axis")
                continue
            name = pair.name or f"f{i}"
            forward = backward = identity_aut(f.basis)
            for k in range(1, self.settings.axis + 1):
                forward = compose(forward, f)
                backward = compose(backward, f.inverse())
                powers[i, k] = forward.renamed(f"{name}^{k}")
                powers[i, -k] = backward.renamed(f"{name}^-{k}")
        return powers

    def _axis_seeds(self, i: int) -> list[tuple[int, int, FreeGroupAut]]:
        """Points walked along the axis of f_i: the poles of the other pairs."""
        identity = identity_aut(self.pairs[i].basis)
        seeds = [(j, s, identity) for j in range(len(self.pairs)) if j != i for s in (1, -1)]
        if not seeds:
            seeds = [(i, s, g) for g in self.ball[1:2] for s in (1, -1)]
        return seeds

    def _populate(self) -> None:
        identity = identity_aut(self.pairs[0].basis)
        planned = [(i, s, identity) for i in range(len(self.pairs)) for s in (1, -1)]
        for i in range(len(self.pairs)):
            for n in range(1, self.settings.axis + 1):
                for j, s, h in self._axis_seeds(i):
                    for k in (n, -n):
                        if (i, k) in self.powers:
                            planned.append((j, s, compose(h, self.powers[i, k])))
        planned += [(i, s, g) for g in self.ball for i in range(len(self.pairs)) for s in (1, -1)]

        for pair, sign, h in planned:
            if len(self.points) >= self.settings.sample_size:
                logger.info(f"Sample capped at {len(self.points)} points")
                return
            self.add_point(pair, sign, h)
        logger.info(f"Sample holds {len(self.points)} points from a ball of {len(self.ball)}")

    def add_point(self, pair: int, sign: int, h: FreeGroupAut) -> int:
        """Id of T_pair^sign . h, appended unless an eps_eq-equal point exists."""
        vec = self.vector(pair, sign, h)
        for p in self.points:
            if p.payload is not None and p.payload.equals(vec, self.settings.eps_eq):
                return p.id
        pid = len(self.points)
        self.points.append(SamplePoint(pid, vec.source.label(), vec))
        self._origins.append(_Origin(pair, sign, h))
        self._system = None
        return pid

    def set_marker(self, gamma: ConjClass) -> int:
        """Add the point S standing for a simplicial tree in which gamma is elliptic."""
        if len(gamma) == 0:
            raise InputError("Marker class must be nontrivial")
        if self.marker is not None:
            raise InputError("Marker already set")
        self.marker = gamma
        pid = len(self.points)
        self.points.append(SamplePoint(pid, f"S[{gamma}]", None))
        self._origins.append(None)
        self._system = None
        return pid

    def _require_marker(self) -> ConjClass:
        if self.marker is None:
            raise InputError("No marker class set")
        return self.marker

    @property
    def marker_id(self) -> int | None:
        for p in self.points:
            if p.payload is None:
                return p.id
        return None

    def act(self, pid: int, g: FreeGroupAut) -> int:
        """Id of p . g."""
        origin = self._origins[pid]
        if origin is None:
            if g.on_class(self._require_marker()) != self.marker:
                raise InputError(f"{g.name or g} moves the marker {self.marker}")
            return pid
        return self.add_point(origin.pair, origin.sign, compose(origin.translate, g))

    def act_triple(self, t: Triple, g: FreeGroupAut) -> Triple:
        ids = [self.act(p, g) for p in t]
        if len(set(ids)) < 3:
            raise DegeneracyError(f"Translate of {t} by {g.name or g} collapsed", {"ids": ids})
        return make_triple(*ids)

    def membership(self, pid: int, pair: int, g: FreeGroupAut) -> Membership:
        """Side of A_pair . g containing the point, with strict-interior margin."""
        inside = self.settings.eps - self.settings.mu
        origin = self._origins[pid]
        if origin is None:
            return self.marker_membership(pair, g)
        moved = self.vector(origin.pair, origin.sign, compose(origin.translate, g.inverse()))
        d_minus = moved.distance(self.poles[pair, -1])
        d_plus = moved.distance(self.poles[pair, 1])
        return Membership(d_minus < inside, d_plus < inside, d_minus, d_plus)

    def marker_membership(self, pair: int, g: FreeGroupAut) -> Membership:
        """S lies in D^s . g when T^s nearly kills g(gamma) relative to both poles."""
        image = g.on_class(self._require_marker())
        plus = pairing(self.poles[pair, 1], image)
        minus = pairing(self.poles[pair, -1], image)
        total = plus + minus
        if total <= 0:
            raise DegeneracyError(f"Marker image {image} is elliptic in both poles")
        inside = self.settings.eps - self.settings.mu
        minus, plus = minus / total, plus / total
        return Membership(minus < inside, plus < inside, minus, plus)

    def system(self) -> AnnulusSystem:
        if self._system is not None:
            return self._system
        jobs = [(i, g) for g in self.ball for i in range(len(self.pairs))]
        jobs += [(i, power) for (i, _), power in sorted(self.powers.items())]

        def annulus(job: tuple[int, FreeGroupAut]) -> Annulus:
            i, g = job
            sides = [self.membership(p.id, i, g) for p in self.points]
            return Annulus(
                frozenset(k for k, m in enumerate(sides) if m.in_minus),
                frozenset(k for k, m in enumerate(sides) if m.in_plus),
                f"A{i}.{g.name}",
            )

        candidates = parallel_map(annulus, jobs, self.settings.workers)
        self._system = AnnulusSystem.from_candidates(tuple(self.points), candidates)
        return self._system

    def table(self, mode: str = "separating") -> CrossratioTable:
        return build_table(self.system(), mode)
