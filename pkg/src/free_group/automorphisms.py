"""Automorphisms of F_n given by basis images, and their outer classes."""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cache, cached_property

from ..utils.errors import InputError
from .words import (
    Basis,
    ConjClass,
    Word,
    class_from_letters,
    free_reduce,
    inverse_letters,
    parse_reduced,
    reduce,
    short_classes,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FreeGroupAut:
    """Endomorphism of F_n determined by the images of the positive basis letters."""

    basis: Basis
    images: tuple[Word, ...]
    inverse_images: tuple[Word, ...] | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.images) != self.basis.rank:
            raise InputError(
                f"{self.name or 'automorphism'}: expected {self.basis.rank} images, "
                f"got {len(self.images)}"
            )
        if any(len(w) == 0 for w in self.images):
            raise InputError(f"{self.name or 'automorphism'}: a basis letter maps to the identity")
        if self.inverse_images is not None and len(self.inverse_images) != self.basis.rank:
            raise InputError(f"{self.name or 'automorphism'}: inverse_images has the wrong length")

    @classmethod
    def from_strings(
        cls,
        basis: Basis,
        images: Sequence[str],
        inverse_images: Sequence[str] | None = None,
        name: str = "",
    ) -> "FreeGroupAut":
        """Build from ``"ab"``-style image strings; images must already be reduced."""
        parsed = tuple(parse_reduced(basis, text) for text in images)
        parsed_inverse = (
            tuple(parse_reduced(basis, text) for text in inverse_images)
            if inverse_images is not None
            else None
        )
        return cls(basis, parsed, parsed_inverse, name)

    @cached_property
    def _table(self) -> dict[int, tuple[int, ...]]:
        table = {}
        for i, image in enumerate(self.images, start=1):
            table[i] = image.letters
            table[-i] = inverse_letters(image.letters)
        return table

    def image_of(self, letter: int) -> tuple[int, ...]:
        return self._table[letter]

    def substitute(self, letters: Iterable[int]) -> list[int]:
        """Letter-by-letter substitution without any cancellation."""
        table = self._table
        return [y for x in letters for y in table[x]]

    def __call__(self, w: Word) -> Word:
        return apply_aut(self, w)

    def on_class(self, alpha: ConjClass) -> ConjClass:
        return class_from_letters(self.basis, free_reduce(self.substitute(alpha.cyclic)))

    @property
    def has_inverse(self) -> bool:
        return self.inverse_images is not None

    def inverse(self) -> "FreeGroupAut":
        if self.inverse_images is None:
            raise InputError(f"{self.name or 'automorphism'} has no inverse_images")
        return FreeGroupAut(self.basis, self.inverse_images, self.images, _inverse_name(self.name))

    def renamed(self, name: str) -> "FreeGroupAut":
        return FreeGroupAut(self.basis, self.images, self.inverse_images, name)

    def describe(self) -> dict[str, list[str]]:
        payload = {"images": [str(w) for w in self.images]}
        if self.inverse_images is not None:
            payload["inverse_images"] = [str(w) for w in self.inverse_images]
        return payload

    def __str__(self) -> str:
        images = ", ".join(
            f"{self.basis.symbol(i)}->{w}" for i, w in enumerate(self.images, start=1)
        )
        return f"{self.name or 'aut'}({images})"


def _inverse_name(name: str) -> str:
    if not name:
        return ""
    return name[:-3] if name.endswith("^-1") else f"{name}^-1"


def apply_aut(f: FreeGroupAut, w: Word) -> Word:
    """Image of ``w`` under ``f``, freely reduced."""
    if w.basis != f.basis:
        raise InputError("Word and automorphism live over different bases")
    return Word(f.basis, tuple(free_reduce(f.substitute(w.letters))))


def identity_aut(basis: Basis) -> FreeGroupAut:
    letters = tuple(Word(basis, (i,)) for i in range(1, basis.rank + 1))
    return FreeGroupAut(basis, letters, letters, "id")


def compose(f: FreeGroupAut, g: FreeGroupAut) -> FreeGroupAut:
    """The automorphism x -> f(g(x))."""
    if f.basis != g.basis:
        raise InputError("Cannot compose automorphisms over different bases")
    images = tuple(apply_aut(f, w) for w in g.images)
    inverse_images = None
    if f.inverse_images is not None and g.inverse_images is not None:
        g_inv = g.inverse()
        inverse_images = tuple(apply_aut(g_inv, w) for w in f.inverse_images)
    name = "*".join(n for n in (f.name, g.name) if n and n != "id") or "id"
    return FreeGroupAut(f.basis, images, inverse_images, name)


def compose_all(basis: Basis, factors: Sequence[FreeGroupAut]) -> FreeGroupAut:
    result = identity_aut(basis)
    for factor in factors:
        result = compose(result, factor)
    return result


def is_inner(f: FreeGroupAut) -> tuple[bool, Word | None]:
    """Decide whether f is conjugation by some w, returning the witness.

    f(x_1) must read v x_1 v^-1 as a reduced word; any conjugator is then
    v x_1^k, and |k| never needs to exceed the longest basis image.
    """
    first = f.images[0].letters
    if len(first) % 2 == 0:
        return False, None
    middle = len(first) // 2
    if first[middle] != 1 or first[middle + 1 :] != inverse_letters(first[:middle]):
        return False, None

    prefix = first[:middle]
    bound = max(len(w) for w in f.images)
    for k in _signed_range(bound):
        power = (1,) * k if k >= 0 else (-1,) * (-k)
        w = tuple(free_reduce(prefix + power))
        w_inv = inverse_letters(w)
        if all(
            tuple(free_reduce(w + (i,) + w_inv)) == image.letters
            for i, image in enumerate(f.images, start=1)
        ):
            return True, Word(f.basis, w)
    return False, None


def _signed_range(bound: int) -> list[int]:
    order = [0]
    for k in range(1, bound + 1):
        order.extend((k, -k))
    return order


def conjugation(w: Word) -> FreeGroupAut:
    """Inner automorphism x -> w x w^-1."""
    basis = w.basis
    w_inv = inverse_letters(w.letters)
    images = tuple(reduce(basis, w.letters + (i,) + w_inv) for i in range(1, basis.rank + 1))
    inverse = tuple(reduce(basis, w_inv + (i,) + w.letters) for i in range(1, basis.rank + 1))
    return FreeGroupAut(basis, images, inverse, f"conj({w})")


def certify_inverse(f: FreeGroupAut) -> None:
    """Check that inverse_images really invert f up to conjugation."""
    inverse = f.inverse()
    for product in (compose(f, inverse), compose(inverse, f)):
        inner, _ = is_inner(product)
        if not inner:
            raise InputError(f"{f.name or 'automorphism'}: inverse_images do not invert the map")


@cache
def fingerprint_domain(basis: Basis) -> tuple[ConjClass, ...]:
    return tuple(short_classes(basis, 2))


@dataclass(frozen=True)
class OuterFingerprint:
    """Images of every class of length at most 2; equal iff outer classes agree."""

    entries: tuple[tuple[ConjClass, ConjClass], ...]

    @property
    def key(self) -> tuple[tuple[int, ...], ...]:
        return tuple(image.cyclic for _, image in self.entries)

    def as_dict(self) -> dict[str, str]:
        return {str(source): str(image) for source, image in self.entries}


def fingerprint(f: FreeGroupAut) -> OuterFingerprint:
    return OuterFingerprint(tuple((c, f.on_class(c)) for c in fingerprint_domain(f.basis)))


def nielsen_generators(basis: Basis) -> list[FreeGroupAut]:
    """Nielsen generators of Aut(F_n), each followed by its inverse when distinct."""
    n = basis.rank

    def aut(images: list[tuple[int, ...]], inverse: list[tuple[int, ...]], name: str):
        return FreeGroupAut(
            basis,
            tuple(reduce(basis, w) for w in images),
            tuple(reduce(basis, w) for w in inverse),
            name,
        )

    unit = [(i,) for i in range(1, n + 1)]
    swap = [(2,), (1,)] + unit[2:]
    gens = [aut(swap, swap, "swap")]
    if n > 2:
        shift = [(i % n + 1,) for i in range(1, n + 1)]
        unshift = [((i - 2) % n + 1,) for i in range(1, n + 1)]
        gens += [aut(shift, unshift, "cycle"), aut(unshift, shift, "cycle^-1")]
    invert = [(-1,)] + unit[1:]
    gens.append(aut(invert, invert, "invert"))
    transvect = [(1, 2)] + unit[1:]
    untransvect = [(1, -2)] + unit[1:]
    gens += [aut(transvect, untransvect, "transvect"), aut(untransvect, transvect, "transvect^-1")]
    return gens


def enumerate_ball(gens: Sequence[FreeGroupAut], radius: int) -> list[FreeGroupAut]:
    """Breadth-first ball in Out(F_n), one representative per outer class."""
    if not gens:
        raise InputError("enumerate_ball needs at least one generator")
    for g in gens:
        if g.inverse_images is None:
            raise InputError(f"Generator {g.name or g} has no inverse_images")
    basis = gens[0].basis

    identity = identity_aut(basis)
    seen = {fingerprint(identity).key}
    ball = [identity]
    frontier = [identity]
    for step in range(radius):
        next_frontier = []
        for element in frontier:
            for g in gens:
                product = compose(element, g)
                key = fingerprint(product).key
                if key in seen:
                    continue
                seen.add(key)
                ball.append(product)
                next_frontier.append(product)
        frontier = next_frontier
        logger.debug(f"Ball radius {step + 1}: {len(ball)} outer classes")
    logger.info(f"Enumerated {len(ball)} outer classes within radius {radius}")
    return ball
