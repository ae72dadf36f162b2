"""Current approximants: cyclic subword frequencies of iterated classes.

A current is never stored abstractly. It carries the recipe that produced it
(generator h, base class, depth k, growth, pushforward g) and the frequency
vector of gamma_k = g([h^k(base)]). Group actions and pairings re-run the
recipe on classes.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..free_group.automorphisms import FreeGroupAut, compose, identity_aut
from ..free_group.words import Basis, ConjClass
from ..utils.errors import ConvergenceError, InputError
from .trees import LengthFunctionApprox, PairingEstimate, TrainTrackPair, pairing

logger = logging.getLogger(__name__)

Frequencies = dict[tuple[int, ...], float]


def subword_frequencies(letters: tuple[int, ...], L: int, basis: Basis) -> Frequencies:
    """Frequencies of the length-L windows of a cyclic word, wraparound included."""
    if L < 1:
        raise InputError(f"Subword length must be positive, got {L}")
    n = len(letters)
    if n == 0:
        raise InputError("Frequencies of the trivial class are undefined")
    arr = np.asarray(letters, dtype=np.int64)
    extended = np.resize(arr, n + L - 1)
    radix = 2 * basis.rank + 1
    codes = np.zeros(n, dtype=np.int64)
    for i in range(L):
        codes = codes * radix + (extended[i : i + n] + basis.rank)
    values, counts = np.unique(codes, return_counts=True)

    freqs: Frequencies = {}
    for code, count in zip(values.tolist(), counts.tolist(), strict=True):
        digits = []
        for _ in range(L):
            code, digit = divmod(code, radix)
            digits.append(digit - basis.rank)
        freqs[tuple(reversed(digits))] = count / n
    return freqs


@dataclass(frozen=True)
class CurrentRecipe:
    """gamma_k = push([generator^k(base)]), scaled by growth^k."""

    generator: FreeGroupAut
    base: ConjClass
    k: int
    growth: float
    push: FreeGroupAut
    tag: str = ""

    def at_depth(self, k: int) -> "CurrentRecipe":
        return CurrentRecipe(self.generator, self.base, k, self.growth, self.push, self.tag)


@lru_cache(maxsize=64)
def _iterate_class(h: FreeGroupAut, base: ConjClass, k: int) -> ConjClass:
    if k == 0:
        return base
    return h.on_class(_iterate_class(h, base, k - 1))


def recipe_class(recipe: CurrentRecipe, k: int | None = None) -> ConjClass:
    depth = recipe.k if k is None else k
    return recipe.push.on_class(_iterate_class(recipe.generator, recipe.base, depth))


@dataclass(frozen=True)
class CurrentApprox:
    """Subword frequencies of length L for a current recipe."""

    L: int
    freqs: tuple[tuple[tuple[int, ...], float], ...]
    recipe: CurrentRecipe
    length: int

    @property
    def basis(self) -> Basis:
        return self.recipe.base.basis

    def as_dict(self) -> Frequencies:
        return dict(self.freqs)

    def frequency(self, word: str | tuple[int, ...]) -> float:
        if isinstance(word, str):
            word = tuple(self.basis.letter(c) for c in word)
        return self.as_dict().get(word, 0.0)

    def marginal(self) -> Frequencies:
        """Sum out the last letter: frequencies of length L - 1."""
        if self.L < 2:
            raise InputError("Marginal of a length-1 current is undefined")
        out: Frequencies = {}
        for word, value in self.freqs:
            out[word[:-1]] = out.get(word[:-1], 0.0) + value
        return out

    def distance(self, other: "CurrentApprox") -> float:
        if self.L != other.L:
            raise InputError("Currents sampled with different subword lengths")
        mine, theirs = self.as_dict(), other.as_dict()
        return max(abs(mine.get(w, 0.0) - theirs.get(w, 0.0)) for w in mine.keys() | theirs.keys())

    def labelled(self) -> dict[str, float]:
        return {self.basis.render(w): v for w, v in self.freqs}


def _approx(recipe: CurrentRecipe, L: int) -> CurrentApprox:
    gamma = recipe_class(recipe)
    freqs = subword_frequencies(gamma.cyclic, L, gamma.basis)
    label = recipe.tag or recipe.generator.name
    logger.debug(f"Current {label}: |gamma_{recipe.k}| = {len(gamma)}")
    return CurrentApprox(L, tuple(sorted(freqs.items())), recipe, len(gamma))


def current_from_aut(
    h: FreeGroupAut,
    base: ConjClass,
    L: int,
    k: int,
    growth: float | None = None,
) -> CurrentApprox:
    """Current generated by iterating any automorphism on a base class.

    Without an explicit growth the last length quotient |gamma_k| / |gamma_k-1| is used.
    """
    if len(base) == 0:
        raise InputError("Base class of a current must be nontrivial")
    if growth is None:
        if k < 1:
            raise InputError("Growth estimate needs k >= 1")
        growth = len(_iterate_class(h, base, k)) / len(_iterate_class(h, base, k - 1))
    recipe = CurrentRecipe(h, base, k, growth, identity_aut(base.basis), h.name)
    return _approx(recipe, L)


def _dominant_edge(pair: TrainTrackPair, sign: int) -> ConjClass:
    m = pair.map(sign)
    edge = int(np.argmax(m.lengths)) + 1
    return ConjClass(m.basis, (edge,))


def stable_current(pair: TrainTrackPair, sign: int, L: int, k: int) -> CurrentApprox:
    """Upsilon_f^sign approximated by the iterated PF-dominant edge."""
    m = pair.map(sign)
    shortest = int(np.linalg.matrix_power(m.matrix, k).sum(axis=0).min()) if k > 0 else 1
    if shortest < 10 * L:
        raise InputError(
            f"k = {k} too small: shortest iterated edge has {shortest} < {10 * L} letters"
        )
    tag = f"Upsilon[{pair.name}]{'+' if sign > 0 else '-'}"
    recipe = CurrentRecipe(
        m.represents, _dominant_edge(pair, sign), k, m.lam, identity_aut(m.basis), tag
    )
    return _approx(recipe, L)


def push_current(g: FreeGroupAut, c: CurrentApprox) -> CurrentApprox:
    """g(eta), computed on the generating class: g(eta_gamma) = eta_g(gamma)."""
    r = c.recipe
    recipe = CurrentRecipe(r.generator, r.base, r.k, r.growth, compose(g, r.push), r.tag)
    return _approx(recipe, c.L)


def dual_current(pair: TrainTrackPair, sign: int, L: int, k: int) -> CurrentApprox:
    """T* for T = T_f^sign: the current of the opposite pole."""
    return stable_current(pair, -sign, L, k)


def dual_of_translate(
    pair: TrainTrackPair, sign: int, g: FreeGroupAut, L: int, k: int
) -> CurrentApprox:
    """(T.g)* = g^-1(T*)."""
    return push_current(g.inverse(), dual_current(pair, sign, L, k))


def pairing_current(
    T: LengthFunctionApprox,
    c: CurrentApprox,
    start: int = 1,
    divergence_tol: float = 1e-6,
) -> PairingEstimate:
    """Estimates <T, gamma_j> / growth^j for j = start..k along the recipe of ``c``."""
    r = c.recipe
    if not 0 <= start <= r.k:
        raise InputError(f"start must lie in [0, {r.k}], got {start}")
    history = []
    for j in range(start, r.k + 1):
        value = pairing(T, recipe_class(r, j)) / r.growth**j
        if not math.isfinite(value):
            raise ConvergenceError(f"Pairing estimate at depth {j} is not finite", history)
        history.append(value)

    error = abs(history[-1] - history[-2]) if len(history) >= 2 else 0.0
    first = abs(history[1] - history[0]) if len(history) >= 2 else 0.0
    if error > divergence_tol and error > first:
        raise ConvergenceError("Pairing estimates do not settle along the recipe", history)
    return PairingEstimate(history[-1], r.k, error, tuple(history))
