"""Words and conjugacy classes in a free group of finite rank.

Letters are signed integers: ``k`` is the k-th basis generator and ``-k`` its
inverse. The printable form uses ``a..z`` for generators and ``A..Z`` for
inverses, so ``"aB"`` is ``a b^-1``.
"""

import itertools
import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..utils.errors import InputError

logger = logging.getLogger(__name__)

ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def sort_key(letter: int) -> int:
    """Position of a letter in the fixed symbol order a < A < b < B < ..."""
    return 2 * (abs(letter) - 1) + (1 if letter < 0 else 0)


@dataclass(frozen=True)
class Basis:
    """Free basis x_1..x_n together with its inverses."""

    rank: int

    def __post_init__(self):
        if not 2 <= self.rank <= len(ALPHABET):
            raise InputError(f"Rank must be between 2 and {len(ALPHABET)}, got {self.rank}")

    @cached_property
    def letters(self) -> tuple[int, ...]:
        """Signed letters in symbol order: x_1, x_1^-1, ..., x_n, x_n^-1."""
        return tuple(s * i for i in range(1, self.rank + 1) for s in (1, -1))

    def symbol(self, letter: int) -> str:
        char = ALPHABET[abs(letter) - 1]
        return char if letter > 0 else char.upper()

    def letter(self, symbol: str) -> int:
        index = ALPHABET.find(symbol.lower())
        if index < 0 or index >= self.rank:
            raise InputError(f"Unknown symbol {symbol!r} for rank {self.rank}")
        return index + 1 if symbol.islower() else -(index + 1)

    def check(self, letters: Iterable[int]) -> None:
        for x in letters:
            if x == 0 or abs(x) > self.rank:
                raise InputError(f"Letter {x} is outside the basis of rank {self.rank}")

    def render(self, letters: Iterable[int]) -> str:
        return "".join(self.symbol(x) for x in letters)


def free_reduce(letters: Iterable[int]) -> list[int]:
    """Cancel adjacent inverse pairs with a single stack pass."""
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return stack


def is_reduced(letters: Sequence[int]) -> bool:
    if len(letters) < 2:
        return True
    arr = np.asarray(letters, dtype=np.int64)
    return not bool(np.any(arr[1:] == -arr[:-1]))


def inverse_letters(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(letters))


def cyclic_core(letters: Sequence[int]) -> list[int]:
    """Freely and cyclically reduce without choosing a rotation."""
    reduced = free_reduce(letters)
    start, end = 0, len(reduced)
    while end - start >= 2 and reduced[start] == -reduced[end - 1]:
        start += 1
        end -= 1
    return reduced[start:end]


def least_rotation(letters: Sequence[int]) -> int:
    """Offset of the lexicographically least rotation (Booth's algorithm)."""
    keys = [sort_key(x) for x in letters]
    doubled = keys + keys
    failure = [-1] * len(doubled)
    k = 0
    for j in range(1, len(doubled)):
        sj = doubled[j]
        i = failure[j - k - 1]
        while i != -1 and sj != doubled[k + i + 1]:
            if sj < doubled[k + i + 1]:
                k = j - i - 1
            i = failure[i]
        if sj != doubled[k + i + 1]:
            if sj < doubled[k]:
                k = j
            failure[j - k] = -1
        else:
            failure[j - k] = i + 1
    return k


@dataclass(frozen=True)
class Word:
    """A freely reduced word over a basis."""

    basis: Basis
    letters: tuple[int, ...]

    def __post_init__(self):
        self.basis.check(self.letters)
        if not is_reduced(self.letters):
            raise InputError(f"Word {self.basis.render(self.letters)} is not freely reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return self.basis.render(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return reduce(self.basis, self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(self.basis, inverse_letters(self.letters))

    def power(self, k: int) -> "Word":
        base = self.letters if k >= 0 else inverse_letters(self.letters)
        return reduce(self.basis, base * abs(k))


@dataclass(frozen=True)
class ConjClass:
    """A conjugacy class stored as its canonical cyclic word."""

    basis: Basis
    cyclic: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.cyclic)

    def __str__(self) -> str:
        return self.basis.render(self.cyclic)

    @property
    def canonical(self) -> bool:
        if not self.cyclic:
            return True
        return class_from_letters(self.basis, self.cyclic).cyclic == self.cyclic

    def word(self) -> Word:
        return Word(self.basis, self.cyclic)

    def inverse(self) -> "ConjClass":
        return cyclic_reduce(self.word().inverse())

    def power(self, k: int) -> "ConjClass":
        return cyclic_reduce(self.word().power(k))


def reduce(basis: Basis, letters: Iterable[int]) -> Word:
    """Freely reduce a raw letter sequence."""
    raw = list(letters)
    basis.check(raw)
    return Word(basis, tuple(free_reduce(raw)))


def parse_word(basis: Basis, text: str) -> Word:
    """Parse ``"abAB"``-style text, ignoring whitespace, and reduce it."""
    letters = []
    for position, char in enumerate(text):
        if char.isspace():
            continue
        try:
            letters.append(basis.letter(char))
        except InputError as e:
            raise InputError(f"{e} at position {position} in {text!r}") from e
    return reduce(basis, letters)


def parse_reduced(basis: Basis, text: str) -> Word:
    """Parse text that must already be freely reduced."""
    letters = tuple(basis.letter(c) for c in text if not c.isspace())
    return Word(basis, letters)


def class_from_letters(basis: Basis, letters: Sequence[int]) -> ConjClass:
    core = cyclic_core(letters)
    if not core:
        return ConjClass(basis, ())
    offset = least_rotation(core)
    return ConjClass(basis, tuple(core[offset:] + core[:offset]))


def cyclic_reduce(w: Word) -> ConjClass:
    """Conjugacy class of ``w`` in canonical rotation; trivial words give the empty class."""
    return class_from_letters(w.basis, w.letters)


def parse_class(basis: Basis, text: str) -> ConjClass:
    return cyclic_reduce(parse_word(basis, text))


def _reduced_words(basis: Basis, length: int) -> Iterator[tuple[int, ...]]:
    if length == 0:
        yield ()
        return
    for word in _reduced_words(basis, length - 1):
        for x in basis.letters:
            if word and word[-1] == -x:
                continue
            yield (*word, x)


def enumerate_classes(basis: Basis, length: int) -> list[ConjClass]:
    """All nontrivial canonical classes of exactly the given length, in symbol order."""
    classes = []
    for word in _reduced_words(basis, length):
        if length > 1 and word[0] == -word[-1]:
            continue
        offset = least_rotation(word)
        if word[offset:] + word[:offset] != word:
            continue
        classes.append(ConjClass(basis, word))
    classes.sort(key=lambda c: [sort_key(x) for x in c.cyclic])
    return classes


def short_classes(basis: Basis, max_length: int = 2) -> list[ConjClass]:
    """All nontrivial classes of length at most ``max_length``."""
    return list(
        itertools.chain.from_iterable(
            enumerate_classes(basis, n) for n in range(1, max_length + 1)
        )
    )
