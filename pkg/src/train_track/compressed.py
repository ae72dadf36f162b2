"""Iterating a train track map on a loop too long to store letter by letter.

The loop is kept as a cyclic sequence of legal pieces separated by illegal
turns. Under the map a legal piece stays legal, so cancellation only happens
at the junctions. A long piece keeps its first and last ``window`` letters
plus a count of each edge; the count vector of rho(piece) is M @ counts.
"""

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..free_group.words import ConjClass, class_from_letters
from ..utils.errors import ConvergenceError, InputError
from .maps import TrainTrackMap, legal_segments

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 512


@dataclass
class _Piece:
    """A legal path. ``tail is None`` means ``head`` holds every letter."""

    head: deque[int]
    tail: deque[int] | None
    counts: np.ndarray

    @property
    def compressed(self) -> bool:
        return self.tail is not None

    @property
    def length(self) -> float:
        return float(self.counts.sum())

    def __bool__(self) -> bool:
        return self.length > 0

    def _edge(self, side: deque[int], which: str) -> deque[int]:
        if not side:
            raise ConvergenceError(
                f"Cancellation exhausted the {which} window of a compressed piece; "
                "increase the window"
            )
        return side

    def first(self) -> int:
        return self._edge(self.head, "head")[0]

    def last(self) -> int:
        side = self.tail if self.tail is not None else self.head
        return self._edge(side, "tail")[-1]

    def pop_first(self) -> None:
        x = self._edge(self.head, "head").popleft()
        self.counts[abs(x) - 1] -= 1

    def pop_last(self) -> None:
        side = self.tail if self.tail is not None else self.head
        x = self._edge(side, "tail").pop()
        self.counts[abs(x) - 1] -= 1


def _counts(letters, rank: int) -> np.ndarray:
    arr = np.abs(np.fromiter(letters, dtype=np.int64))
    return np.bincount(arr, minlength=rank + 1)[1:].astype(float)


class CompressedLoop:
    """Tightened iterates [rho^k(alpha)] tracked through their legal pieces."""

    def __init__(self, m: TrainTrackMap, alpha: ConjClass, window: int = DEFAULT_WINDOW):
        if len(alpha) == 0:
            raise InputError("Cannot iterate the trivial class")
        if window < 2:
            raise InputError(f"window must be at least 2, got {window}")
        self.map = m
        self.window = window
        self.cap = 4 * window
        self.steps = 0
        self.closed = False
        self._matrix = m.matrix.astype(float)
        self._pieces = [self._make(list(piece)) for piece, _ in legal_segments(m, alpha)]
        self._normalize()

    def _make(self, letters: list[int]) -> _Piece:
        counts = _counts(letters, self.map.basis.rank)
        if len(letters) > self.cap:
            w = self.window
            return _Piece(deque(letters[:w]), deque(letters[-w:]), counts)
        return _Piece(deque(letters), None, counts)

    def _image(self, piece: _Piece) -> _Piece:
        f = self.map.represents
        if not piece.compressed:
            return self._make(f.substitute(piece.head))
        w = self.window
        head = f.substitute(piece.head)[:w]
        tail = f.substitute(piece.tail)[-w:]
        return _Piece(deque(head), deque(tail), self._matrix @ piece.counts)

    def _merge(self, left: _Piece, right: _Piece) -> _Piece:
        if not left.compressed and not right.compressed:
            return self._make(list(left.head) + list(right.head))
        w = self.window
        head = left.head if left.compressed else deque((list(left.head) + list(right.head))[:w])
        if right.compressed:
            tail = right.tail
        else:
            tail = deque((list(left.tail) + list(right.head))[-w:])
        return _Piece(head, tail, left.counts + right.counts)

    def _legal_junction(self, left: _Piece, right: _Piece) -> bool:
        return self.map.structure.is_legal(-left.last(), right.first())

    @staticmethod
    def _cancel(left: _Piece, right: _Piece) -> None:
        while left and right and left.last() == -right.first():
            left.pop_last()
            right.pop_first()

    def _normalize(self) -> None:
        """Cancel at every junction, then merge pieces across legal turns."""
        stack: list[_Piece] = []
        for piece in self._pieces:
            while stack and piece:
                self._cancel(stack[-1], piece)
                if not stack[-1]:
                    stack.pop()
                    continue
                break
            if piece:
                stack.append(piece)

        while len(stack) >= 2:
            self._cancel(stack[-1], stack[0])
            if not stack[-1]:
                stack.pop()
            elif not stack[0]:
                stack.pop(0)
            else:
                break
        if len(stack) == 1:
            piece = stack[0]
            while piece.length >= 2 and piece.last() == -piece.first():
                piece.pop_last()
                piece.pop_first()
        if not stack:
            raise InputError("Loop tightened to the trivial class")

        merged = [stack[0]]
        for piece in stack[1:]:
            if self._legal_junction(merged[-1], piece):
                merged[-1] = self._merge(merged[-1], piece)
            else:
                merged.append(piece)
        if len(merged) >= 2 and self._legal_junction(merged[-1], merged[0]):
            merged[0] = self._merge(merged.pop(), merged[0])
        if len(merged) == 1 and self._legal_junction(merged[0], merged[0]):
            self.closed = True

        for piece in merged:
            if piece.compressed and piece.length < len(piece.head) + len(piece.tail):
                raise ConvergenceError("Compressed windows overlap; increase the window")
        self._pieces = merged

    def step(self) -> None:
        self._pieces = [self._image(p) for p in self._pieces]
        self.steps += 1
        if not self.closed:
            self._normalize()

    def advance(self, n: int) -> "CompressedLoop":
        for _ in range(n):
            self.step()
        return self

    @property
    def pieces(self) -> int:
        return len(self._pieces)

    @property
    def compressed(self) -> bool:
        return any(p.compressed for p in self._pieces)

    @property
    def letter_count(self) -> float:
        return sum(p.length for p in self._pieces)

    @property
    def metric_length(self) -> float:
        lengths = self.map.lengths
        return float(sum(p.counts @ lengths for p in self._pieces))

    def exact_class(self) -> ConjClass | None:
        """The tightened class, or None once any piece is compressed."""
        if self.compressed:
            return None
        letters = [x for p in self._pieces for x in p.head]
        return class_from_letters(self.map.basis, letters)
