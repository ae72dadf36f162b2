"""
Test suite for words and conjugacy classes
"""

import unittest

from hypothesis import given
from hypothesis import strategies as st

from src.free_group.words import (
    Basis,
    ConjClass,
    Word,
    class_from_letters,
    cyclic_core,
    enumerate_classes,
    free_reduce,
    inverse_letters,
    is_reduced,
    parse_class,
    parse_word,
    short_classes,
)
from src.utils.errors import InputError

B2 = Basis(2)
letters_f2 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=16)


class TestBasis(unittest.TestCase):
    """Test the basis and its symbols."""

    def test_symbol_order(self):
        """Test that letters come out as a, A, b, B."""
        self.assertEqual(B2.render(B2.letters), "aAbB")

    def test_rank_bounds(self):
        """Test that rank 1 and rank 27 are rejected."""
        for rank in (1, 27):
            with self.assertRaises(InputError):
                Basis(rank)

    def test_unknown_symbol(self):
        """Test that symbols beyond the rank are input errors."""
        with self.assertRaises(InputError):
            parse_word(B2, "abX#")
        with self.assertRaises(InputError):
            parse_word(B2, "abc")


class TestWord(unittest.TestCase):
    """Test reduced words."""

    def test_parse_reduces(self):
        """Test that parsing cancels adjacent inverses."""
        self.assertEqual(str(parse_word(B2, "aAb")), "b")
        self.assertEqual(len(parse_word(B2, "abBA")), 0)

    def test_unreduced_word_rejected(self):
        """Test that a Word must be freely reduced."""
        with self.assertRaises(InputError):
            Word(B2, (1, -1))

    def test_multiplication_and_inverse(self):
        """Test that w * w^-1 is trivial."""
        w = parse_word(B2, "abA")
        self.assertEqual(len(w * w.inverse()), 0)
        self.assertEqual(str(w.power(2)), "abbA")
        self.assertEqual(str(w.power(-1)), "aBA")

    @given(letters_f2)
    def test_free_reduce_idempotent(self, letters):
        """Test that free reduction is idempotent and yields reduced words."""
        once = free_reduce(letters)
        self.assertTrue(is_reduced(once))
        self.assertEqual(free_reduce(once), once)

    @given(letters_f2)
    def test_inverse_of_inverse(self, letters):
        """Test that inverting twice gives the word back."""
        w = Word(B2, tuple(free_reduce(letters)))
        self.assertEqual(w.inverse().inverse(), w)


class TestConjClass(unittest.TestCase):
    """Test conjugacy classes and their canonical rotation."""

    def test_canonical_rotation(self):
        """Test that the least rotation in a < A < b < B order is chosen."""
        self.assertEqual(str(parse_class(B2, "baBA")), "aBAb")
        self.assertEqual(str(parse_class(B2, "ba")), "ab")
        self.assertEqual(str(parse_class(B2, "Bab")), "a")

    def test_trivial_class(self):
        """Test that a conjugate of the identity gives the empty class."""
        self.assertEqual(len(parse_class(B2, "abAB" + "baBA")), 0)

    def test_inverse_class(self):
        """Test the inverse of the commutator class."""
        self.assertEqual(str(parse_class(B2, "abAB").inverse()), "aBAb")

    @given(letters_f2, letters_f2)
    def test_conjugation_invariance(self, word, conjugator):
        """Test that u w u^-1 and w give the same class."""
        conjugated = list(conjugator) + list(word) + list(inverse_letters(conjugator))
        self.assertEqual(class_from_letters(B2, conjugated), class_from_letters(B2, word))

    @given(letters_f2)
    def test_rotation_invariance(self, word):
        """Test that every rotation of the cyclic core gives the same class."""
        core = cyclic_core(word)
        expected = class_from_letters(B2, core)
        for i in range(len(core)):
            self.assertEqual(class_from_letters(B2, core[i:] + core[:i]), expected)
        self.assertTrue(expected.canonical)

    def test_enumeration_counts(self):
        """Test the number of classes of length 1 and 2 in rank 2."""
        self.assertEqual(len(enumerate_classes(B2, 1)), 4)
        self.assertEqual(len(enumerate_classes(B2, 2)), 8)
        self.assertEqual(len(short_classes(B2, 2)), 12)

    def test_enumeration_is_canonical(self):
        """Test that enumerated classes are canonical and distinct."""
        classes = enumerate_classes(B2, 4)
        self.assertEqual(len(set(classes)), len(classes))
        self.assertTrue(all(isinstance(c, ConjClass) and c.canonical for c in classes))
        self.assertIn(parse_class(B2, "abAB"), classes)


if __name__ == "__main__":
    unittest.main()
