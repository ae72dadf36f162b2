"""
Test suite for stable trees, currents and the experiments on them
"""

import math
import unittest

from src.free_group.automorphisms import FreeGroupAut, identity_aut
from src.free_group.words import Basis, parse_class
from src.limits.currents import (
    current_from_aut,
    dual_current,
    dual_of_translate,
    pairing_current,
    push_current,
    stable_current,
    subword_frequencies,
)
from src.limits.experiments import scaling_diagnostic, t2_experiment
from src.limits.trees import (
    TestSet,
    TrainTrackPair,
    TreeSource,
    default_test_set,
    growth_scale,
    length_function,
    pairing,
    stable_tree_length,
)
from src.utils.errors import InputError

PHI = (1 + math.sqrt(5)) / 2
B2 = Basis(2)


def fibonacci_pair() -> TrainTrackPair:
    f = FreeGroupAut.from_strings(B2, ["ab", "a"], ["b", "Ba"], "fib")
    return TrainTrackPair.from_aut(f, geometric=True, fixed_class=parse_class(B2, "abAB"))


def swapped_pair() -> TrainTrackPair:
    f = FreeGroupAut.from_strings(B2, ["b", "ba"], ["Ab", "a"], "fib_swap")
    return TrainTrackPair.from_aut(f, geometric=True)


class TestTestSet(unittest.TestCase):
    """Test the classes length functions are sampled on."""

    def test_default_contents(self):
        """Test that short classes come first and primitive length-3 classes follow."""
        ts = default_test_set(B2)
        self.assertGreater(len(ts), 12)
        self.assertEqual(ts.labels()[:4], ["a", "A", "b", "B"])
        self.assertTrue(all(len(c) == 3 for c in ts.classes[12:]))

    def test_exclude_removes_class_and_inverse(self):
        """Test that an excluded class leaves the test set with its inverse."""
        ts = default_test_set(B2, exclude=parse_class(B2, "ab"))
        self.assertNotIn(parse_class(B2, "ab"), ts.classes)
        self.assertNotIn(parse_class(B2, "AB"), ts.classes)

    def test_invalid_sets(self):
        """Test empty, trivial and duplicate test sets."""
        a = parse_class(B2, "a")
        for classes in ((), (parse_class(B2, "aA"),), (a, a)):
            with self.assertRaises(InputError):
                TestSet(classes)


class TestStableLengths(unittest.TestCase):
    """Test stable lengths of classes in the limit trees."""

    def setUp(self):
        self.pair = fibonacci_pair()

    def test_pair_growth(self):
        """Test that both directions grow at the golden ratio."""
        self.assertAlmostEqual(self.pair.lam, PHI, places=9)
        self.assertAlmostEqual(self.pair.mu, PHI, places=9)

    def test_legal_class_converges_immediately(self):
        """Test that legal loops give their eigen-metric length."""
        estimate = stable_tree_length(self.pair.forward, parse_class(B2, "a"))
        self.assertAlmostEqual(estimate.value, 1 / PHI, places=9)
        self.assertEqual(estimate.k_used, 1)

    def test_fixed_class_is_elliptic(self):
        """Test that the fixed commutator has length zero in the stable tree."""
        estimate = stable_tree_length(self.pair.forward, parse_class(B2, "abAB"))
        self.assertLess(estimate.value, 1e-6)

    def test_trivial_class_rejected(self):
        """Test that the trivial class has no stable length."""
        with self.assertRaises(InputError):
            stable_tree_length(self.pair.forward, parse_class(B2, ""))

    def test_missing_backward_map(self):
        """Test that the unstable tree needs an inverse."""
        f = FreeGroupAut.from_strings(B2, ["ab", "a"])
        with self.assertRaises(InputError):
            TrainTrackPair.from_aut(f).map(-1)


class TestLengthFunctions(unittest.TestCase):
    """Test normalized length functions and pairings."""

    def setUp(self):
        self.pair = fibonacci_pair()
        self.ts = default_test_set(B2)
        self.plus = length_function(self.pair, 1, None, self.ts)
        self.minus = length_function(self.pair, -1, None, self.ts)

    def test_normalized(self):
        """Test that values sum to one."""
        self.assertAlmostEqual(sum(self.plus.values), 1.0, places=12)
        self.assertAlmostEqual(sum(self.minus.values), 1.0, places=12)

    def test_poles_differ(self):
        """Test that the stable and unstable trees are distinct points."""
        self.assertGreater(self.plus.distance(self.minus), 0.1)
        self.assertEqual(self.plus.distance(self.plus), 0.0)

    def test_pairing_matches_vector(self):
        """Test that pairing with a test class reads off the vector."""
        a = parse_class(B2, "a")
        self.assertAlmostEqual(pairing(self.plus, a), self.plus.as_dict()["a"], places=12)

    def test_translation_acts_on_classes(self):
        """Test that <T.g, alpha> = <T, g(alpha)>."""
        g = FreeGroupAut.from_strings(B2, ["ab", "b"], ["aB", "b"], "transvect")
        source = TreeSource(self.pair, 1, g)
        alpha = parse_class(B2, "aB")
        expected = stable_tree_length(self.pair.forward, g.on_class(alpha)).value
        self.assertAlmostEqual(source.length(alpha).value, expected, places=12)

    def test_translation_by_f_is_projectively_trivial(self):
        """Test that T.f is a rescaling of T for the stable tree of f."""
        f = self.pair.forward.represents
        moved = length_function(self.pair, 1, f, self.ts)
        self.assertLess(moved.distance(self.plus), 1e-6)
        self.assertAlmostEqual(moved.scale / self.plus.scale, PHI, places=6)

    def test_growth_scale(self):
        """Test that the unnormalized scale matches the length function."""
        scale = growth_scale(TreeSource.pole(self.pair, 1), self.ts)
        self.assertAlmostEqual(scale, self.plus.scale, places=9)


class TestCurrents(unittest.TestCase):
    """Test subword frequencies and current approximants."""

    def setUp(self):
        self.pair = fibonacci_pair()

    def test_subword_frequencies(self):
        """Test cyclic window counts on short words."""
        self.assertEqual(subword_frequencies((1, 2), 1, B2), {(1,): 0.5, (2,): 0.5})
        freqs = subword_frequencies((1, 1, 2), 2, B2)
        self.assertEqual(set(freqs), {(1, 1), (1, 2), (2, 1)})
        for value in freqs.values():
            self.assertAlmostEqual(value, 1 / 3)

    def test_subword_length_positive(self):
        """Test that L must be positive."""
        with self.assertRaises(InputError):
            subword_frequencies((1, 2), 0, B2)

    def test_letter_frequencies(self):
        """Test that letter frequencies approach the eigenvector."""
        current = stable_current(self.pair, 1, 1, 24)
        self.assertAlmostEqual(current.frequency("a"), 1 / PHI, delta=1e-6)
        self.assertAlmostEqual(current.frequency("b"), 1 / PHI**2, delta=1e-6)
        self.assertEqual(current.frequency("A"), 0.0)

    def test_marginal_consistency(self):
        """Test that summing out a letter gives the shorter frequencies."""
        coarse = stable_current(self.pair, 1, 1, 20).as_dict()
        fine = stable_current(self.pair, 1, 2, 20).marginal()
        self.assertEqual(set(fine), set(coarse))
        for word, value in fine.items():
            self.assertAlmostEqual(value, coarse[word], places=12)

    def test_depth_too_small(self):
        """Test that short iterates are refused."""
        with self.assertRaises(InputError):
            stable_current(self.pair, 1, 2, 2)

    def test_current_from_aut_matches(self):
        """Test that iterating the map on a gives the stable current."""
        f = self.pair.forward.represents
        current = current_from_aut(f, parse_class(B2, "a"), 1, 20)
        self.assertAlmostEqual(current.recipe.growth, PHI, places=6)
        self.assertAlmostEqual(
            current.distance(stable_current(self.pair, 1, 1, 20)), 0.0, places=12
        )

    def test_push_by_identity(self):
        """Test that pushing by the identity changes nothing."""
        current = stable_current(self.pair, 1, 2, 16)
        pushed = push_current(identity_aut(B2), current)
        self.assertEqual(pushed.as_dict(), current.as_dict())

    def test_dual_is_opposite_pole(self):
        """Test that the dual of T^+ is the unstable current."""
        dual = dual_current(self.pair, 1, 1, 16)
        self.assertEqual(dual.recipe.tag, "Upsilon[fib]-")

    def test_dual_of_untranslated_tree(self):
        """Test that translating by the identity leaves the dual current alone."""
        moved = dual_of_translate(self.pair, 1, identity_aut(B2), 1, 16)
        self.assertEqual(moved.as_dict(), dual_current(self.pair, 1, 1, 16).as_dict())


class TestPairing(unittest.TestCase):
    """Test pairings of trees with currents."""

    def setUp(self):
        self.pair = fibonacci_pair()
        self.plus = length_function(self.pair, 1, None, default_test_set(B2))

    def test_dual_pairing_decays(self):
        """Test that T^+ pairs to zero with the unstable current."""
        estimate = pairing_current(self.plus, stable_current(self.pair, -1, 1, 12), start=5)
        self.assertLess(estimate.value, 1e-3)
        self.assertLess(estimate.history[-1], estimate.history[0])

    def test_own_pairing_stays(self):
        """Test that T^+ keeps a positive pairing with its own current."""
        estimate = pairing_current(self.plus, stable_current(self.pair, 1, 1, 12), start=5)
        self.assertGreaterEqual(estimate.value, 0.1 * estimate.history[0])
        self.assertGreater(estimate.value, 0.0)

    def test_start_out_of_range(self):
        """Test that start beyond the depth is rejected."""
        with self.assertRaises(InputError):
            pairing_current(self.plus, stable_current(self.pair, 1, 1, 12), start=13)


class TestInvariants(unittest.TestCase):
    """Test equivariance and homogeneity of lengths, currents and pairings."""

    def setUp(self):
        self.pair = fibonacci_pair()
        self.ts = default_test_set(B2)
        self.plus = length_function(self.pair, 1, None, self.ts)
        self.g = FreeGroupAut.from_strings(B2, ["ab", "b"], ["aB", "b"], "transvect")

    def test_dual_of_translate_pairs_to_zero(self):
        """Test that T.g pairs with g^-1(T*) exactly as T pairs with T*."""
        moved = length_function(self.pair, 1, self.g, self.ts)
        dual = dual_of_translate(self.pair, 1, self.g, 1, 12)
        translated = pairing_current(moved, dual, start=5)
        untranslated = pairing_current(self.plus, dual_current(self.pair, 1, 1, 12), start=5)
        self.assertLess(translated.value, 1e-3)
        for a, b in zip(translated.history, untranslated.history, strict=True):
            self.assertAlmostEqual(a * moved.scale, b * self.plus.scale, delta=1e-9 * (1 + b))

    def test_stable_current_is_fixed(self):
        """Test that f pushes the stable current onto itself."""
        f = self.pair.forward.represents
        current = stable_current(self.pair, 1, 2, 20)
        self.assertLess(push_current(f, current).distance(current), 1e-6)
        other = push_current(self.g, current)
        self.assertGreater(other.distance(current), 1e-3)

    def test_pairing_homogeneous(self):
        """Test that rescaling a tree rescales every pairing."""
        a = parse_class(B2, "ab")
        self.assertAlmostEqual(pairing(self.plus.rescaled(3.0), a), 3 * pairing(self.plus, a))
        c = stable_current(self.pair, -1, 1, 12)
        doubled = pairing_current(self.plus.rescaled(2.0), c, start=5)
        self.assertAlmostEqual(doubled.value, 2 * pairing_current(self.plus, c, start=5).value)

    def test_pairing_additive_on_powers(self):
        """Test that <T, gamma^n> = n <T, gamma>."""
        for text in ("a", "ab", "aBB"):
            gamma = parse_class(B2, text)
            base = pairing(self.plus, gamma)
            for n in (2, 3):
                self.assertAlmostEqual(pairing(self.plus, gamma.power(n)), n * base, places=6)


class TestExperiments(unittest.TestCase):
    """Test the uniform length comparison and the scaling diagnostic."""

    def setUp(self):
        self.ts = default_test_set(B2)
        self.f = TreeSource.pole(fibonacci_pair(), 1)
        self.g = TreeSource.pole(swapped_pair(), 1)

    def test_t2_delta_positive(self):
        """Test that no primitive class is short in both trees."""
        result = t2_experiment(self.f, self.g, 4, self.ts)
        self.assertGreater(result.delta, 0.0)
        self.assertTrue(math.isfinite(result.ceiling))
        self.assertEqual(result.classes_scanned, len(result.table))
        self.assertIn(result.witness, set(result.table["class"]))

    def test_scaling_table(self):
        """Test that the scaling table is sorted by word length."""
        transvect = FreeGroupAut.from_strings(B2, ["ab", "b"], ["aB", "b"], "t")
        twice = FreeGroupAut.from_strings(B2, ["abb", "b"], ["aBB", "b"], "t*t")
        q = TreeSource.pole(fibonacci_pair(), -1)
        report = scaling_diagnostic(self.f, q, [twice, transvect], self.ts, [2, 1])
        self.assertEqual(list(report.table["word_length"]), [1, 2])
        self.assertEqual(len(report.table), 2)

    def test_scaling_lengths_must_match(self):
        """Test that word lengths must match the elements."""
        with self.assertRaises(InputError):
            scaling_diagnostic(self.f, self.g, [identity_aut(B2)], self.ts, [1, 2])


if __name__ == "__main__":
    unittest.main()
