"""
Test suite for annulus systems, crossratios and the triple graphs G_r
"""

import unittest

import networkx as nx
import numpy as np

from src.bowditch.annuli import Annulus, AnnulusSystem, SamplePoint, annulus_less
from src.bowditch.crossratio import (
    CrossratioTable,
    axiom_scan,
    build_table,
    crossratio,
    crossratio_axioms,
    sample_subsets,
    separation_count,
    triangle_check,
)
from src.bowditch.graph import (
    build_graph,
    connectivity_threshold,
    distance_correlation,
    estimate_delta,
    make_triple,
    rank_correlation,
    rho,
    rho_matrix,
    select_triples,
)
from src.bowditch.tree_model import (
    caterpillar,
    path_example,
    subtree_distance,
    tree_model,
    tripod_centers,
)
from src.utils.errors import DegeneracyError, InputError


def points(n: int) -> tuple[SamplePoint, ...]:
    return tuple(SamplePoint(i, f"p{i}") for i in range(n))


class TestAnnuli(unittest.TestCase):
    """Test annuli, nesting and system construction."""

    def test_overlapping_sides(self):
        """Test that sides must be disjoint."""
        with self.assertRaises(DegeneracyError):
            Annulus(frozenset({0, 1}), frozenset({1, 2}))

    def test_negate(self):
        """Test that negation swaps the sides and the label sign."""
        a = Annulus(frozenset({0}), frozenset({1, 2}), "e")
        self.assertEqual(a.negate(), Annulus(frozenset({1, 2}), frozenset({0})))
        self.assertEqual(a.negate().label, "-e")
        self.assertEqual(a.negate().negate().label, "e")

    def test_less(self):
        """Test A < B when A+ and B- cover the sample."""
        sample = points(4)
        a = Annulus(frozenset({0}), frozenset({1, 2, 3}))
        b = Annulus(frozenset({0, 1}), frozenset({2, 3}))
        self.assertTrue(annulus_less(a, b, sample))
        self.assertFalse(annulus_less(b, a, sample))
        self.assertFalse(annulus_less(a, a, sample))

    def test_from_candidates(self):
        """Test negation closure and dropping of empty or full sides."""
        candidates = [
            Annulus(frozenset({0}), frozenset({1, 2, 3})),
            Annulus(frozenset({0, 1}), frozenset({2})),
            Annulus(frozenset(), frozenset({0, 1, 2, 3})),
            Annulus(frozenset({1, 2, 3}), frozenset({0})),
        ]
        system = AnnulusSystem.from_candidates(points(4), candidates)
        self.assertEqual(len(system), 4)
        self.assertEqual(system.dropped, 2)
        signatures = {a.signature for a in system.instances}
        for a in system.instances:
            self.assertIn(a.negate().signature, signatures)

    def test_less_matrix_matches_pairwise(self):
        """Test the vectorized relation against annulus_less."""
        tree, leaves = caterpillar(5)
        system = tree_model(tree, leaves)
        for i, a in enumerate(system.instances):
            for j, b in enumerate(system.instances):
                self.assertEqual(
                    bool(system.less_matrix[i, j]), annulus_less(a, b, system.sample)
                )

    def test_sample_ids_in_order(self):
        """Test that sample ids must be 0..N-1."""
        with self.assertRaises(InputError):
            AnnulusSystem((SamplePoint(1, "x"), SamplePoint(0, "y")), ())


class TestTreeModel(unittest.TestCase):
    """Test crossratios of tree models against subtree distances."""

    def test_caterpillar_shape(self):
        """Test leaf count and that no vertex has degree two."""
        tree, leaves = caterpillar(6)
        self.assertEqual(len(leaves), 6)
        self.assertEqual(tree.number_of_nodes(), 10)
        self.assertTrue(all(tree.degree(v) in (1, 3) for v in tree.nodes))
        with self.assertRaises(InputError):
            caterpillar(2)

    def test_path_example(self):
        """Test the crossratio across the whole spine."""
        tree, leaves = path_example()
        system = tree_model(tree, leaves)
        K, L = (leaves.index("a0"), leaves.index("a1")), (leaves.index("e0"), leaves.index("e1"))
        for mode in ("chain", "separating"):
            self.assertEqual(crossratio(K, L, system, mode), 4)
            self.assertEqual(build_table(system, mode).value(K, L), 4)
        self.assertEqual(crossratio((0, 1), (1, 5), system), 0)
        self.assertEqual(separation_count(K, L, system), 4)

    def test_unknown_mode(self):
        """Test that only chain and separating modes exist."""
        tree, leaves = path_example()
        with self.assertRaises(InputError):
            build_table(tree_model(tree, leaves), "longest")

    def test_oracle_match(self):
        """Test both modes against the subtree distance for several sizes."""
        for n in (4, 5, 6, 7):
            tree, leaves = caterpillar(n)
            system = tree_model(tree, leaves)
            tables = [build_table(system, mode) for mode in ("chain", "separating")]
            for a, K in enumerate(tables[0].pairs):
                for b, L in enumerate(tables[0].pairs):
                    expected = 0
                    if not set(K) & set(L):
                        expected = subtree_distance(
                            tree, [leaves[i] for i in K], [leaves[i] for i in L]
                        )
                    for table in tables:
                        self.assertEqual(table.values[a, b], expected, (n, K, L))

    def test_axioms_exact(self):
        """Test that trees satisfy the crossratio axioms with k = 0."""
        tree, leaves = path_example()
        table = build_table(tree_model(tree, leaves))
        report = crossratio_axioms(table, 0)
        self.assertEqual(report.k, 0)
        self.assertTrue(report.passes(0))
        self.assertEqual(report.path_passed, report.path_checked)
        self.assertTrue(triangle_check(table).holds)

    def test_axiom_scan(self):
        """Test that A2 holds exactly and A1 is the longest spine crossing."""
        tree, leaves = caterpillar(6)
        scan = axiom_scan(build_table(tree_model(tree, leaves)))
        self.assertEqual(scan.a2_k, 0)
        self.assertEqual(scan.a1_max, 3)
        self.assertTrue(scan.exhaustive)
        self.assertEqual(scan.quadruples, 15)


class TestCrossratioTable(unittest.TestCase):
    """Test sparse export and reload of tables."""

    def test_entries_roundtrip(self):
        """Test that sparse entries rebuild the same table."""
        tree, leaves = caterpillar(6)
        table = build_table(tree_model(tree, leaves))
        again = CrossratioTable.from_entries(
            table.n_points, table.entries(), table.point_entries(), table.mode
        )
        np.testing.assert_array_equal(again.values, table.values)
        np.testing.assert_array_equal(again.point_values, table.point_values)

    def test_sample_subsets(self):
        """Test exhaustive and sampled subset selection."""
        subsets, exhaustive = sample_subsets(6, 4, 100, 0)
        self.assertTrue(exhaustive)
        self.assertEqual(len(subsets), 15)
        sampled, exhaustive = sample_subsets(20, 4, 50, 1)
        self.assertFalse(exhaustive)
        self.assertEqual(len(sampled), 50)
        np.testing.assert_array_equal(sampled, sample_subsets(20, 4, 50, 1)[0])


class TestTripleGraph(unittest.TestCase):
    """Test rho and the graphs G_r on a caterpillar."""

    def setUp(self):
        self.tree, self.leaves = caterpillar(6)
        self.table = build_table(tree_model(self.tree, self.leaves))
        self.triples = select_triples(6)
        self.rho = rho_matrix(self.triples, self.table)

    def test_make_triple(self):
        """Test that triples are sorted and distinct."""
        self.assertEqual(make_triple(3, 1, 2), (1, 2, 3))
        with self.assertRaises(InputError):
            make_triple(1, 1, 2)

    def test_select_triples(self):
        """Test exhaustive and seeded selection."""
        self.assertEqual(len(self.triples), 20)
        sampled = select_triples(20, budget=50, seed=1)
        self.assertEqual(len(sampled), 50)
        self.assertEqual(sampled, select_triples(20, budget=50, seed=1))

    def test_rho_symmetric(self):
        """Test that rho is symmetric with zero diagonal."""
        np.testing.assert_array_equal(self.rho, self.rho.T)
        np.testing.assert_array_equal(np.diag(self.rho), 0)
        a, b = self.triples[0], self.triples[-1]
        self.assertEqual(rho(a, b, self.table), self.rho[0, -1])

    def test_rho_is_center_distance(self):
        """Test that rho equals the distance between tripod centers."""
        centers = tripod_centers(self.tree, self.leaves, self.triples)
        for i, a in enumerate(self.triples):
            for j, b in enumerate(self.triples):
                expected = nx.shortest_path_length(self.tree, centers[a], centers[b])
                self.assertEqual(self.rho[i, j], expected)

    def test_g0_components_are_center_groups(self):
        """Test that G_0 joins exactly the triples with a common center."""
        centers = tripod_centers(self.tree, self.leaves, self.triples)
        groups = {
            frozenset(t for t in self.triples if centers[t] == c) for c in set(centers.values())
        }
        g0 = build_graph(self.triples, self.rho, 0)
        self.assertEqual({frozenset(c) for c in g0.components()}, groups)
        with self.assertRaises(DegeneracyError):
            estimate_delta(g0)

    def test_connectivity_and_delta(self):
        """Test the connectivity threshold and hyperbolicity at threshold + 1."""
        threshold = connectivity_threshold(self.triples, self.rho)
        self.assertEqual(threshold, 1)
        graph = build_graph(self.triples, self.rho, threshold + 1)
        self.assertTrue(graph.connected)
        self.assertLessEqual(estimate_delta(graph), 1.0)
        self.assertGreater(distance_correlation(graph), 0.3)

    def test_delta_stable_as_the_tree_grows(self):
        """Test that delta stays within one as leaves are added."""
        deltas = []
        for leaves in (6, 7):
            tree, names = caterpillar(leaves)
            table = build_table(tree_model(tree, names))
            triples = select_triples(leaves)
            rho_table = rho_matrix(triples, table)
            r = connectivity_threshold(triples, rho_table) + 1
            deltas.append(estimate_delta(build_graph(triples, rho_table, r)))
        self.assertLessEqual(deltas[0], 1.0)
        self.assertLessEqual(abs(deltas[1] - deltas[0]), 1.0)

    def test_graphs_nested(self):
        """Test that G_r gains edges as r grows."""
        small = set(build_graph(self.triples, self.rho, 1).graph.edges)
        large = set(build_graph(self.triples, self.rho, 2).graph.edges)
        self.assertTrue(small <= large)
        with self.assertRaises(InputError):
            build_graph(self.triples, self.rho, -1)

    def test_dot_output(self):
        """Test the DOT rendering."""
        dot = build_graph(self.triples, self.rho, 1).to_dot()
        self.assertTrue(dot.startswith("graph G {"))
        self.assertIn('"(0, 1, 2)"', dot)

    def test_rank_correlation(self):
        """Test Spearman correlation on monotone data."""
        self.assertAlmostEqual(rank_correlation([1, 2, 3], [2, 4, 9]), 1.0)
        self.assertAlmostEqual(rank_correlation([1, 2, 3], [3, 2, 1]), -1.0)


if __name__ == "__main__":
    unittest.main()
