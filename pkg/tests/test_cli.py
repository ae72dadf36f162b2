"""
Test suite for the outfn command line
"""

import json
import math
import tempfile
import unittest
from pathlib import Path
from unittest.mock import MagicMock, patch

import pandas as pd
from click.testing import CliRunner

from src.cli.main import cli
from src.cli.runner import run
from src.train_track.maps import GrowthConstants
from src.utils.config import Config

FIBONACCI = str(Path(__file__).resolve().parent.parent / "configs" / "fibonacci.toml")


class TestCli(unittest.TestCase):
    """Test commands end to end through click."""

    def setUp(self):
        self.runner = CliRunner()
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def invoke(self, *args: str):
        return self.runner.invoke(cli, ["--out", str(self.out), *args])

    def read(self, stem: str) -> dict:
        return json.loads((self.out / f"{stem}.json").read_text(encoding="utf-8"))

    def test_help(self):
        """Test that the group lists its commands."""
        result = self.runner.invoke(cli, ["--help"])
        self.assertEqual(result.exit_code, 0)
        for name in ("analyze", "limits", "complex", "experiment"):
            self.assertIn(name, result.output)

    def test_analyze_fibonacci(self):
        """Test the train track report of the Fibonacci map."""
        result = self.invoke("--config", FIBONACCI, "analyze", "--map", "fib")
        self.assertEqual(result.exit_code, 0)
        report = self.read("analyze")
        self.assertEqual(report["command"], "analyze")
        self.assertAlmostEqual(report["results"]["lambda"], (1 + math.sqrt(5)) / 2, places=9)
        self.assertEqual(report["results"]["illegal_turns"], ["{a,b}"])
        self.assertTrue(all(report["assertions"].values()))

    def test_analyze_needs_config(self):
        """Test that analyze without --config is an input error."""
        result = self.invoke("analyze", "--map", "fib")
        self.assertEqual(result.exit_code, 2)

    def test_unknown_map(self):
        """Test that an undefined map name is an input error."""
        result = self.invoke("--config", FIBONACCI, "analyze", "--map", "nope")
        self.assertEqual(result.exit_code, 2)

    def test_malformed_config(self):
        """Test that broken TOML exits with the input error code."""
        bad = self.out / "bad.toml"
        bad.write_text("rank = 2\n[maps.f\n", encoding="utf-8")
        result = self.invoke("--config", str(bad), "analyze", "--map", "f")
        self.assertEqual(result.exit_code, 2)

    def test_treemodel(self):
        """Test that the caterpillar experiment passes all its assertions."""
        result = self.invoke("experiment", "treemodel", "--leaves", "6")
        self.assertEqual(result.exit_code, 0)
        report = self.read("experiment_treemodel")
        self.assertEqual(report["results"]["mismatches"], {"chain": 0, "separating": 0})
        self.assertTrue(report["assertions"]["g0_tripod_centers"])

    def test_complex_build_and_check(self):
        """Test that a stored tree-model complex reloads and re-checks."""
        result = self.invoke("complex", "build", "--leaves", "5")
        self.assertEqual(result.exit_code, 0)
        self.assertTrue((self.out / "complex_build.dot").exists())
        built = self.read("complex_build")
        self.assertEqual(built["results"]["mode"], "chain")
        self.assertEqual(len(built["results"]["sample"]), 5)

        check = self.invoke("complex", "check", str(self.out / "complex_build.json"))
        self.assertEqual(check.exit_code, 0)
        report = self.read("complex_check")
        self.assertTrue(report["assertions"]["table_roundtrip"])
        self.assertTrue(report["assertions"]["rho_roundtrip"])

    def test_limits_translated_tree(self):
        """Test the length function of T^- . h on classes read from a file."""
        classes = self.out / "classes.txt"
        classes.write_text("a\nb\n# mixed\nab\naB\n", encoding="utf-8")
        result = self.invoke(
            "--config", FIBONACCI, "limits", "--map", "fib", "--sign", "-", "--g", "h",
            "--testset", str(classes), "--tol", "1e-9", "--kmax", "60",
        )  # fmt: skip
        self.assertNotEqual(result.exit_code, 2)
        report = self.read("limits")
        results = report["results"]
        self.assertEqual(results["tree"], "T[fib]-.h")
        self.assertEqual(len(results["values"]), 4)
        self.assertIn("a", results["values"])
        self.assertAlmostEqual(sum(results["values"].values()), 1.0, places=6)
        self.assertLessEqual(results["k_used"], 60)
        self.assertGreaterEqual(results["error_estimate"], 0.0)
        self.assertEqual(report["truncation"]["k_max"], 60)
        self.assertEqual(len(report["truncation"]["test_set"]), 4)

    def test_limits_rejects_bad_sign(self):
        """Test that the sign must be + or -."""
        result = self.invoke("--config", FIBONACCI, "limits", "--map", "fib", "--sign", "0")
        self.assertEqual(result.exit_code, 2)


class TestRunnerWarnings(unittest.TestCase):
    """Test that measured values below their targets surface as report warnings."""

    def test_analyze_measures_growth(self):
        """Test that analyze checks growth on classes long enough to be legal."""
        report = run("analyze", Config.load(FIBONACCI), map_name="fib")
        self.assertGreater(report.results["growth_constants"].classes_checked, 0)
        self.assertEqual(report.warnings, [])

    def test_analyze_warns_without_growth_data(self):
        """Test that an empty growth measurement is reported."""
        empty = GrowthConstants(0.2, 2.0, 5, 0, 0, ())
        with patch("src.cli.runner.growth_constants", return_value=empty):
            report = run("analyze", Config.load(FIBONACCI), map_name="fib")
        self.assertTrue(any("growth constants" in w for w in report.warnings))

    def test_treemodel_warns_on_low_correlation(self):
        """Test that a weak distance correlation is reported."""
        with patch("src.cli.runner.distance_correlation", return_value=0.5):
            report = run("experiment treemodel", None, leaves=5)
        self.assertTrue(any("rank correlation" in w for w in report.warnings))

    def test_scaling_warns_on_low_monotone_fraction(self):
        """Test that too few monotone chains are reported."""
        diagnostic = MagicMock(violations=0, table=pd.DataFrame())
        with (
            patch("src.cli.runner.scaling_diagnostic", return_value=diagnostic),
            patch("src.cli.runner.chain_monotonicity", return_value=0.5),
        ):
            report = run("experiment scaling", Config.load(FIBONACCI))
        self.assertEqual(report.results["monotone_chain_fraction"], 0.5)
        self.assertTrue(any("monotone chain fraction" in w for w in report.warnings))


if __name__ == "__main__":
    unittest.main()
