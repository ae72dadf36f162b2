"""
Test suite for configuration loading, report emission and shared utilities
"""

import json
import math
import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pandas as pd

from src.free_group.automorphisms import is_inner
from src.utils.config import OUTPUT_ENV, Config, output_dir, parse_config
from src.utils.errors import (
    AssertionFailure,
    ConvergenceError,
    DegeneracyError,
    InputError,
)
from src.utils.report import Report, normalize, read_report, to_json, write_report
from src.utils.workers import parallel_map

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """
rank = 2

[maps.fib]
images = ["ab", "a"]
inverse_images = ["b", "Ba"]
"""


class TestParseConfig(unittest.TestCase):
    """Test TOML decoding and validation."""

    def test_minimal(self):
        """Test that defaults fill the settings table."""
        model = parse_config(MINIMAL)
        self.assertEqual(model.rank, 2)
        self.assertEqual(model.settings.eps, 0.5)
        self.assertEqual(model.settings.axis, 5)
        self.assertEqual(model.settings.generators, "nielsen")

    def test_bad_toml_has_position(self):
        """Test that TOML syntax errors carry line and column."""
        with self.assertRaises(InputError) as ctx:
            parse_config("rank = 2\nmaps x\n")
        self.assertIsNotNone(ctx.exception.line)
        self.assertIsNotNone(ctx.exception.column)

    def test_unknown_key(self):
        """Test that unknown keys are rejected."""
        with self.assertRaises(InputError):
            parse_config(MINIMAL + "\n[settings]\nepsilon = 0.1\n")

    def test_margin_must_fit(self):
        """Test that mu >= eps is rejected."""
        with self.assertRaises(InputError):
            parse_config(MINIMAL + "\n[settings]\neps = 0.01\nmu = 0.02\n")

    def test_image_count(self):
        """Test that image lists must match the rank."""
        with self.assertRaises(InputError):
            parse_config('rank = 3\n[maps.f]\nimages = ["ab", "a"]\n')

    def test_undefined_pole(self):
        """Test that poles must name defined maps."""
        with self.assertRaises(InputError):
            parse_config(MINIMAL + '\n[settings]\npoles = ["nope"]\n')

    def test_undefined_experiment_map(self):
        """Test that experiments must reference defined maps."""
        with self.assertRaises(InputError):
            parse_config(MINIMAL + '\n[experiments.t2]\nf = "fib"\ng = "other"\n')

    def test_unknown_symbol(self):
        """Test that image strings with foreign letters are rejected."""
        model = parse_config('rank = 2\n[maps.f]\nimages = ["aX", "b"]\n')
        with self.assertRaises(InputError):
            Config(model)


class TestConfig(unittest.TestCase):
    """Test resolution of a loaded config into automorphisms and pairs."""

    def setUp(self):
        self.config = Config.load(CONFIGS / "fibonacci.toml")

    def test_map_names(self):
        """Test that every map table is resolved."""
        self.assertEqual(self.config.map_names, ["fib", "fib_swap", "h", "flip_b"])

    def test_element_expression(self):
        """Test products with inverses."""
        inner, _ = is_inner(self.config.element("fib*fib^-1"))
        self.assertTrue(inner)
        self.assertEqual(self.config.element("id").name, "id")
        self.assertEqual(self.config.aut("swap").name, "swap")

    def test_bad_element(self):
        """Test empty factors and unknown names."""
        for expression in ("", "fib**h", "nope"):
            with self.assertRaises(InputError, msg=expression):
                self.config.element(expression)

    def test_poles(self):
        """Test that configured poles resolve to growing pairs."""
        poles = self.config.poles()
        self.assertEqual([p.name for p in poles], ["fib", "fib_swap"])
        self.assertAlmostEqual(poles[0].lam, (1 + math.sqrt(5)) / 2, places=9)

    def test_poles_from_tags(self):
        """Test that pole tags are used when settings.poles is empty."""
        config = Config(parse_config(MINIMAL + 'tag = "pole"\n'))
        self.assertEqual([p.name for p in config.poles()], ["fib"])
        with self.assertRaises(InputError):
            Config(parse_config(MINIMAL)).poles()

    def test_out_settings(self):
        """Test that instance settings mirror the config."""
        settings = self.config.out_settings()
        self.assertEqual(settings.eps, 0.5)
        self.assertEqual(settings.mu, 0.05)
        self.assertEqual(settings.sample_size, 48)
        self.assertEqual(settings.axis, 5)

    def test_translation_threshold(self):
        """Test that the translation experiment carries its own edge threshold."""
        self.assertEqual(self.config.experiments.translation.r, 0)
        self.assertIsNone(self.config.settings.r)

    def test_testset_file(self):
        """Test that a test set file skips blanks and comments."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "classes.txt"
            path.write_text("a\n# primitive\nab  # mixed\n\naaB\n", encoding="utf-8")
            testset = self.config.testset_file(path)
        expected = [str(c) for c in self.config.classes(["a", "ab", "aaB"])]
        self.assertEqual(testset.labels(), expected)
        with self.assertRaises(InputError):
            self.config.testset_file(Path("missing-classes.txt"))

    def test_missing_file(self):
        """Test that an unreadable path is an input error."""
        with self.assertRaises(InputError):
            Config.load(CONFIGS / "missing.toml")

    def test_rank_three_config(self):
        """Test that the rank-3 example loads."""
        config = Config.load(CONFIGS / "rank3.toml")
        self.assertEqual(config.basis.rank, 3)


class TestOutputDir(unittest.TestCase):
    """Test where report files go."""

    @patch.dict(os.environ, {OUTPUT_ENV: "/tmp/outfn-env"})
    def test_environment(self):
        """Test that the environment variable is read."""
        self.assertEqual(output_dir(), Path("/tmp/outfn-env"))

    @patch.dict(os.environ, {OUTPUT_ENV: "/tmp/outfn-env"})
    def test_flag_wins(self):
        """Test that --out takes precedence."""
        self.assertEqual(output_dir("reports"), Path("reports"))


class TestReport(unittest.TestCase):
    """Test normalization and report files."""

    def test_normalize(self):
        """Test float rounding, numpy scalars and set ordering."""
        self.assertEqual(normalize(1 / 3), 0.333333333333)
        self.assertEqual(normalize(np.int64(4)), 4)
        self.assertIs(normalize(np.bool_(True)), True)
        self.assertEqual(normalize(float("nan")), "nan")
        self.assertEqual(normalize(float("-inf")), "-inf")
        self.assertEqual(normalize({3, 1, 2}), [1, 2, 3])
        self.assertEqual(normalize(np.array([[1, 2]])), [[1, 2]])

    def test_to_json_deterministic(self):
        """Test sorted keys and the schema tag."""
        report = Report("analyze", {}, {"b": 1, "a": 0.5}, {"ok": True})
        payload = json.loads(to_json(report))
        self.assertEqual(payload["schema"], 1)
        self.assertEqual(list(payload["results"]), ["a", "b"])
        self.assertNotIn("timing", payload)
        self.assertTrue(report.passed)

    def test_write_and_read(self):
        """Test JSON, CSV and DOT files."""
        report = Report(
            "complex build",
            {},
            {"r": 2},
            tables={"rho": pd.DataFrame({"i": [0], "j": [1]})},
            dot="graph G {\n}\n",
        )
        with tempfile.TemporaryDirectory() as tmp:
            written = write_report(report, Path(tmp), "complex_build")
            names = sorted(p.name for p in written)
            self.assertEqual(
                names, ["complex_build.dot", "complex_build.json", "complex_build.rho.csv"]
            )
            self.assertEqual(read_report(Path(tmp) / "complex_build.json")["results"], {"r": 2})

    def test_unsupported_schema(self):
        """Test that foreign schemas are rejected."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "old.json"
            path.write_text(json.dumps({"schema": 0}), encoding="utf-8")
            with self.assertRaises(InputError):
                read_report(path)
            with self.assertRaises(InputError):
                read_report(Path(tmp) / "absent.json")


class TestErrors(unittest.TestCase):
    """Test the error hierarchy."""

    def test_exit_codes(self):
        """Test the CLI exit code of each error."""
        self.assertEqual(InputError("x").exit_code, 2)
        self.assertEqual(ConvergenceError("x").exit_code, 3)
        self.assertEqual(DegeneracyError("x").exit_code, 3)
        self.assertEqual(AssertionFailure("x").exit_code, 1)

    def test_payloads(self):
        """Test positions, partial histories and detail dicts."""
        self.assertIn("line 3, column 7", str(InputError("bad", 3, 7)))
        self.assertEqual(ConvergenceError("x", [1.0, 0.5]).partial, [1.0, 0.5])
        self.assertEqual(DegeneracyError("x", {"k": 1}).detail, {"k": 1})
        self.assertIsInstance(InputError("x"), ValueError)


class TestWorkers(unittest.TestCase):
    """Test the thread pool helper."""

    def test_order_preserved(self):
        """Test that results come back in input order."""
        items = list(range(20))
        self.assertEqual(parallel_map(lambda x: x * x, items, 4), [x * x for x in items])
        self.assertEqual(parallel_map(str, [1, 2], 1), ["1", "2"])


if __name__ == "__main__":
    unittest.main()
