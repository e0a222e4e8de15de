"""
Tests for the CLI module of the symtrunc package.

This module contains tests for the command-line interface functionality.
"""

import io
import os
import json
import tempfile
import unittest
from unittest.mock import patch

import numpy as np
import pandas as pd
import yaml

from symtrunc.cli import EXIT_OK, EXIT_USAGE, build_parser, main
from symtrunc.core.domain import make_domain
from symtrunc.core.stepfn import StepFunction


class TestCLI(unittest.TestCase):
    """
    Test the CLI functionality.
    """

    def setUp(self):
        """
        Set up test fixtures.
        """
        self.temp_dir = tempfile.TemporaryDirectory()
        self.temp_path = self.temp_dir.name

        self.step_file = os.path.join(self.temp_path, "f.json")
        step = StepFunction([0.0, 0.1, 0.4, 0.7, 1.0], [1.0, 3.0, -2.0, 0.0])
        with open(self.step_file, "w") as f:
            json.dump(step.to_dict(), f)

        domain = make_domain("disk", 16)
        self.sampled_file = os.path.join(self.temp_path, "u.json")
        with open(self.sampled_file, "w") as f:
            json.dump(domain.sample(lambda x: x[:, 0] ** 2 + 0.5 * x[:, 1]).to_dict(), f)

        h = StepFunction([0.0, 0.2, 0.7, 1.0], [3.0, 1.0, 0.5])
        self.pair_file = os.path.join(self.temp_path, "pair.json")
        with open(self.pair_file, "w") as f:
            json.dump({"g": h.to_dict(), "h": h.to_dict()}, f)
        self.family_file = os.path.join(self.temp_path, "family.json")
        with open(self.family_file, "w") as f:
            json.dump({"intervals": [[0.01, 0.5], [0.6, 0.9]]}, f)

    def tearDown(self):
        """
        Clean up test fixtures.
        """
        self.temp_dir.cleanup()

    def run_cli(self, *argv):
        with patch("sys.stdout", new_callable=io.StringIO) as stdout:
            code = main(list(argv))
        return code, stdout.getvalue()

    def test_parser(self):
        """
        Test the subcommand tree.
        """
        args = build_parser().parse_args(["hardy", "criterion", "--n", "2", "--s", "1.5", "--t", "1.2"])
        self.assertEqual(args.command, "hardy")
        self.assertEqual(args.action, "criterion")
        self.assertAlmostEqual(args.a_min, 1e-8)

    def test_rearrange_step_function(self):
        """
        Test that f* is written next to the input.
        """
        code, _ = self.run_cli("rearrange", "--in", self.step_file, "--quiet")
        self.assertEqual(code, EXIT_OK)
        with open(os.path.join(self.temp_path, "f.rearranged.json")) as f:
            data = json.load(f)
        np.testing.assert_allclose(data["breakpoints"], [0.0, 0.3, 0.6, 0.7, 1.0])
        np.testing.assert_allclose(data["values"], [3.0, 2.0, 1.0, 0.0])

    def test_rearrange_csv(self):
        out_dir = os.path.join(self.temp_path, "out")
        code, _ = self.run_cli("rearrange", "--in", self.step_file, "--format", "csv", "--out", out_dir, "--quiet")
        self.assertEqual(code, EXIT_OK)
        frame = pd.read_csv(os.path.join(out_dir, "f.rearranged.csv"))
        self.assertEqual(list(frame.columns), ["t", "f_star", "f_star_star", "oscillation"])
        self.assertTrue(np.all(np.diff(frame["f_star"]) <= 0))

    def test_truncate(self):
        code, _ = self.run_cli(
            "truncate", "--in", self.sampled_file, "--t1", "0.0", "--t2", "0.1", "--quiet"
        )
        # x^2 + y/2 takes negative values on the disk
        self.assertEqual(code, EXIT_USAGE)

        positive = os.path.join(self.temp_path, "w.json")
        with open(positive, "w") as f:
            json.dump(make_domain("interval", 16).sample(lambda x: x[:, 0]).to_dict(), f)
        code, _ = self.run_cli("truncate", "--in", positive, "--t1", "0.25", "--t2", "0.5", "--quiet")
        self.assertEqual(code, EXIT_OK)
        with open(os.path.join(self.temp_path, "w.truncated.json")) as f:
            values = json.load(f)["values"]
        self.assertAlmostEqual(max(values), 0.25)
        self.assertEqual(min(values), 0.0)

    def test_hardy_eval(self):
        code, _ = self.run_cli("hardy", "eval", "--in", self.step_file, "--quiet")
        self.assertEqual(code, EXIT_USAGE)

        positive = os.path.join(self.temp_path, "g.json")
        with open(positive, "w") as f:
            json.dump(StepFunction.indicator(0.25).to_dict(), f)
        code, _ = self.run_cli("hardy", "eval", "--in", positive, "--alpha", "0.5", "--quiet")
        self.assertEqual(code, EXIT_OK)
        frame = pd.read_csv(os.path.join(self.temp_path, "g.hardy.csv"))
        self.assertEqual(len(frame), 200)
        self.assertAlmostEqual(frame["Hg"].iloc[-1], 0.0)

    def test_hardy_criterion(self):
        """
        Test the diverging configuration n=2, s=2, t=1.5.
        """
        code, output = self.run_cli("hardy", "criterion", "--n", "2", "--s", "2", "--t", "1.5", "--quiet")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(output)
        self.assertTrue(payload["diverging"])
        self.assertAlmostEqual(payload["predicted_exponent"], -1.0 / 6.0)
        self.assertAlmostEqual(payload["r"], 2.0)

    def test_spherical(self):
        code, _ = self.run_cli("symmetrize", "spherical", "--in", self.sampled_file, "--quiet")
        self.assertEqual(code, EXIT_OK)
        with open(os.path.join(self.temp_path, "u.spherical.json")) as f:
            data = json.load(f)
        self.assertEqual(data["shape"], "disk")
        self.assertTrue(min(data["values"]) >= 0)

    def test_majorize_check_and_certify(self):
        code, output = self.run_cli("majorize", "check", "--in", self.pair_file, "--quiet")
        self.assertEqual(code, EXIT_OK)
        self.assertAlmostEqual(json.loads(output)["majorization_constant"], 1.0)

        code, output = self.run_cli(
            "majorize", "certify", "--in", self.pair_file, "--family", self.family_file, "--quiet"
        )
        self.assertEqual(code, EXIT_OK)
        self.assertIn("valid", output)
        with open(os.path.join(self.temp_path, "pair.certificate.json")) as f:
            self.assertEqual(json.load(f)["branch"], "split_j0")

    def test_majorize_audit(self):
        code, output = self.run_cli("majorize", "audit", "--n-pairs", "5", "--seed", "1", "--quiet")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(json.loads(output)["pass"])

    def test_majorize_audit_memory_flag(self):
        code, output = self.run_cli("majorize", "audit", "--n-pairs", "3", "--monitor-memory", "--quiet")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(output)["n_pairs"], 3)

    def test_verify_writes_bundle(self):
        """
        Test that a quick Poincare run writes report.json and timings.json.
        """
        config_file = os.path.join(self.temp_path, "quick.yaml")
        with open(config_file, "w") as f:
            yaml.safe_dump(
                {
                    "battery": {"n_random": 1},
                    "tolerances": {"refinement_drift": 0.25},
                },
                f,
            )
        out_dir = os.path.join(self.temp_path, "results")
        code, _ = self.run_cli(
            "verify", "poincare", "--config", config_file, "--shapes", "interval",
            "--resolutions", "32", "64", "--out", out_dir, "--quiet",
        )
        self.assertEqual(code, EXIT_OK)
        with open(os.path.join(out_dir, "report.json")) as f:
            report = json.load(f)
        self.assertTrue(report["all_passed"])
        self.assertEqual(report["records"][0]["name"], "poincare")
        self.assertTrue(os.path.exists(os.path.join(out_dir, "timings.json")))

    def test_usage_errors(self):
        """
        Test that bad flags, missing files and missing commands exit with 2.
        """
        with patch("sys.stderr", new_callable=io.StringIO):
            self.assertEqual(main(["rearrange", "--bogus"]), EXIT_USAGE)
            self.assertEqual(main(["rearrange", "--in", os.path.join(self.temp_path, "missing.json")]), EXIT_USAGE)
            self.assertEqual(self.run_cli()[0], EXIT_USAGE)
            self.assertEqual(main(["verify", "full", "--config", "missing.yaml", "--quiet"]), EXIT_USAGE)


if __name__ == "__main__":
    unittest.main()
