# Copyright 2026 The metroq Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end checks of the metroq command line.

usage: cli_test.py METROQ_BINARY SCHEMA_JSON
"""

import json
import math
import os
import subprocess
import sys
import tempfile
import unittest

BINARY = None
SCHEMA = None

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("METROQ_SEED", None)
    if env:
        full_env.update(env)
    return subprocess.run([BINARY, *args], capture_output=True, text=True, env=full_env, timeout=240)


def report(*args, env=None, expect=0):
    proc = run(*args, "--format", "json", env=env)
    if proc.returncode != expect:
        raise AssertionError(f"{args}: exit {proc.returncode}, stderr {proc.stderr!r}")
    doc = json.loads(proc.stdout)
    if jsonschema is not None:
        jsonschema.validate(doc, SCHEMA)
    return doc


def without_timing(doc):
    doc = dict(doc)
    doc.pop("wall_time_ms")
    return doc


class VerifyTest(unittest.TestCase):
    def test_full_suite_passes(self):
        doc = report("verify", "--n-max", "8", "--seed", "7")
        self.assertTrue(doc["pass"])
        for check in doc["results"]["checks"]:
            self.assertTrue(check["pass"], check)
            if "min_fidelity" in check:
                self.assertGreater(check["min_fidelity"], 1 - 1e-12)
        names = {c["name"] for c in doc["results"]["checks"]}
        self.assertEqual(sum(c["name"] == "convert_general_n" for c in doc["results"]["checks"]), 7)
        self.assertIn("vectorization_identity", names)

    def test_over_cap_is_usage_error(self):
        self.assertEqual(run("verify", "--n-max", "20").returncode, 2)

    def test_unreachable_tolerance_fails_with_residuals(self):
        doc = report("verify", "--tolerance", "1e-30", expect=1)
        self.assertFalse(doc["pass"])
        self.assertTrue(any(not c["pass"] and c["residual"] > 0 for c in doc["results"]["checks"]))

    def test_bad_flags(self):
        self.assertEqual(run("verify", "--bogus").returncode, 2)
        self.assertEqual(run("verify", "--format", "xml").returncode, 2)
        self.assertEqual(run().returncode, 2)
        self.assertEqual(run("verify", env={"METROQ_SEED": "abc"}).returncode, 2)

    def test_deterministic(self):
        a = without_timing(report("verify", "--seed", "3"))
        b = without_timing(report("verify", "--seed", "3"))
        self.assertEqual(a, b)

    def test_seed_from_environment(self):
        doc = report("verify", env={"METROQ_SEED": "99"})
        self.assertEqual(doc["config"]["seed"], 99)
        doc = report("verify", "--seed", "5", env={"METROQ_SEED": "99"})
        self.assertEqual(doc["config"]["seed"], 5)
        self.assertEqual(report("verify")["config"]["seed"], 42)

    def test_text_format(self):
        proc = run("verify", "--format", "text")
        self.assertEqual(proc.returncode, 0)
        self.assertTrue(proc.stdout.startswith("verify: PASS"))


class ScalingTest(unittest.TestCase):
    def test_slopes_and_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            first = os.path.join(tmp, "a.csv")
            second = os.path.join(tmp, "b.csv")
            doc = report("scaling", "--strategies", "entangled,classical,sequential", "--seed", "11", "--out", first)
            self.assertTrue(doc["pass"])
            slopes = {s["strategy"]: s["fitted_slope"] for s in doc["results"]["strategies"]}
            self.assertLessEqual(abs(slopes["entangled"] + 1.0), 0.15)
            self.assertLessEqual(abs(slopes["sequential"] + 1.0), 0.15)
            self.assertLessEqual(abs(slopes["classical"] + 0.5), 0.15)

            report("scaling", "--strategies", "entangled,classical,sequential", "--seed", "11", "--out", second)
            with open(first, "rb") as f, open(second, "rb") as g:
                a, b = f.read(), g.read()
            self.assertEqual(a, b)

            lines = a.decode().splitlines()
            self.assertEqual(lines[0], "strategy,N,nu,rounds,empirical_rmse,crb,seed")
            self.assertEqual(len(lines), 1 + 3 * 4)
            for line in lines[1:]:
                strategy, n, nu, rounds, rmse, crb, seed = line.split(",")
                self.assertIn(strategy, {"entangled", "classical", "sequential"})
                self.assertEqual((nu, rounds, seed), ("4000", "200", "11"))
                self.assertTrue(math.isfinite(float(rmse)) and float(crb) > 0)
                self.assertIn(int(n), {1, 2, 4, 8})

    def test_validation(self):
        self.assertEqual(run("scaling", "--n-values", "1,2").returncode, 2)
        self.assertEqual(run("scaling", "--n-values", "1,2,13").returncode, 2)
        self.assertEqual(run("scaling", "--nu", "100001").returncode, 2)
        self.assertEqual(run("scaling", "--rounds", "1001").returncode, 2)
        self.assertEqual(run("scaling", "--strategies", "quantum").returncode, 2)

    def test_unwritable_path(self):
        proc = run("scaling", "--nu", "100", "--rounds", "10", "--out", "/nonexistent-dir/out.csv")
        self.assertEqual(proc.returncode, 3)


class ModuleCommandsTest(unittest.TestCase):
    def test_noise(self):
        doc = report("noise", "--channel", "dephasing", "--p", "0.25")
        r = doc["results"]
        self.assertTrue(r["unital"] and r["diag_or_antidiag"] and r["trace_preserving"])
        self.assertLess(r["eq6_residual"], 1e-12)
        doc = report("noise", "--channel", "amplitudedamping", "--p", "0.3")
        self.assertFalse(doc["results"]["unital"])
        self.assertFalse(doc["results"]["trace_preserving"])
        self.assertTrue(doc["pass"])
        self.assertEqual(run("noise", "--channel", "dephasing", "--p", "1.5").returncode, 2)
        self.assertEqual(run("noise", "--channel", "erasure", "--p", "0.1").returncode, 2)

    def test_frequency(self):
        doc = report("frequency", "--gamma", "1.0", "--n-values", "1,2,4,8", "--nu", "4")
        expected = math.e / 2.0
        for row in doc["results"]["rows"]:
            self.assertAlmostEqual(row["bound_star"] / expected, 1.0, delta=1e-6)
        self.assertEqual(run("frequency", "--gamma", "0").returncode, 2)

    def test_noon(self):
        doc = report("noon", "--n", "4")
        self.assertLess(doc["results"]["max_fringe_deviation"], 1e-12)
        self.assertEqual(len(doc["results"]["fringe_zeros"]), 4)
        self.assertEqual(run("noon", "--n", "13").returncode, 2)

    def test_fisher(self):
        doc = report("fisher", "--n-values", "1,3,12")
        for row in doc["results"]["rows"]:
            n = row["N"]
            self.assertAlmostEqual(row["qfi_ghz"], n * n, delta=1e-10)
            self.assertAlmostEqual(row["qfi_product"], n, delta=1e-10)
            self.assertAlmostEqual(row["crb"]["entangled"], 1 / (n * math.sqrt(4000)), delta=1e-12)


if __name__ == "__main__":
    if len(sys.argv) < 3:
        sys.exit(__doc__)
    BINARY = sys.argv[1]
    with open(sys.argv[2], encoding="utf-8") as fh:
        SCHEMA = json.load(fh)
    if jsonschema is None:
        sys.exit("jsonschema is required for schema validation")
    unittest.main(argv=[sys.argv[0], "-v"])
