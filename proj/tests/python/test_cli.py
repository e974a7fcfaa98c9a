#!/usr/bin/env python3
"""Contract tests for the partition-entropy CLI: exit codes, config-file
precedence, output formats and seeded determinism. Usage: test_cli.py <cli>."""

import json
import os
import subprocess
import sys
import tempfile
import unittest

CLI = None


def run(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=env)


class ExitCodes(unittest.TestCase):
    def test_missing_seed_is_a_config_error(self):
        proc = run("prior-check", "--alpha", "0", "--theta", "1")
        self.assertEqual(proc.returncode, 2)
        self.assertIn("seed", proc.stderr)

    def test_invalid_theta_names_the_constraint(self):
        proc = run("converge", "--alpha", "0", "--theta", "-5", "--seed", "1")
        self.assertEqual(proc.returncode, 2)
        self.assertIn("theta must exceed -alpha", proc.stderr)

    def test_unknown_flag(self):
        proc = run("prior-check", "--seed", "1", "--bogus", "2")
        self.assertEqual(proc.returncode, 2)

    def test_passing_check_exits_zero(self):
        proc = run("martingale-check", "--alpha", "0.3", "--theta", "2", "--trials",
                   "200", "--seed", "7")
        self.assertEqual(proc.returncode, 0)
        self.assertIn("PASS", proc.stdout)

    def test_impossible_tolerance_exits_one(self):
        proc = run("martingale-check", "--alpha", "0.3", "--theta", "2", "--trials",
                   "50", "--seed", "7", "--tolerance", "1e-30")
        self.assertEqual(proc.returncode, 1)
        self.assertIn("FAIL", proc.stdout)


class ConfigFile(unittest.TestCase):
    def test_flags_override_config_values(self):
        with tempfile.TemporaryDirectory() as tmp:
            cfg = os.path.join(tmp, "run.conf")
            with open(cfg, "w") as fh:
                fh.write("# experiment defaults\nalpha=0\ntheta=1\n"
                         "trials=500\nseed=3\nformat=json\n")
            out = os.path.join(tmp, "out.json")
            proc = run("prior-check", "--config", cfg, "--trials", "200",
                       "--output", out)
            self.assertEqual(proc.returncode, 0, proc.stderr)
            with open(out) as fh:
                self.assertEqual(json.load(fh)["command"], "prior-check")
            # 200 trials from the flag, not 500 from the file: rerun with an
            # explicit 200 and require identical bytes.
            out2 = os.path.join(tmp, "out2.json")
            proc2 = run("prior-check", "--alpha", "0", "--theta", "1", "--seed", "3",
                        "--trials", "200", "--format", "json", "--output", out2)
            self.assertEqual(proc2.returncode, 0, proc2.stderr)
            with open(out) as a, open(out2) as b:
                self.assertEqual(a.read(), b.read())

    def test_unknown_config_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            cfg = os.path.join(tmp, "run.conf")
            with open(cfg, "w") as fh:
                fh.write("seed=3\nwibble=1\n")
            proc = run("prior-check", "--config", cfg)
            self.assertEqual(proc.returncode, 2)

    def test_malformed_config_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            cfg = os.path.join(tmp, "run.conf")
            with open(cfg, "w") as fh:
                fh.write("seed\n")
            proc = run("prior-check", "--config", cfg)
            self.assertEqual(proc.returncode, 2)

    def test_config_can_supply_the_seed(self):
        with tempfile.TemporaryDirectory() as tmp:
            cfg = os.path.join(tmp, "run.conf")
            with open(cfg, "w") as fh:
                fh.write("seed=11\nalpha=0\ntheta=1\ntrials=200\n")
            proc = run("prior-check", "--config", cfg)
            self.assertEqual(proc.returncode, 0, proc.stderr)


class Outputs(unittest.TestCase):
    def test_simulate_csv_schema(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = os.path.join(tmp, "sim.csv")
            proc = run("simulate", "--alpha", "0.5", "--theta", "1", "-n", "50",
                       "--trials", "10", "--seed", "5", "--output", out)
            self.assertEqual(proc.returncode, 0, proc.stderr)
            with open(out) as fh:
                lines = fh.read().strip().splitlines()
            self.assertEqual(lines[0], "trial,n,k,plugin,posterior")
            self.assertEqual(len(lines), 11)

    def test_simulate_from_masses_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            masses = os.path.join(tmp, "m.json")
            with open(masses, "w") as fh:
                fh.write('{"weights": [0.5, 0.3, 0.2], "tail": 0.0}')
            out = os.path.join(tmp, "sim.json")
            proc = run("simulate", "--masses-file", masses, "-n", "100", "--trials",
                       "5", "--seed", "5", "--format", "json", "--output", out)
            self.assertEqual(proc.returncode, 0, proc.stderr)
            with open(out) as fh:
                payload = json.load(fh)
            self.assertEqual(len(payload["partitions"]), 5)
            self.assertIn("truth", payload["partitions"][0])

    def test_converge_json_summary(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = os.path.join(tmp, "summary.json")
            proc = run("converge", "--alpha", "0", "--theta", "1", "--trials", "40",
                       "--checkpoints", "100,1000", "--seed", "9", "--format", "json",
                       "--output", out)
            self.assertEqual(proc.returncode, 0, proc.stderr)
            with open(out) as fh:
                summary = json.load(fh)
            self.assertIn("100", summary)
            self.assertIn("mean_gap", summary["1000"])

    def test_posterior_check(self):
        proc = run("posterior-check", "--alpha", "0.3", "--theta", "2", "--counts",
                   "3,1", "--trials", "2000", "--seed", "13", "--tail-eps", "1e-6")
        self.assertEqual(proc.returncode, 0, proc.stderr)

    def test_help_documents_the_tolerance(self):
        proc = run("martingale-check", "--help")
        self.assertEqual(proc.returncode, 0)
        self.assertIn("1e-9", proc.stdout)
        proc = run("converge", "--help")
        self.assertIn("0.05", proc.stdout)


class Determinism(unittest.TestCase):
    def test_byte_identical_across_thread_counts(self):
        with tempfile.TemporaryDirectory() as tmp:
            outs = []
            for threads in ("1", "4"):
                out = os.path.join(tmp, f"t{threads}.csv")
                proc = run("converge", "--alpha", "0", "--theta", "1", "--trials",
                           "30", "--checkpoints", "50,500", "--seed", "21",
                           "--output", out,
                           env_extra={"PARTITION_ENTROPY_THREADS": threads})
                self.assertEqual(proc.returncode, 0, proc.stderr)
                with open(out, "rb") as fh:
                    outs.append(fh.read())
            self.assertEqual(outs[0], outs[1])
            self.assertTrue(outs[0])


if __name__ == "__main__":
    CLI = sys.argv.pop(1)
    unittest.main()
