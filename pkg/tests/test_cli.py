"""End-to-end CLI runs: reports, exit codes, and reproducibility."""

import json
import math
import subprocess
import sys

import pytest

from merminlab.settings import PlanarSettings, save_settings


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "merminlab", *args],
        capture_output=True,
        text=True,
        timeout=300,
    )
    return proc


def run_json(*args):
    proc = run_cli(*args, "--no-timestamp")
    assert proc.stdout, proc.stderr
    return json.loads(proc.stdout), proc.returncode


class TestVerify:
    def test_small_sweep_passes(self):
        report, code = run_json(
            "verify", "--n-min", "3", "--n-max", "4", "--trials", "3", "--seed", "7"
        )
        assert code == 0
        assert report["overall_pass"] is True
        names = {c["name"] for c in report["checks"]}
        assert names == {
            "chsh_square_expansion",
            "three_particle_square_expansion",
            "mermin_square_expansion",
            "planar_square_diagonal",
        }
        for check in report["checks"]:
            assert check["pass"] is True
            assert check["max_residual"] <= check["tol"]

    def test_impossible_tolerance_fails(self):
        report, code = run_json(
            "verify", "--n-min", "3", "--n-max", "3", "--trials", "2",
            "--tol", "1e-20",
        )
        assert code == 1
        assert report["overall_pass"] is False

    def test_bad_range_is_usage_error(self):
        proc = run_cli("verify", "--n-min", "2")
        assert proc.returncode == 2
        proc = run_cli("verify", "--n-min", "5", "--n-max", "4")
        assert proc.returncode == 2

    def test_byte_identical_reruns(self):
        args = (
            "verify", "--n-min", "3", "--n-max", "3", "--trials", "2",
            "--seed", "11", "--no-timestamp",
        )
        first = run_cli(*args)
        second = run_cli(*args)
        assert first.stdout == second.stdout
        assert first.returncode == second.returncode == 0

    def test_timestamp_present_by_default(self):
        proc = run_cli("verify", "--n-min", "3", "--n-max", "3", "--trials", "1")
        report = json.loads(proc.stdout)
        assert "timestamp" in report
        assert all("wall_time_s" in c for c in report["checks"])


class TestTable:
    def test_csv_rows_frozen(self):
        proc = run_cli("table", "--max-n", "6")
        assert proc.returncode == 0
        assert proc.stdout.splitlines() == [
            "n,lhv_bound,quantum_max,ratio",
            "3,2,4,2",
            "4,4,8,2",
            "5,4,16,4",
            "6,8,32,4",
        ]

    def test_single_row(self):
        proc = run_cli("table", "--max-n", "3")
        assert proc.stdout.splitlines()[1:] == ["3,2,4,2"]

    def test_json_format(self):
        report, code = run_json("table", "--max-n", "4", "--format", "json")
        assert code == 0
        assert report["rows"][-1] == {
            "n": 4, "lhv_bound": 4, "quantum_max": 8, "ratio": 2,
        }

    def test_resource_limit(self):
        proc = run_cli("table", "--max-n", "13")
        assert proc.returncode == 3
        assert "resource" in proc.stderr.lower()


class TestReduce:
    def test_documented_example(self):
        report, code = run_json("reduce", "--n", "6", "--m", "2", "--seed", "1")
        assert code == 0
        red = report["reduction"]
        assert red["factor"] == 4.0
        assert red["residual"] < 1e-10
        assert abs(red["max_abs_ratio"] - 2.0) < 1e-8
        assert abs(red["mu_max_ratio"] - 4.0) < 1e-8

    def test_contract_error(self):
        proc = run_cli("reduce", "--n", "6", "--m", "4")
        assert proc.returncode == 2

    def test_with_settings_file(self, tmp_path):
        path = tmp_path / "base.json"
        save_settings(
            path,
            PlanarSettings(tuple((0.2 * j, 0.2 * j + math.pi / 2) for j in range(5))),
        )
        report, code = run_json(
            "reduce", "--n", "5", "--m", "1", "--settings", str(path)
        )
        assert code == 0
        # maximal survivors: full max |eig| = 2^(n-1) / sqrt(2)
        assert abs(report["reduction"]["max_abs_full"] - 2**4 / math.sqrt(2)) < 1e-6

    def test_settings_n_mismatch(self, tmp_path):
        path = tmp_path / "base.json"
        save_settings(path, PlanarSettings(((0.0, 1.0), (0.0, 1.0))))
        proc = run_cli("reduce", "--n", "5", "--m", "1", "--settings", str(path))
        assert proc.returncode == 2


class TestSpectrum:
    def test_planar_file(self, tmp_path):
        path = tmp_path / "planar.json"
        save_settings(
            path,
            PlanarSettings(tuple((0.0, math.pi / 2) for _ in range(3))),
        )
        report, code = run_json("spectrum", "--settings", str(path))
        assert code == 0
        assert report["n"] == 3
        assert report["max_abs_eigenvalue"] == pytest.approx(4.0)
        assert report["clusters"] == [[-4.0, 1], [0.0, 6], [4.0, 1]]
        assert report["planar"]["degeneracy_paired"] is True

    def test_pairs_file(self, tmp_path):
        path = tmp_path / "pairs.json"
        data = {
            "n": 2,
            "pairs": [
                {"a": [1.0, 0.0, 0.0], "b": [0.0, 1.0, 0.0]},
                {"a": [1.0, 0.0, 0.0], "b": [0.0, 1.0, 0.0]},
            ],
        }
        path.write_text(json.dumps(data))
        report, code = run_json("spectrum", "--settings", str(path))
        assert code == 0
        assert report["max_abs_eigenvalue"] == pytest.approx(2.0)

    def test_missing_file(self):
        proc = run_cli("spectrum", "--settings", "/nonexistent/file.json")
        assert proc.returncode == 2

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 3, "planar": [{"phi": 0.0}]}')
        proc = run_cli("spectrum", "--settings", str(path))
        assert proc.returncode == 2


class TestLhv:
    def test_documented_example(self):
        report, code = run_json("lhv", "--n", "5")
        assert code == 0
        assert report["max_value"] == 4
        assert len(report["witness_a"]) == 5
        assert set(report["witness_a"]) <= {1, -1}

    def test_chsh_family(self):
        report, code = run_json("lhv", "--n", "2", "--family", "chsh")
        assert code == 0
        assert report["max_value"] == 2

    def test_resource_limit(self):
        proc = run_cli("lhv", "--n", "13")
        assert proc.returncode == 3

    def test_contract_error(self):
        proc = run_cli("lhv", "--n", "1")
        assert proc.returncode == 2


class TestOptimize:
    def test_documented_example(self):
        report, code = run_json(
            "optimize", "--n", "4", "--objective", "spectral",
            "--restarts", "8", "--seed", "3",
        )
        assert code == 0
        assert abs(report["best_value"] - 64.0) < 1e-6
        assert all(abs(c) < 1e-3 for c in report["cos_included_angles"])
        assert report["overall_pass"] is True

    def test_ghz_objective(self):
        report, code = run_json(
            "optimize", "--n", "3", "--objective", "ghz", "--seed", "0"
        )
        assert code == 0
        assert abs(report["best_value"] - 4.0) < 1e-6

    def test_deterministic(self):
        args = (
            "optimize", "--n", "3", "--objective", "spectral",
            "--seed", "5", "--no-timestamp",
        )
        assert run_cli(*args).stdout == run_cli(*args).stdout

    def test_bad_n_is_usage_error(self):
        proc = run_cli("optimize", "--n", "2", "--objective", "spectral")
        assert proc.returncode == 2


class TestGlobalFlags:
    def test_unknown_subcommand(self):
        proc = run_cli("frobnicate")
        assert proc.returncode == 2

    def test_seed_overflow_rejected(self):
        proc = run_cli("lhv", "--n", "3", "--seed", str(2**64))
        assert proc.returncode == 2

    def test_console_script_help(self):
        proc = run_cli("--help")
        assert proc.returncode == 0
        for sub in ("verify", "table", "reduce", "spectrum", "lhv", "optimize"):
            assert sub in proc.stdout
