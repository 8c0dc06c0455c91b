"""CLI contract: exit codes, grid parsing, serialization, reproducibility."""

import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest

from uncontrol import cli
from uncontrol.numerics import QuadratureError, QuadratureResult


def run_main(argv, capsys):
    rc = cli.main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    header, data = rows[0], rows[1:]
    return header, [dict(zip(header, row)) for row in data]


def fmt9(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


class TestExitCodes:
    def test_help_is_success(self, capsys):
        rc, out, _ = run_main(["--help"], capsys)
        assert rc == 0
        assert "estimate" in out

    def test_missing_command(self, capsys):
        rc, _, _ = run_main([], capsys)
        assert rc == 2

    def test_unknown_command(self, capsys):
        rc, _, _ = run_main(["frobnicate"], capsys)
        assert rc == 2

    def test_bad_n(self, capsys):
        rc, _, err = run_main(
            ["estimate", "--n", "1", "--epsilon", "0.1", "--trials", "500"], capsys
        )
        assert rc == 2
        assert "error:" in err

    def test_bad_trials(self, capsys):
        rc, _, _ = run_main(
            ["estimate", "--n", "2", "--epsilon", "0.1", "--trials", "50"], capsys
        )
        assert rc == 2

    def test_bad_seed(self, capsys):
        rc, _, _ = run_main(
            ["estimate", "--n", "2", "--epsilon", "0.1", "--trials", "500", "--seed", "-1"],
            capsys,
        )
        assert rc == 2

    def test_per_b_requires_b_norm(self, capsys):
        rc, _, err = run_main(["bound", "--method", "per-b", "--n", "2", "--epsilon", "0.1"], capsys)
        assert rc == 2
        assert "b-norm" in err

    def test_bad_grid(self, capsys):
        rc, _, _ = run_main(
            ["sweep", "--n-list", "2", "--eps-grid", "0:0.5", "--trials", "0"], capsys
        )
        assert rc == 2

    def test_caps_height_domain(self, capsys):
        assert run_main(["caps", "--n", "2", "--height", "1.0"], capsys)[0] == 2
        assert run_main(["caps", "--n", "2", "--height", "-0.1"], capsys)[0] == 2

    def test_bad_tol(self, capsys):
        rc, _, _ = run_main(["exact2", "--epsilon", "0.1", "--tol", "0"], capsys)
        assert rc == 2

    def test_bad_growth_n_max(self, capsys):
        rc, _, _ = run_main(["growth", "--n-max", "1"], capsys)
        assert rc == 2

    def test_mismatched_b_dimension(self, capsys):
        rc, _, _ = run_main(
            ["estimate", "--n", "3", "--epsilon", "0.1", "--trials", "500", "--b", "1,0"],
            capsys,
        )
        assert rc == 2

    def test_numerical_failure_maps_to_3(self, capsys, monkeypatch):
        def exhausted(*args, **kwargs):
            raise QuadratureError("budget", QuadratureResult(0.1, 0.5, 1000))

        monkeypatch.setattr(cli, "p_eps_exact_n2", exhausted)
        rc, _, err = run_main(["exact2", "--epsilon", "0.1"], capsys)
        assert rc == 3
        assert "numerical failure" in err


class TestGridParsing:
    def test_inclusive_stop(self):
        assert cli._parse_grid("0:0.5:0.1") == pytest.approx([0.0, 0.1, 0.2, 0.3, 0.4, 0.5])

    def test_float_noise_still_includes_stop(self):
        # (0.3 - 0) / 0.1 is 2.9999... in binary; the 1e-9 slack recovers 3
        assert len(cli._parse_grid("0:0.3:0.1")) == 4

    def test_non_integral_step_excludes_stop(self):
        grid = cli._parse_grid("0:0.5:0.15")
        assert grid == pytest.approx([0.0, 0.15, 0.3, 0.45])

    def test_degenerate_point(self):
        assert cli._parse_grid("0:0:1") == [0.0]
        assert cli._parse_grid("0.2:0.2:0") == [0.2]

    def test_errors(self):
        for bad in ("0:0.5", "0:0.5:0.1:2", "a:b:c", "0:0.5:-0.1", "1:0:0.1", "0:0.5:0"):
            with pytest.raises(ValueError):
                cli._parse_grid(bad)


class TestKnownValues:
    def test_estimate_eps_zero(self, capsys):
        rc, out, _ = run_main(
            [
                "estimate", "--n", "2", "--epsilon", "0", "--trials", "1000",
                "--seed", "7", "--format", "csv",
            ],
            capsys,
        )
        assert rc == 0
        _, rows = parse_csv(out)
        assert rows[0]["p_hat"] == "0"
        assert rows[0]["successes"] == "0"

    def test_exact2_arcsin_point(self, capsys):
        rc, out, _ = run_main(
            ["exact2", "--epsilon", "1", "--b-norm", "2", "--format", "csv"], capsys
        )
        assert rc == 0
        _, rows = parse_csv(out)
        assert rows[0]["raw"] == "0.666666667"
        assert rows[0]["kind"] == "per_b_exact_n2"

    def test_exact2_zero(self, capsys):
        _, out, _ = run_main(["exact2", "--epsilon", "0", "--format", "csv"], capsys)
        _, rows = parse_csv(out)
        assert rows[0]["raw"] == "0"

    def test_bound_poly_n2(self, capsys):
        _, out, _ = run_main(
            ["bound", "--method", "poly", "--n", "2", "--epsilon", "0.1", "--format", "csv"],
            capsys,
        )
        _, rows = parse_csv(out)
        assert rows[0]["raw"] == "0.250662827"

    def test_bound_per_b(self, capsys):
        _, out, _ = run_main(
            [
                "bound", "--method", "per-b", "--n", "2", "--epsilon", "0.1",
                "--b-norm", "1", "--format", "csv",
            ],
            capsys,
        )
        _, rows = parse_csv(out)
        assert rows[0]["raw"] == "0.2"

    def test_bound_poly_trivial_zero(self, capsys):
        _, out, _ = run_main(
            ["bound", "--method", "poly", "--n", "5", "--epsilon", "0", "--format", "csv"],
            capsys,
        )
        _, rows = parse_csv(out)
        assert rows[0]["raw"] == "0"
        assert rows[0]["clamped"] == "0"

    def test_caps_half_height(self, capsys):
        _, out, _ = run_main(["caps", "--n", "2", "--height", "0.5", "--format", "csv"], capsys)
        _, rows = parse_csv(out)
        row = rows[0]
        assert row["exact"] == "0.333333333"
        assert row["upper"] == f"{math.exp(-0.25):.9g}"
        assert row["lower"] == "0.25"
        assert row["chord_radius"] == "1"

    def test_caps_hemisphere(self, capsys):
        _, out, _ = run_main(["caps", "--n", "4", "--height", "0", "--format", "csv"], capsys)
        _, rows = parse_csv(out)
        assert rows[0]["exact"] == "0.5"

    def test_caps_sandwich_on_output(self, capsys):
        for n, h in ((2, 0.3), (5, 0.0), (8, 0.7)):
            _, out, _ = run_main(
                ["caps", "--n", str(n), "--height", str(h), "--format", "csv"], capsys
            )
            _, rows = parse_csv(out)
            row = rows[0]
            assert float(row["lower"]) <= float(row["exact"]) <= float(row["upper"])

    def test_caps_with_trials(self, capsys):
        rc, out, _ = run_main(
            ["caps", "--n", "3", "--height", "0.3", "--trials", "5000", "--seed", "3"], capsys
        )
        assert rc == 0
        obj = json.loads(out)
        assert obj["trials"] == 5000
        assert obj["seed"] == 3
        assert abs(obj["estimate"] - obj["exact"]) <= 3.0 * obj["std_err"] + 1e-12

    def test_growth_values(self, capsys):
        rc, out, _ = run_main(["growth", "--n-max", "3"], capsys)
        assert rc == 0
        header, rows = parse_csv(out)
        assert header == ["n", "growth_bound"]
        assert rows[0]["growth_bound"] == "2.50662827"
        assert rows[1]["growth_bound"] == "4.78730736"

    def test_growth_strictly_increasing(self, capsys):
        _, out, _ = run_main(["growth", "--n-max", "50"], capsys)
        _, rows = parse_csv(out)
        assert len(rows) == 49
        vals = [float(r["growth_bound"]) for r in rows]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestSweepCommand:
    def test_trivial_all_zero_row(self, capsys):
        rc, out, _ = run_main(
            ["sweep", "--n-list", "2", "--eps-grid", "0:0:1", "--trials", "0"], capsys
        )
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == cli.SWEEP_HEADER
        assert lines[1] == "2,0,,,,,0,0,0,0,0"

    def test_header_has_eleven_columns(self, capsys):
        _, out, _ = run_main(
            ["sweep", "--n-list", "2", "--eps-grid", "0:0:1", "--trials", "0"], capsys
        )
        header, rows = parse_csv(out)
        assert len(header) == 11
        assert ",".join(header) == cli.SWEEP_HEADER

    def test_figure_grid_shape_and_monotonicity(self, capsys):
        rc, out, _ = run_main(
            ["sweep", "--n-list", "2,4,8,16", "--eps-grid", "0:0.5:0.01", "--trials", "0"],
            capsys,
        )
        assert rc == 0
        _, rows = parse_csv(out)
        assert len(rows) == 4 * 51
        by_eps = {}
        for row in rows:
            by_eps.setdefault(row["epsilon"], []).append((int(row["n"]), float(row["bound_poly"])))
        for eps, pairs in by_eps.items():
            pairs.sort()
            vals = [v for _, v in pairs]
            assert all(b >= a for a, b in zip(vals, vals[1:])), eps

    def test_exact_column_only_for_n2(self, capsys):
        _, out, _ = run_main(
            ["sweep", "--n-list", "2,3", "--eps-grid", "0.1:0.1:0", "--trials", "0"], capsys
        )
        _, rows = parse_csv(out)
        assert rows[0]["exact_n2"] != ""
        assert rows[1]["exact_n2"] == ""

    def test_stdout_matches_file_output(self, capsys, tmp_path):
        argv = ["sweep", "--n-list", "2", "--eps-grid", "0:0.2:0.1", "--trials", "200", "--seed", "9"]
        _, out, _ = run_main(argv, capsys)
        path = tmp_path / "s.csv"
        rc, _, _ = run_main(argv + ["--out", str(path)], capsys)
        assert rc == 0
        assert path.read_text(encoding="utf-8") == out

    def test_lf_line_endings(self, tmp_path, capsys):
        path = tmp_path / "s.csv"
        run_main(
            ["sweep", "--n-list", "2", "--eps-grid", "0:0:1", "--trials", "0", "--out", str(path)],
            capsys,
        )
        data = path.read_bytes()
        assert b"\r" not in data
        assert data.endswith(b"\n")

    def test_out_in_missing_directory(self, tmp_path, capsys):
        path = tmp_path / "no_such_dir" / "s.csv"
        rc, _, err = run_main(
            ["sweep", "--n-list", "2", "--eps-grid", "0:0:1", "--trials", "0", "--out", str(path)],
            capsys,
        )
        assert rc == 2
        assert "error:" in err
        assert not path.exists()

    def test_json_format(self, capsys):
        rc, out, _ = run_main(
            [
                "sweep", "--n-list", "2", "--eps-grid", "0.1:0.1:0", "--trials", "200",
                "--seed", "4", "--format", "json",
            ],
            capsys,
        )
        assert rc == 0
        obj = json.loads(out)
        assert obj["schema_version"] == 1
        assert obj["seed"] == 4
        (row,) = obj["rows"]
        for key in cli.SWEEP_HEADER.split(","):
            assert key in row
        for key in ("raw_bound_poly", "raw_bound_integral", "raw_bound_per_b", "raw_exact_n2"):
            assert key in row
        assert row["raw_bound_per_b"] >= row["bound_per_b"]

    def test_csv_json_same_values(self, capsys):
        argv = ["sweep", "--n-list", "2", "--eps-grid", "0.1:0.1:0", "--trials", "200", "--seed", "4"]
        _, out_csv, _ = run_main(argv, capsys)
        _, out_json, _ = run_main(argv + ["--format", "json"], capsys)
        _, rows = parse_csv(out_csv)
        (jrow,) = json.loads(out_json)["rows"]
        for key, cell in rows[0].items():
            assert cell == fmt9(jrow[key]), key


class TestJsonContract:
    def test_every_command_carries_schema_version(self, capsys):
        commands = [
            ["estimate", "--n", "2", "--epsilon", "0.1", "--trials", "200", "--seed", "1"],
            ["exact2", "--epsilon", "0.1"],
            ["bound", "--method", "poly", "--n", "3", "--epsilon", "0.1"],
            ["caps", "--n", "3", "--height", "0.2"],
            ["sweep", "--n-list", "2", "--eps-grid", "0:0:1", "--trials", "0", "--format", "json"],
            ["growth", "--n-max", "4", "--format", "json"],
        ]
        for argv in commands:
            rc, out, _ = run_main(argv, capsys)
            assert rc == 0, argv
            obj = json.loads(out)
            assert obj["schema_version"] == 1, argv

    def test_estimate_csv_json_identity(self, capsys):
        argv = ["estimate", "--n", "2", "--epsilon", "0.3", "--trials", "500", "--seed", "2"]
        _, out_json, _ = run_main(argv, capsys)
        _, out_csv, _ = run_main(argv + ["--format", "csv"], capsys)
        obj = json.loads(out_json)
        _, rows = parse_csv(out_csv)
        for key, cell in rows[0].items():
            assert cell == fmt9(obj[key]), key

    def test_caps_csv_json_identity(self, capsys):
        argv = ["caps", "--n", "4", "--height", "0.4", "--trials", "300", "--seed", "6"]
        _, out_json, _ = run_main(argv, capsys)
        _, out_csv, _ = run_main(argv + ["--format", "csv"], capsys)
        obj = json.loads(out_json)
        _, rows = parse_csv(out_csv)
        for key, cell in rows[0].items():
            assert cell == fmt9(obj[key]), key

    def test_estimate_with_b_matches_direct_estimator(self, capsys):
        rc, out, _ = run_main(
            [
                "estimate", "--n", "2", "--epsilon", "1", "--b", "2,0",
                "--trials", "2000", "--seed", "8",
            ],
            capsys,
        )
        assert rc == 0
        obj = json.loads(out)
        from uncontrol.mc import estimate_p_eps_b
        from uncontrol.sampling import InputVector

        ref = estimate_p_eps_b(2, 1.0, InputVector.from_values([2.0, 0.0]), 2000, 8)
        assert obj["p_hat"] == ref.p_hat
        assert obj["successes"] == ref.successes


class TestSeedResolution:
    def test_env_seed_used(self, capsys, monkeypatch):
        argv = ["estimate", "--n", "2", "--epsilon", "0.3", "--trials", "300"]
        monkeypatch.setenv("UNCONTROL_SEED", "11")
        _, out_env, _ = run_main(argv, capsys)
        monkeypatch.delenv("UNCONTROL_SEED")
        _, out_flag, _ = run_main(argv + ["--seed", "11"], capsys)
        assert out_env == out_flag

    def test_flag_overrides_env(self, capsys, monkeypatch):
        argv = ["estimate", "--n", "2", "--epsilon", "0.3", "--trials", "300"]
        monkeypatch.setenv("UNCONTROL_SEED", "11")
        _, out, _ = run_main(argv + ["--seed", "12"], capsys)
        monkeypatch.delenv("UNCONTROL_SEED")
        _, out_ref, _ = run_main(argv + ["--seed", "12"], capsys)
        assert out == out_ref

    def test_default_seed_zero(self, capsys, monkeypatch):
        monkeypatch.delenv("UNCONTROL_SEED", raising=False)
        argv = ["estimate", "--n", "2", "--epsilon", "0.3", "--trials", "300"]
        _, out_default, _ = run_main(argv, capsys)
        _, out_zero, _ = run_main(argv + ["--seed", "0"], capsys)
        assert out_default == out_zero

    def test_invalid_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("UNCONTROL_SEED", "not-a-number")
        rc, _, err = run_main(["estimate", "--n", "2", "--epsilon", "0.3", "--trials", "300"], capsys)
        assert rc == 2
        assert "UNCONTROL_SEED" in err


class TestWorkerInvariance:
    def test_workers_do_not_change_output(self, capsys):
        argv = ["estimate", "--n", "2", "--epsilon", "0.3", "--trials", "5000", "--seed", "5"]
        _, out1, _ = run_main(argv + ["--workers", "1"], capsys)
        _, out8, _ = run_main(argv + ["--workers", "8"], capsys)
        assert out1 == out8


def _clean_env():
    env = dict(os.environ)
    env.pop("UNCONTROL_SEED", None)
    return env


class TestEndToEnd:
    def test_console_script_byte_identical_sweeps(self, tmp_path):
        f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = [
            "uncontrol", "sweep", "--n-list", "2", "--eps-grid", "0:0.2:0.1",
            "--trials", "300", "--seed", "5",
        ]
        env = _clean_env()
        r1 = subprocess.run(argv + ["--out", str(f1)], env=env, capture_output=True)
        r2 = subprocess.run(argv + ["--out", str(f2)], env=env, capture_output=True)
        assert r1.returncode == 0 and r2.returncode == 0
        assert f1.read_bytes() == f2.read_bytes()

    def test_module_invocation(self):
        r = subprocess.run(
            [sys.executable, "-m", "uncontrol.cli", "exact2", "--epsilon", "1", "--b-norm", "2"],
            env=_clean_env(),
            capture_output=True,
            text=True,
        )
        assert r.returncode == 0
        assert json.loads(r.stdout)["clamped"] == pytest.approx(2.0 / 3.0, rel=1e-12)

    def test_argument_error_exit_code(self):
        r = subprocess.run(
            ["uncontrol", "estimate", "--n", "1", "--epsilon", "0.1"],
            env=_clean_env(),
            capture_output=True,
        )
        assert r.returncode == 2
