"""Tests for the command line front end"""

import json
import os
import subprocess
import sys

import pytest
from scipy import special

import cli
from verify import format_float


def run(root_dir, *args, env=None):
    cmd = [sys.executable, os.path.join(root_dir, "cli.py"), *args]
    return subprocess.run(cmd, capture_output=True, text=True, cwd=root_dir, env=env)


def golden(root_dir, name):
    with open(os.path.join(root_dir, "tests", "golden", name), encoding="utf-8") as handle:
        return handle.read()


def test_kernel_at_time_zero_prints_the_delta(root_dir):
    cp = run(root_dir, "kernel", "--s1", "0", "--s2", "0", "--eps", "1", "--t", "0", "--J", "0")
    assert cp.returncode == 0
    assert cp.stdout == "1.0\n"


def test_kernel_csv_schema(root_dir):
    cp = run(root_dir, "kernel", "--s1", "2", "--s2", "1", "--t", "3", "--format", "csv")
    assert cp.returncode == 0
    header, row = cp.stdout.splitlines()
    assert header + "\n" == golden(root_dir, "kernel_header.csv")
    assert row.startswith("2,1,1.0,3.0,0,")


def test_kernel_sweep_rows_follow_the_argument_order(capsys):
    status = cli.main(["kernel", "--s1", "0", "3", "--s2", "1", "--t", "0.5", "4", "--format", "csv", "--workers", "2"])
    assert status == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5
    cells = [line.split(",") for line in lines[1:]]
    assert [(c[0], c[3]) for c in cells] == [("0", "0.5"), ("0", "4.0"), ("3", "0.5"), ("3", "4.0")]
    assert all(float(c[-1]) < 1e-12 for c in cells)


def test_kernel_json_lists_rows(capsys):
    status = cli.main(["kernel", "--s1", "1", "--s2", "0", "--t", "1", "2", "--format", "json"])
    assert status == cli.EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert [row["t"] for row in data["rows"]] == [1.0, 2.0]
    assert all(row["abs_diff"] < 1e-12 for row in data["rows"])


def test_kernel_text_prints_one_value_per_query(capsys):
    assert cli.main(["kernel", "--s1", "0", "--s2", "0", "--t", "0", "1"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "1.0"
    assert float(lines[1]) == pytest.approx(special.ive(0, 2.0) ** 2, rel=1e-12)


def test_kernel_output_is_deterministic(root_dir):
    args = ("kernel", "--s1", "3", "--s2", "-1", "--t", "7.5", "--format", "json")
    assert run(root_dir, *args).stdout == run(root_dir, *args).stdout


def test_expansion_csv_schema(capsys):
    status = cli.main(["expansion", "--kind", "u", "--s1", "1", "--s2", "1", "--t", "20", "40", "--N", "2"])
    assert status == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "kind,s1,s2,eps,t,J,N,value,exact,residual,bound_check"
    assert len(lines) == 3


def test_expansion_at_the_regime_floor_is_accepted(capsys):
    status = cli.main(["expansion", "--s1", "1", "--s2", "0", "--eps", "0.5", "--t", "0.25", "--t0", "1"])
    assert status == cli.EXIT_OK


def test_constants_text_uses_round_trip_floats(capsys):
    assert cli.main(["constants"]) == cli.EXIT_OK
    for line in capsys.readouterr().out.splitlines():
        key, value = line.split(" ", 1)
        if key != "symbol_sign":
            assert value == format_float(float(value))


def test_omega_csv_schema(capsys, root_dir):
    status = cli.main(["omega", "--r", "3", "--psi", "0"])
    assert status == cli.EXIT_OK
    header = capsys.readouterr().out.splitlines()[0]
    assert header + "\n" == golden(root_dir, "omega_header.csv")


def test_constants_json(root_dir):
    cp = run(root_dir, "constants", "--format", "json")
    assert cp.returncode == 0
    data = json.loads(cp.stdout)
    assert sorted(data) == json.loads(golden(root_dir, "constants_keys.json"))
    assert data["total"] == pytest.approx(
        (data["gamma_part"] + data["symbol_part"] + data["boundary_part"]) / (4.0 * 3.141592653589793 ** 2))


@pytest.mark.parametrize(
    "args",
    [
        ("kernel", "--s1", "0", "--s2", "0"),
        ("kernel", "--s1", "0", "--s2", "0", "--t", "1", "--eps", "-1"),
        ("kernel", "--s1", "0", "--s2", "0", "--t", "0", "--J", "1"),
        ("expansion", "--s1", "1", "--s2", "0", "--t", "10", "--N", "5"),
        ("expansion", "--s1", "1", "--s2", "0", "--t", "0.5", "--t0", "1"),
        ("expansion", "--s1", "1", "--s2", "0", "--eps", "0.5", "--t", "0.2", "--t0", "1"),
        ("kernel", "--s1", "0", "--s2", "0", "--t", "1", "--workers", "0"),
        ("verify", "--suite", "no.such.suite"),
        ("frobnicate",),
    ],
)
def test_usage_errors_exit_with_three(root_dir, args):
    cp = run(root_dir, *args)
    assert cp.returncode == cli.EXIT_USAGE
    assert "error" in cp.stderr


def test_version(root_dir):
    cp = run(root_dir, "--version")
    assert cp.returncode == 0
    assert cli.__version__ in cp.stdout


def test_empty_verification_is_not_a_pass(root_dir, tmp_path):
    cp = run(root_dir, "verify", "--suite", "--output-dir", str(tmp_path), "--quiet")
    assert cp.returncode == cli.EXIT_FAIL
    data = json.loads((tmp_path / "report.json").read_text())
    assert data == {"suites": [], "verdict": "EMPTY"}


def test_verify_single_suite(root_dir, tmp_path):
    cp = run(root_dir, "verify", "--suite", "gamma.identity", "--output-dir", str(tmp_path))
    assert cp.returncode == cli.EXIT_OK
    assert cp.stdout.strip() == str(tmp_path / "report.json")
    data = json.loads((tmp_path / "report.json").read_text())
    keys = json.loads(golden(root_dir, "report_keys.json"))
    assert sorted(data) == keys["report"]
    assert sorted(data["suites"][0]) == keys["suite"]
    assert (tmp_path / "gamma.identity.csv").exists()


def test_output_dir_from_environment(root_dir, tmp_path):
    env = dict(os.environ, HEATKERNEL_OUTPUT_DIR=str(tmp_path / "from_env"))
    cp = run(root_dir, "verify", "--suite", "gamma.identity", "--quiet", env=env)
    assert cp.returncode == cli.EXIT_OK
    assert (tmp_path / "from_env" / "report.json").exists()


def test_list_suites(capsys):
    assert cli.main(["verify", "--list"]) == cli.EXIT_OK
    names = capsys.readouterr().out.split()
    assert "expansion.u" in names
    assert names == sorted(names)
