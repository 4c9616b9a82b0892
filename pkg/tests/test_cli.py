import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from sispersist.asymptotics import action_closed_form, action_homogeneous
from sispersist.exact import quasi_stationary
from sispersist.model import spec_from_mapping

CONFIG_MILD = (
    'f = [0.5, 0.5]\n"lambda" = [1.6666666666666667, 0.3333333333333333]\n'
    "mu = [1.0, 1.0]\ngamma = 1.0\ntarget_r0 = 1.2\n"
)
CONFIG_MIXED = (
    'f = [0.5, 0.5]\n"lambda" = [1.5, 0.5]\nmu = [0.8, 1.2]\n'
    "gamma = 1.0\ntarget_r0 = 1.3\n"
)


def run_cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "sispersist", *args],
                          cwd=cwd, capture_output=True, text=True)


def read_csv(path):
    comments, rows = [], []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line.rstrip("\n"))
            else:
                rows.append(line.rstrip("\n"))
    header = rows[0].split(",")
    body = [r.split(",") for r in rows[1:] if r]
    return comments, header, body


def body_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_action_values_match_library(tmp_path):
    (tmp_path / "spec.toml").write_text(CONFIG_MILD)
    res = run_cli(["action", "--config", "spec.toml", "--out", "o"], tmp_path)
    assert res.returncode == 0, res.stderr
    comments, header, body = read_csv(tmp_path / "o" / "action.csv")
    assert header == ["name", "value"]
    values = {row[0]: row[1] for row in body}
    spec = spec_from_mapping({"f": [0.5, 0.5],
                              "lambda": [5 / 3, 1 / 3],
                              "mu": [1.0, 1.0], "gamma": 1.0,
                              "target_r0": 1.2})
    assert float(values["action"]) == pytest.approx(action_closed_form(spec),
                                                    rel=1e-10)
    assert float(values["action_homogeneous"]) == pytest.approx(
        action_homogeneous(1.2), rel=1e-10)
    assert float(values["r0"]) == pytest.approx(1.2, rel=1e-10)
    assert any(c.startswith("# sispersist") for c in comments)
    # no timestamps in provenance: reruns must be byte-stable
    assert not any("time" in c.lower() for c in comments)


def test_action_mixed_heterogeneity_exit_2(tmp_path):
    (tmp_path / "spec.toml").write_text(CONFIG_MIXED)
    res = run_cli(["action", "--config", "spec.toml", "--out", "o"], tmp_path)
    assert res.returncode == 2
    assert "bvp" in res.stderr


def test_missing_config_exit_2(tmp_path):
    res = run_cli(["action", "--config", "nope.toml", "--out", "o"], tmp_path)
    assert res.returncode == 2
    bad = tmp_path / "bad.toml"
    bad.write_text('f = [0.5]\n"lambda" = [1.0]\n')
    res = run_cli(["action", "--config", "bad.toml", "--out", "o"], tmp_path)
    assert res.returncode == 2


def test_exact_tau_matches_library(tmp_path):
    (tmp_path / "spec.toml").write_text(CONFIG_MILD)
    res = run_cli(["exact-tau", "--config", "spec.toml", "--out", "o",
                   "--n-list", "30,40"], tmp_path)
    assert res.returncode == 0, res.stderr
    comments, header, body = read_csv(tmp_path / "o" / "exact_tau.csv")
    assert header[:3] == ["n", "tau", "ln_tau_over_n"]
    spec = spec_from_mapping({"f": [0.5, 0.5],
                              "lambda": [5 / 3, 1 / 3],
                              "mu": [1.0, 1.0], "gamma": 1.0,
                              "target_r0": 1.2})
    for row in body:
        n = int(row[0])
        expect = quasi_stationary(spec, population=n).tau
        assert float(row[1]) == pytest.approx(expect, rel=1e-9)
        assert float(row[2]) == pytest.approx(math.log(expect) / n, rel=1e-9)


def test_rerun_is_byte_identical(tmp_path):
    (tmp_path / "spec.toml").write_text(CONFIG_MILD)
    args = ["simulate", "--config", "spec.toml", "--seed", "4",
            "--n-list", "40", "--replicates", "60", "--t0", "1.0",
            "--tmax", "30"]
    r1 = run_cli([*args, "--out", "a"], tmp_path)
    r2 = run_cli([*args, "--out", "b", "--threads", "4"], tmp_path)
    assert r1.returncode == 0 and r2.returncode == 0
    assert body_bytes(tmp_path / "a" / "simulate.csv") == \
        body_bytes(tmp_path / "b" / "simulate.csv")


def test_figure1_columns_and_asymptotes(tmp_path):
    res = run_cli(["figure1", "--out", "o", "--n-list", "60,80"], tmp_path)
    assert res.returncode == 0, res.stderr
    comments, header, body = read_csv(tmp_path / "o" / "figure1.csv")
    assert header == ["N", "ln_tau_over_N", "action", "action_homog"]
    assert [int(r[0]) for r in body] == [60, 80]
    # reference columns repeat the two asymptote levels on every row
    acts = {r[2] for r in body}
    homs = {r[3] for r in body}
    assert len(acts) == 1 and len(homs) == 1
    assert float(acts.pop()) == pytest.approx(0.0377, abs=1e-4)
    assert float(homs.pop()) == pytest.approx(0.0721, abs=1e-4)


def test_order_check_consistency(tmp_path):
    res = run_cli(["order-check", "--out", "o", "--epsilons", "0,0.3,0.6",
                   "--r0", "1.5"], tmp_path)
    assert res.returncode == 0, res.stderr
    comments, header, body = read_csv(tmp_path / "o" / "order_check.csv")
    assert "consistent" in header
    idx = header.index("consistent")
    assert all(row[idx] == "true" for row in body)
    # actions decrease along the family
    ai = header.index("action_i")
    aj = header.index("action_j")
    pm = header.index("p_majorized")
    for row in body:
        if row[pm] == "true":
            assert float(row[ai]) >= float(row[aj]) - 1e-12


def test_contour_grid_small(tmp_path):
    res = run_cli(["contour-grid", "--out", "o", "--grid", "3",
                   "--threads", "2"], tmp_path)
    assert res.returncode == 0, res.stderr
    comments, header, body = read_csv(tmp_path / "o" / "contour_grid.csv")
    assert header == ["lambda1", "mu1", "beta", "action", "h_residual_max",
                      "converged"]
    assert len(body) == 9
    assert all(row[5] == "true" for row in body)
    # rows sorted by (lambda1, mu1)
    keys = [(float(r[0]), float(r[1])) for r in body]
    assert keys == sorted(keys)


def test_version_flag(tmp_path):
    res = run_cli(["--version"], tmp_path)
    assert res.returncode == 0
    assert "sispersist" in res.stdout
