import json

import pytest

from main import build_parser, context_from_args, main

THICK = ["--lengths", "0.8 1.9 2.3", "--twists", "0.3 0.7 -0.4"]


@pytest.fixture
def shallow_config(tmp_path):
    path = tmp_path / "shallow.json"
    path.write_text(json.dumps({"systole_depth": 6, "jobs": 1}), encoding="utf-8")
    return str(path)


def test_intersect_reports(capsys):
    assert main(["intersect", "a1 a2 b1 b2", "a1 b1 A1 B1"]) == 0
    out = capsys.readouterr().out
    assert "  self: 3" in out
    assert "  separating: true" in out
    assert "pair: 4" in out


def test_intersect_family(capsys):
    assert main(["intersect", "--family", "2", "1", "1"]) == 0
    out = capsys.readouterr().out
    assert "formula: 4" in out
    assert "closed form: 6" in out
    assert "oracle: 6" in out


def test_intersect_power_of_simple_curve(capsys):
    assert main(["intersect", "a1 a1"]) == 0
    assert "  self: 1" in capsys.readouterr().out


def test_quiet_prints_nothing(capsys):
    assert main(["intersect", "a1 a2 b1 b2", "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_parse_error_exit_code(capsys):
    assert main(["intersect", "a1 x9", "--quiet"]) == 2
    assert "WordParseError" in capsys.readouterr().err


def test_domain_error_exit_code():
    assert main(["intersect", "--quiet"]) == 1
    assert main(["length", "a1", "--lengths", "1 2", "--quiet"]) == 1
    assert main(["optimize", "a1", "--quiet"]) == 1


def test_optimize_family_checks_filling(capsys):
    # eta^1 не заполняет: отказ до оптимизации
    assert main(["optimize", "--family", "2", "1", "0", "--quiet"]) == 1
    assert "not filling" in capsys.readouterr().err


def test_length_command(capsys):
    assert main(["length", "a1", "a2", "b1", "b2", *THICK]) == 0
    assert "LENGTH" in capsys.readouterr().out


def test_bounds_without_structure(capsys):
    assert main(["bounds", "--m", "1", "--x", "0.3"]) == 0
    out = capsys.readouterr().out
    assert "collar width r(x)" in out
    assert "closed form (2): 9.977315" in out


def test_bounds_with_collar(capsys, shallow_config):
    assert main(["bounds", "--config", shallow_config, "--m", "3", "--n", "2", *THICK]) == 0
    assert "collar lower bound (m=3, n=2)" in capsys.readouterr().out


def test_flags_override_config(shallow_config):
    args = build_parser().parse_args(["scan", "--config", shallow_config, "--jobs", "3", "--m", "2..4"])
    ctx = context_from_args(args)
    assert ctx.jobs == 3
    assert ctx.get("systole_depth") == 6
    assert ctx.get("scan.m") == "2..4"
    # --m у bounds -- это показатель, а не диапазон скана
    args = build_parser().parse_args(["bounds", "--m", "5"])
    assert context_from_args(args).get("scan.m") == "1..20"


@pytest.mark.slow
def test_optimize_simple_curve_escapes(tmp_path, shallow_config):
    code = main([
        "optimize", "a1", "--allow-nonfilling", "--quiet", "--config", shallow_config,
        "--starts", "3", "--max-evals", "3000", "--tol", "1e-3", "--out", str(tmp_path),
    ])
    assert code == 3


@pytest.mark.slow
def test_optimize_writes_record(tmp_path, shallow_config):
    code = main([
        "optimize", "a1 a2 b1 b2", "--quiet", "--config", shallow_config,
        "--starts", "3", "--max-evals", "3000", "--tol", "1e-3", "--out", str(tmp_path),
    ])
    assert code == 0
    record = json.loads((tmp_path / "optimize.json").read_text(encoding="utf-8"))
    assert record["closed_form"]["agrees"] is True
    assert record["config"]["systole_depth"] == 6


@pytest.mark.slow
def test_optimize_separating_curve_escapes(tmp_path, shallow_config):
    code = main([
        "optimize", "a1 b1 A1 B1", "--allow-nonfilling", "--quiet", "--config", shallow_config,
        "--starts", "2", "--max-evals", "3000", "--tol", "1e-3", "--out", str(tmp_path),
    ])
    assert code == 3
