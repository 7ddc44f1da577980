import json

import pytest
from conftest import CONFIGS, run_cli, write_json

from diracsym import cli

SMALL = {
    "grid": {"n": 128, "L": 16.0},
    "coupling": {"kind": "tensor", "axis": "z"},
    "scenario": {"type": "spin", "C": 0.0},
    "potential": {"form": "quadratic", "params": {"a": 1.0}},
    "window": [0.01, 3.0],
}


def config(tmp_path, **changes):
    return write_json(tmp_path / "cfg.json", {**SMALL, **changes})


def test_missing_config_is_usage_error(tmp_path):
    code, doc = run_cli(["solve1d", "--config", tmp_path / "nope.json", "--out-dir", tmp_path])
    assert code == 1 and doc["status"] == "error"
    assert "not found" in doc["error"]


def test_unknown_key_is_usage_error(tmp_path):
    code, doc = run_cli(["solve1d", "--config", config(tmp_path, colour="red"),
                         "--out-dir", tmp_path])
    assert code == 1
    assert "colour" in doc["error"]


def test_bad_flag_is_usage_error():
    code, doc = run_cli(["verify-generators", "--kind", "scalar", "--samples", "many"])
    assert code == 1


def test_broken_oracle_compare_refused(tmp_path):
    sc = {"type": "broken", "base": "spin", "strength": 0.01}
    code, doc = run_cli(["oracle-compare", "--config", config(tmp_path, scenario=sc),
                         "--out-dir", tmp_path])
    assert code == 1
    assert doc["error"] == "oracle undefined off-condition"


def test_constraint_violation_names_condition(tmp_path):
    code, doc = run_cli(["solve1d", "--config", config(tmp_path, transverse_k=[0.1, 0.0]),
                         "--out-dir", tmp_path])
    assert code == 1
    assert doc["condition"] == "λ×p̂ψ=0"


def test_missing_oracle_root_is_numerical(tmp_path):
    cfg = config(tmp_path, level_count=50, window=[0.01, 1.5])
    code, doc = run_cli(["oracle-compare", "--config", cfg, "--out-dir", tmp_path])
    assert code == 2
    assert "no root" in doc["error"]


def test_help_documents_columns(capsys):
    with pytest.raises(SystemExit) as info:
        cli.run(["oracle-compare", "--help"])
    assert info.value.code == 0
    text = capsys.readouterr().out
    for col in ("E_oracle", "oracle_multiplicity", "solver_multiplicity", "relative_deviation"):
        assert col in text


def test_empty_window_writes_headers(tmp_path):
    code, doc = run_cli(["solve1d", "--config", config(tmp_path, window=[0.01, 0.02]),
                         "--out-dir", tmp_path])
    assert code == 0
    assert (tmp_path / "spectrum.csv").read_text() == (
        "index,E,p_plus_weight,block_label,node_count\n")
    assert (tmp_path / "doublets.csv").read_text().count("\n") == 1


def test_solve1d_reports_and_is_deterministic(tmp_path):
    cfg = config(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    code_a, doc_a = run_cli(["solve1d", "--config", cfg, "--out-dir", a])
    code_b, doc_b = run_cli(["--seed", 3, "solve1d", "--config", cfg, "--out-dir", b])
    assert code_a == code_b == 0
    assert doc_a["passed"]
    for name in ("spectrum.csv", "doublets.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert doc_a["config_digest"] == doc_b["config_digest"]
    assert not [p for p in a.iterdir() if p.name.startswith(".")]


def test_classify_and_algebra(tmp_path):
    code, doc = run_cli(["classify", "--kind", "space_vector", "--axis", "x"])
    assert code == 0
    assert doc["result"]["group"] == "U1"
    code, doc = run_cli(["algebra-verify", "--out-dir", tmp_path])
    assert code == 0 and doc["passed"]


def test_radial_free_config_runs(tmp_path):
    cfg = json.loads((CONFIGS / "radial_spin_oscillator.json").read_text())
    cfg["sigma"] = {"form": "zero"}
    cfg["window"] = [-0.9, 0.9]
    code, doc = run_cli(["solve-radial", "--config", write_json(tmp_path / "free.json", cfg),
                         "--out-dir", tmp_path])
    assert code == 0
    assert (tmp_path / "radial-spectrum.csv").read_text().count("\n") == 1
