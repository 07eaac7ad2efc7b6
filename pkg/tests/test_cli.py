import json
import math

import pytest

from insider_arb.cli import ConfigError, EXPERIMENTS, clean, convert_report, effective_config, main, run_experiment
from insider_arb.reporting import Check, ExperimentReport, checks_to_csv, rows_to_csv, serialize


def test_check_rules():
    assert Check("a", 1.0, None, 1.05, 0.1).passed
    assert not Check("a", 1.0, None, 1.2, 0.1).passed
    assert Check("le", 1.0, None, 0.95, 0.1, rule="le").passed
    assert Check("ge", 0.9, None, 0.95, 0.1, rule="ge").passed
    assert not Check("lt", 0.9, None, 0.95, 0.1, rule="lt").passed
    assert Check.flag("f", True).passed and not Check.flag("f", False).passed
    assert not Check("nan", math.nan, None, 0.0, 1.0).passed


def test_report_round_trip():
    rep = ExperimentReport("x", {"seed": 1}, [Check("a", 1.0, 0.1, 1.0, 0.3)], {"t": [{"k": 1}]}, {"seed": 1})
    again = ExperimentReport.from_dict(json.loads(rep.to_json()))
    assert again.to_json() == rep.to_json()
    assert convert_report(rep.to_json(), "json") == rep.to_json()
    csv = convert_report(rep.to_json(), "csv")
    assert len(csv.strip().splitlines()) == len(rep.checks) + 1
    arr = serialize(rep, "json")
    assert convert_report(arr, "csv") == csv


def test_empty_and_csv_helpers():
    assert serialize([], "json") == "[]\n"
    assert checks_to_csv([]).strip() == "name,estimate,se,target,tolerance,pass"
    assert rows_to_csv([]) == ""
    assert rows_to_csv([{"a": 1, "b": None}]) == "a,b\n1,\n"
    with pytest.raises(ValueError):
        serialize([], "xml")


def test_clean():
    import numpy as np
    assert clean({"a": np.float64(1.5), "b": (np.int64(2), math.inf), "c": np.bool_(True)}) == \
        {"a": 1.5, "b": [2, None], "c": True}


def test_config_layering():
    cfg = effective_config("tree-fuzz", {"count": "7", "seed": 1}, None)
    assert cfg == {"count": 7, "seed": 1}
    cfg = effective_config("tree-fuzz", {"count": "7", "seed": 1}, {"count": 9})
    assert cfg["count"] == 9
    cfg = effective_config("entropy-split", {"ns": "8,16", "seed": 2}, None)
    assert cfg["ns"] == (8, 16)
    with pytest.raises(ConfigError):
        effective_config("tree-fuzz", {"seed": 1}, {"bogus": 1})
    with pytest.raises(ConfigError):
        effective_config("tree-fuzz", {"seed": 1}, {"experiment": "converge"})
    with pytest.raises(ConfigError):
        effective_config("tree-fuzz", {}, None)
    with pytest.raises(ConfigError):
        effective_config("tree-fuzz", {"seed": 1, "count": "2.5"}, None)


def test_every_experiment_has_defaults():
    for name, exp in EXPERIMENTS.items():
        assert exp.help and isinstance(exp.defaults, dict), name


def test_main_writes_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "tree-fuzz", "--count", "3", "--seed", "1", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["config"] == {"count": 3, "seed": 1}
    assert rep["meta"]["seed"] == 1 and "runtime" not in rep["meta"]
    assert rep["pass"] is True
    csv = tmp_path / "r.csv"
    assert main(["report", "--format", "csv", "--input", str(out), "--out", str(csv)]) == 0
    assert len(csv.read_text().strip().splitlines()) == len(rep["checks"]) + 1


def test_main_config_file_and_timing(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "prop41-decay", "depth": 6, "ns": [2, 4], "seed": 5}))
    out = tmp_path / "p.json"
    assert main(["run", "prop41-decay", "--config", str(cfg), "--out", str(out), "--timing"]) == 0
    rep = json.loads(out.read_text())
    assert rep["config"]["depth"] == 6 and rep["config"]["ns"] == [2, 4]
    assert "runtime" in rep["meta"]


def test_main_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["run", "tree-fuzz", "--out", str(tmp_path / "x.json")])
    assert e.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1, "seed": 1}))
    with pytest.raises(SystemExit) as e:
        main(["run", "tree-fuzz", "--config", str(bad)])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["report", "--format", "xml", "--input", str(bad)])
    assert e.value.code == 2


def test_failed_check_exit_code(tmp_path):
    out = tmp_path / "s.json"
    code = main(["run", "entropy-split", "--ns", "8,16", "--tolerance", "1e-12", "--seed", "1", "--out", str(out)])
    assert code == 1
    rep = json.loads(out.read_text())
    assert rep["pass"] is False


def test_report_independent_of_threads():
    cfg = effective_config("ui-bound", {"seed": 4, "paths": "2000", "controls": "4"}, None)
    a = run_experiment("ui-bound", cfg, threads=1).to_json()
    b = run_experiment("ui-bound", cfg, threads=16).to_json()
    assert a == b
