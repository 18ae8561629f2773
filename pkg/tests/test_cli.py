import json

import pytest

from streamsel.cli import main, parse_seeds


def test_parse_seeds():
    assert parse_seeds("0..3") == [0, 1, 2, 3]
    assert parse_seeds("4,7") == [4, 7]


def test_select(ionosphere_path, tmp_path):
    out = tmp_path / "sel.json"
    assert main(["select", "--data", str(ionosphere_path), "--out", str(out)]) == 0
    obj = json.loads(out.read_text())
    assert obj["stop_reason"] == "exhausted" and obj["selected"]


def test_select_stop_k(ionosphere_path, capsys):
    assert main(["select", "--data", str(ionosphere_path), "--stop-k", "3", "--mode", "signed",
                 "--context", "global"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert len(obj["selected"]) <= 3


def test_compare_and_report(ionosphere_path, tmp_path, capsys):
    out = tmp_path / "cmp.json"
    rc = main(["compare", "--data", str(ionosphere_path), "--algorithms", "ogfs,alpha,bogus",
               "--folds", "3", "--out", str(out)])
    assert rc == 0
    assert main(["report", "--in", str(out)]) == 0
    text = capsys.readouterr().out
    assert "ogfs" in text and "ERROR" in text
    assert main(["report", "--in", str(out), "--emit-csv"]) == 0
    assert capsys.readouterr().out.startswith("algorithm,groups,compactness,accuracy")


def test_simulate(tmp_path):
    out = tmp_path / "sim.json"
    rc = main(["simulate", "--n", "60", "--d", "40", "--groups", "4", "--informative", "3",
               "--seeds", "0..1", "--algorithms", "ogfs", "--folds", "3", "--out", str(out)])
    assert rc == 0
    obj = json.loads(out.read_text())
    assert len(obj["reports"]) == 2
    assert obj["reports"][1]["config"]["cv_seed"] == 1
    assert "informative_recovered" in obj["median"]["ogfs"]


@pytest.mark.parametrize("argv", [
    ["select"],
    ["select", "--data", "{p}", "--groups", "tenth"],
    ["select", "--data", "{p}", "--groups", "file:/nonexistent.json"],
    ["compare", "--data", "{p}", "--knn", "2"],
    ["report", "--in", "/nonexistent.json"],
])
def test_config_errors_exit_1(argv, ionosphere_path):
    argv = [a.replace("{p}", str(ionosphere_path)) for a in argv]
    assert main(argv) == 1


def test_data_error_exits_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,y\n1,1\n2,1\n")
    assert main(["select", "--data", str(bad)]) == 2
    assert main(["select", "--data", str(tmp_path / "missing.csv")]) == 2
