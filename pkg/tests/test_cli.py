import csv
import json
import subprocess
import sys

import pytest

from cocycle_lab.cli import RunConfig, InputError, main

FAST = ["--iterates", "4000", "--phases", "4", "--grid", "1024"]


@pytest.fixture
def m71(tmp_path):
    p = tmp_path / "m71.json"
    p.write_text(json.dumps({"a": [9.0, 0.8], "b": [0.0, 0.0]}))
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_analyze_section_7_1(m71, tmp_path, capsys):
    out = tmp_path / "rep.json"
    assert main(["analyze", "--model", m71, "--energy", "-2", "--eps1", "0.2", "--out", str(out)] + FAST) == 0
    rep = json.loads(out.read_text())
    assert abs(rep["herman"]["eps_H"] - 0.3864) < 1e-3
    assert abs(rep["lower_bound"]["bound"] - 0.727) < 0.01
    assert rep["herman"]["verdict"]["status"] == "Inconclusive"
    assert "epsH = 0.386" in capsys.readouterr().out


def test_analyze_single_term(tmp_path, capsys):
    p = tmp_path / "amo.json"
    p.write_text(json.dumps({"a": [0.5], "b": [0.0]}))
    assert main(["analyze", "--model", str(p), "--energy", "0"] + FAST) == 0
    assert "SubcriticalProven (all spectrum)" in capsys.readouterr().out


def test_analyze_jacobi(tmp_path, capsys):
    p = tmp_path / "jac.json"
    p.write_text(json.dumps({"c": {"lo": 0, "coeffs": [1.0, 0.2]}, "v": {"a": [0.05, 0.02], "b": [0, 0]}}))
    assert main(["analyze", "--model", str(p), "--energy", "0", "--json"] + FAST) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["case"] == "PotentialDominant" and rep["verdict"]["status"] == "SubcriticalProven"


@pytest.mark.parametrize("text", ['{"a": [0.5', '{"a": [0.0], "b": [0.0]}', '{"b": [1]}'])
def test_bad_model_exit_1(tmp_path, text, capsys):
    p = tmp_path / "bad.json"
    p.write_text(text)
    assert main(["analyze", "--model", str(p), "--energy", "0"]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["analyze", "--model", str(tmp_path / "missing.json"), "--energy", "0"]) == 1


def test_bad_config():
    with pytest.raises(InputError):
        RunConfig(alpha=1.5)
    with pytest.raises(InputError):
        RunConfig(tolerances={"accel_h": 0.0})
    assert main(["sweep", "--alpha", "0", "--emin", "0", "--emax", "1"]) == 1


def test_sweep_matches_analyze(m71, tmp_path):
    out = tmp_path / "s.csv"
    args = ["--model", m71, "--eps1", "0.2"] + FAST
    assert main(["sweep", "--emin", "-2.2", "--emax", "-1.8", "--step", "0.2", "--out", str(out)] + args) == 0
    rows = read_csv(out)
    assert rows[0] == ["E", "epsH", "threshold", "verdict", "accel0", "bound"]
    row = {r[0]: r for r in rows[1:]}["-2"]
    rep_path = tmp_path / "a.json"
    main(["analyze", "--energy", "-2", "--out", str(rep_path)] + args)
    rep = json.loads(rep_path.read_text())
    assert row[1] == f"{rep['herman']['eps_H']:.6g}" and row[5] == f"{rep['lower_bound']['bound']:.6g}"
    assert row[3] == rep["herman"]["verdict"]["status"] and int(row[4]) == rep["accel0"]["snapped"]
    assert open(out, "rb").read().count(b"\r\n") == len(rows)


def test_sweep_empty_range(m71, tmp_path):
    out = tmp_path / "e.csv"
    assert main(["sweep", "--model", m71, "--emin", "1", "--emax", "0", "--out", str(out)]) == 0
    assert out.read_bytes() == b"E,epsH,threshold,verdict,accel0,bound\r\n"


def test_sweep_deterministic_across_threads(m71, tmp_path, monkeypatch):
    outs = []
    for n in ("1", "3"):
        monkeypatch.setenv("COCYCLE_LAB_THREADS", n)
        out = tmp_path / f"t{n}.csv"
        main(["sweep", "--model", m71, "--emin", "-1", "--emax", "1", "--step", "0.5", "--out", str(out)] + FAST)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_figure_region_m2(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["figure", "--figure", "region-m2", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["l2", "l1"] and rows[1] == ["0", "1"]
    assert all(float(r[1]) >= 0 for r in rows[1:])


def test_figure_region_compare(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["figure", "--figure", "region-compare", "--step", "0.01", "--out", str(out)]) == 0
    rows = read_csv(out)[1:]
    # the odd-potential region contains the all-energy region
    assert all(float(r[1]) >= float(r[2]) for r in rows)


def test_figure_mcurve(m71, tmp_path):
    out = tmp_path / "m.csv"
    assert main(["figure", "--figure", "mcurve", "--model", m71, "--step", "0.01", "--out", str(out)]) == 0
    data = read_csv(out)[1:]
    rows = {r[0]: r for r in data}
    assert abs(float(rows["0.2"][1]) - 24.242) < 0.01
    cross = next(float(r[0]) for r in data if float(r[1]) > float(r[2]))
    assert 0.15 <= cross <= 0.2


def test_lower_bound_subset_of_sweep(m71, tmp_path):
    lb, sw = tmp_path / "lb.csv", tmp_path / "sw.csv"
    common = ["--model", m71, "--emin", "-3", "--emax", "3", "--eps1", "0.2"]
    assert main(["figure", "--figure", "lower-bound", "--step", "0.5", "--out", str(lb)] + common) == 0
    assert main(["sweep", "--step", "0.1", "--uniform", "--out", str(sw)] + common + FAST) == 0
    sweep = {r[0]: r[5] for r in read_csv(sw)[1:]}
    rows = read_csv(lb)
    assert rows[0] == ["E", "eps1", "epsH", "gamma", "bound", "status"]
    for r in rows[1:]:
        assert sweep[r[0]] == r[4]


def test_unknown_figure(capsys):
    assert main(["figure", "--figure", "nope"]) == 1
    assert "unknown figure" in capsys.readouterr().err


def test_module_entry_point(m71):
    out = subprocess.run([sys.executable, "-m", "cocycle_lab", "figure", "--figure", "region-m2", "--step", "0.1"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("l2,l1")
