from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from sqglab.cli import _float_list, main


def run(argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_vortex_scan_defaults(tmp_path):
    out = tmp_path / "scan.csv"
    assert run(["vortex", "scan", "--out", out]) == 0
    rows = read_csv(out)
    assert rows[0] == ["sigma", "delta"] and len(rows) == 2001
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["status"] == "ok" and meta["command"] == "vortex scan"
    assert meta["parameters"]["alpha"] == 0.5
    assert {"numpy", "scipy", "python", "sqglab"} <= set(meta["versions"])
    assert meta["wall_time_s"] >= 0
    assert meta["results"]["sigma_star"] == pytest.approx(0.6197497605, abs=1e-9)


def test_invalid_alpha_exit_2(tmp_path, capsys):
    assert run(["vortex", "scan", "--alpha", "2.5", "--out", tmp_path / "s.csv"]) == 2
    assert "alpha < 2" in capsys.readouterr().err


def test_unknown_flag_exit_2(tmp_path):
    assert run(["vortex", "scan", "--bogus", "1"]) == 2


def test_module_error_exit_1(tmp_path, capsys):
    # I_{n,1} diverges at sigma = 1
    code = run(["kernel", "eval", "--alpha", "1", "--sigma", "1.0", "--out", tmp_path / "k.csv"])
    assert code == 1
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "DivergenceError"
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["status"] == "error" and meta["error"]["error"] == "DivergenceError"


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("alpha = 0.25\nn = 3\npoints = 50\n")
    out = tmp_path / "scan.csv"
    assert run(["vortex", "scan", "--config", cfg, "--points", "80", "--out", out]) == 0
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["parameters"]["alpha"] == 0.25 and meta["parameters"]["n"] == 3
    assert meta["parameters"]["points"] == 80
    assert len(read_csv(out)) == 81


@pytest.mark.parametrize("text", ["bogus = 1\n", "[section]\nalpha = 0.3\n", "alpha = \n"])
def test_bad_config_exit_2(tmp_path, text):
    cfg = tmp_path / "bad.toml"
    cfg.write_text(text)
    assert run(["vortex", "scan", "--config", cfg, "--out", tmp_path / "s.csv"]) == 2


def test_config_values_are_validated(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("alpha = 3.0\n")
    assert run(["vortex", "scan", "--config", cfg, "--out", tmp_path / "s.csv"]) == 2


def test_float_list():
    assert _float_list("0.1, 0.2") == [0.1, 0.2]
    assert _float_list("lin:0:1:3") == [0.0, 0.5, 1.0]
    assert _float_list("log:1:100:3") == pytest.approx([1.0, 10.0, 100.0])


def test_kernel_commands(tmp_path):
    assert run(["kernel", "eval", "--n", "3", "--alpha", "0", "--sigma", "0.5,2.0",
                "--out", tmp_path / "k.csv"]) == 0
    rows = read_csv(tmp_path / "k.csv")
    assert rows[0][:2] == ["sigma", "I"]
    assert float(rows[1][1]) == pytest.approx(3.141592653589793 / 3 * 0.125)
    assert run(["kernel", "closed-form", "--n", "4", "--out", tmp_path / "c.csv"]) == 0
    assert len(read_csv(tmp_path / "c.csv")) == 5


def test_scaling_table(tmp_path):
    out = tmp_path / "scal.csv"
    assert run(["scaling", "table", "--alpha", "1", "--s", "0.5", "--p", "2", "--a", "0.3",
                "--t-grid", "log:1e-4:1:5", "--out", out]) == 0
    rows = read_csv(out)
    assert rows[0] == ["t", "tau", "theta_factor", "force_factor", "force_integral"]
    theta = [float(r[2]) for r in rows[1:]]
    assert theta == sorted(theta) and theta[0] < theta[-1]
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["results"]["force_integrable"] is True
    # self-similar scaling needs a in (0, 1]
    assert run(["scaling", "table", "--a", "1.2", "--out", out]) == 2


def test_eigenpair_json(tmp_path):
    out = tmp_path / "pair.json"
    assert run(["vortex", "eigenpair", "--n", "2", "--alpha", "0.5", "--out", out]) == 0
    data = json.loads(out.read_text())
    assert data["z"]["im"] > 0


def test_determinism(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / f"r{k}"
        assert run(["simulate", "growth", "--alpha", "0", "--N", "64", "--tau1", "6",
                    "--eps", "1e-5", "--out", d / "growth.csv"]) == 0
        outs.append((d / "growth.csv").read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "sqglab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("sqglab ")
