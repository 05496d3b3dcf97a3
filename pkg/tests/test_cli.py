import subprocess
import sys

import numpy as np
import pytest

from panelscatter import __version__
from panelscatter.cli import EXIT_CONFIG, EXIT_OK, build_config, main, parse_assignments
from panelscatter.errors import ConfigError


def read_csv(path):
    lines = path.read_text().splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    rows = [ln for ln in lines if not ln.startswith("#")]
    data = np.array([[float(v) for v in ln.split(",")] for ln in rows[1:]])
    return meta, rows[0], data


# --- configuration -------------------------------------------------------------

def test_unknown_key_named(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("abs_k = 1.0\nwavenumber = 2\n")
    assert main(["derive-params", "--config", str(cfg)]) == EXIT_CONFIG
    assert "wavenumber" in capsys.readouterr().err


def test_unknown_override_named(capsys):
    assert main(["derive-params", "bogus=1"]) == EXIT_CONFIG
    assert "bogus" in capsys.readouterr().err


@pytest.mark.parametrize("arg", ["abs_k=abc", "arg_k=0", "nodes=-3", "sweep=phi", "theta0=nan"])
def test_bad_value(arg, capsys):
    assert main(["derive-params", arg]) == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_unknown_figure(capsys):
    assert main(["derive-params", "--figure", "2"]) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert main(["derive-params", "--config", str(tmp_path / "nope.cfg")]) == EXIT_CONFIG


def test_bad_flag():
    assert main(["solve", "--frobnicate"]) == EXIT_CONFIG


def test_config_layers(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# a comment\nabs_k = 2.0  # trailing\n\ntau = 0.01+0.002i\n")
    c = build_config(9, cfg, ["abs_k=3.0"])
    assert c.inputs.abs_k == 3.0
    assert c.tau == 0.01 + 0.002j
    assert c.inputs.d == 0.2  # from the preset


def test_parse_assignments_rejects_garbage():
    with pytest.raises(ConfigError, match="expected"):
        parse_assignments(["no equals sign"], "x")
    assert parse_assignments(["thetas = 0.1; 0.2"], "x")["thetas"] == (0.1, 0.2)


# --- commands --------------------------------------------------------------------

def test_derive_params_fig9(capsys):
    assert main(["derive-params", "--figure", "9"]) == EXIT_OK
    out = capsys.readouterr().out
    line = next(ln for ln in out.splitlines() if ln.startswith("tau"))
    tau = complex(line.split("=")[1].strip().replace("i", "j"))
    assert abs(tau - (0.96881 + 0.17439j)) < 2e-4


def test_solve_fig9(tmp_path, capsys):
    out = tmp_path / "report.txt"
    assert main(["solve", "--figure", "9", "--out", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "tau" in text and "factorization" in text and "FAIL" not in text
    assert out.read_text() == text


def test_theta_sweep_csv(tmp_path, capsys):
    out = tmp_path / "p.csv"
    args = ["solve", "--figure", "3", "--sweep", "theta", "--r", "5", "--out", str(out)]
    assert main(args) == EXIT_OK
    first = out.read_bytes()
    meta, header, data = read_csv(out)
    assert header == "theta_rad,P"
    assert data.shape == (720, 2)
    assert np.all(np.diff(data[:, 0]) > 0)
    assert np.all(data[:, 1] > 0)
    assert any("tau_derived" in m for m in meta)
    assert main(args) == EXIT_OK
    assert out.read_bytes() == first


def test_check_command(capsys):
    assert main(["check", "--figure", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("check")
    assert "boundary_condition" in out


def test_r_sweep_fig7(tmp_path, capsys):
    pytest.importorskip("matplotlib")
    out = tmp_path / "fig7.csv"
    assert main(["sweep", "--figure", "7", "--out", str(out), "--plot", "resolution=50"]) == EXIT_OK
    files = sorted(tmp_path.glob("fig7_theta*.csv"))
    assert len(files) == 5
    for f in files:
        meta, header, data = read_csv(f)
        assert header == "r_m,P"
        assert data.shape == (50, 2)
        assert data[0, 0] == 1.0 and data[-1, 0] == 10.0
    png = tmp_path / "fig7.png"
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_module_version():
    res = subprocess.run([sys.executable, "-m", "panelscatter", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.strip() == __version__
