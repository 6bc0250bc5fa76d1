import io
import json
import math
import subprocess
import sys

import pytest

from oracles import FROZEN
from wedgeflow import cli
from wedgeflow.emit import read_csv


def run(argv):
    buf = io.StringIO()
    code = cli.dispatch(argv, stdout=buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 1
    return code, json.loads(lines[0])


def test_angles():
    code, out = run(["angles", "--mach", "2"])
    assert code == 0 and out["status"] == "ok"
    assert out["theta_d_deg"] == pytest.approx(FROZEN["euler_theta_d_deg"], abs=1e-9)
    assert out["theta_s_deg"] == pytest.approx(FROZEN["euler_theta_s_deg"], abs=1e-9)
    code, out = run(["angles", "--mach", "2", "--model", "potential", "--rho0", "1"])
    # mach is u10/c0 with c0 = 1 here
    assert out["theta_d_deg"] == pytest.approx(FROZEN["pot_theta_d_deg"], abs=1e-9)


def test_wedge_attached_and_detached(tmp_path):
    code, out = run(["wedge", "--theta-deg", "10", "--out", str(tmp_path)])
    assert code == 0
    assert out["weak"]["beta_deg"] == pytest.approx(FROZEN["euler_weak_beta_10_deg"], abs=1e-9)
    assert out["strong"]["beta_deg"] == pytest.approx(FROZEN["euler_strong_beta_10_deg"], abs=1e-9)
    assert json.loads((tmp_path / "summary.json").read_text()) == out
    code, out = run(["wedge", "--theta-deg", "25"])
    assert code == 3 and out["error"] == "Detached"


@pytest.mark.parametrize("argv", [
    ["wedge", "--mach", "0.5"],
    ["wedge", "--theta-deg", "-1"],
    ["polar", "--n", "1"],
    ["glimm", "--cfl", "1.5"],
    ["unsteady", "--cfl", "0.7"],
    ["selfsim", "--u10", "0.5"],
    ["unsteady", "--init", "sideways"],
    ["unsteady", "--init", "strong", "--theta-w-deg", "0"],
])
def test_invalid_input_exits_2(argv):
    code, out = run(argv)
    assert code == 2 and "error" in out


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schema_version": "1", "mach": 3.0}))
    _, a = run(["angles", "--config", str(cfg)])
    assert a["mach"] == 3.0
    _, b = run(["angles", "--config", str(cfg), "--mach", "2"])
    assert b["mach"] == 2.0
    cfg.write_text(json.dumps({"mach": 2.0, "nonsense": 1}))
    code, out = run(["angles", "--config", str(cfg)])
    assert code == 2 and "nonsense" in out["message"]
    cfg.write_text(json.dumps({"schema_version": "7"}))
    assert run(["angles", "--config", str(cfg)])[0] == 2


def test_gas_object_overrides_gamma():
    _, a = run(["angles", "--gas", json.dumps({"gamma": 1.4}), "--gamma", "1.2"])
    assert a["gamma"] == 1.4
    assert run(["angles", "--gas", json.dumps({"cv": 1})])[0] == 2


def test_help_lists_keys_and_units():
    text = cli.build_parser()._subparsers._group_actions[0].choices["glimm"].format_help()
    for key in ("--mach", "--dx2", "--ncells", "--seed", "--wedge-table", "--cauchy"):
        assert key in text
    assert "deg" in text and "default" in text
    r = subprocess.run([sys.executable, "-m", "wedgeflow", "unsteady", "--help"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "--nx" in r.stdout and "field.csv" in r.stdout


def test_polar_files(tmp_path):
    code, out = run(["polar", "--n", "50", "--out", str(tmp_path)])
    assert code == 0
    header, rows = read_csv(tmp_path / "polar.csv")
    assert header[0] == "beta_rad" and len(rows) == 50
    mu = math.asin(0.5)
    assert all(mu <= r[0] <= math.pi / 2 + 1e-15 for r in rows)


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


@pytest.mark.parametrize("argv", [
    ["glimm", "--x1-max", "5", "--ncells", "60", "--cauchy", '{"kind": "step", "amplitude": 0.01}'],
    ["selfsim"],
    ["unsteady", "--nx", "32", "--ny", "16", "--t-max", "20", "--check-every", "10"],
])
def test_outputs_are_reproducible(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(argv + ["--out", str(a)])[0] == 0
    assert run(argv + ["--out", str(b)])[0] == 0
    fa, fb = _files(a), _files(b)
    assert set(cli.OUTPUTS[argv[0]].replace(",", " ").split()) >= set(fa)
    assert fa == fb


def test_glimm_seed_from_environment(tmp_path, monkeypatch):
    argv = ["glimm", "--x1-max", "5", "--ncells", "60", "--cauchy", '{"kind": "bump", "amplitude": 0.01}']
    _, base = run(argv + ["--seed", "0"])
    monkeypatch.setenv("WEDGEFLOW_SEED", "5")
    _, env = run(argv + ["--seed", "0"])
    assert env["seed"] == 5 and env["max_tv"] != base["max_tv"]
    monkeypatch.setenv("WEDGEFLOW_SEED", "x")
    assert run(argv)[0] == 2


def test_unsteady_nonconvergence_writes_partial(tmp_path):
    code, out = run(["unsteady", "--nx", "32", "--ny", "16", "--t-max", "0.5", "--out", str(tmp_path)])
    assert code == 3 and out["error"] == "NonConvergence"
    assert out["partial"]["steps"] > 0
    assert (tmp_path / "convergence.csv").exists()
