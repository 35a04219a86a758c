import json
import math
import os
import subprocess
import sys

import pytest

import _delaytherm as dt


UNIT_CONFIG = {
    "physical": {"rho": 1.0, "bulk": 1.0, "shear": 0.75, "alpha": 1.0, "kappa": 1.0,
                 "c_rho": 1.0, "theta0": 1.0, "l": math.pi},
    "run": {"tau": 0.1, "horizon": 0.3, "n_modes": 4, "dt": 0.005, "dx": math.pi / 16},
    "data": {
        "initial": {"kind": "single_mode", "n": 1, "amplitude": [1.0, 0.5, -0.25]},
        "prehistory": {"kind": "constant"},
        "forcing": {"kind": "zero"},
    },
}


def test_derive_coefficients():
    c = dt.derive_coefficients(rho=1, bulk=1, shear=0.75, alpha=1, kappa=1,
                               c_rho=1, theta0=1, l=1)
    assert c["a"] == pytest.approx(2.0, abs=1e-15)
    assert c["b"] == pytest.approx(1.0, abs=1e-15)
    assert c["c"] == pytest.approx(1.0, abs=1e-15)
    assert c["d"] == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(dt.DomainError, match="bulk"):
        dt.derive_coefficients(rho=1, bulk=0, shear=1, alpha=1, kappa=1,
                               c_rho=1, theta0=1, l=1)


def test_delayed_exp_scalar_values():
    assert dt.delayed_exp_scalar(5.0, 1.0, -2.0) == 0.0
    assert dt.delayed_exp_scalar(1.0, 1.0, -0.5) == pytest.approx(1.0, abs=1e-14)
    assert dt.delayed_exp_scalar(1.0, 1.0, 1.0) == pytest.approx(2.0, abs=1e-14)
    assert dt.delayed_exp_scalar(1.0, 1.0, 2.0) == pytest.approx(3.5, abs=1e-14)


def test_delayed_exp_matrix_nilpotent():
    e = dt.delayed_exp_matrix([[0.0, 1.0], [0.0, 0.0]], 1.0, 1.5)
    assert e[0][0] == pytest.approx(1.0, abs=1e-15)
    assert e[0][1] == pytest.approx(1.5, abs=1e-15)
    assert e[1][1] == pytest.approx(1.0, abs=1e-15)


def test_eigenvalues_against_factored_cubic():
    mu = dt.cubic_eigenvalues(1, {"a": 1.0, "b": 0.0, "c": 1.0, "d": 1.0}, math.pi)
    mu = sorted(mu, key=lambda z: (round(z.real, 9), z.imag))
    assert mu[0] == pytest.approx(-1j, abs=1e-12)
    assert mu[1] == pytest.approx(1j, abs=1e-12)
    assert mu[2] == pytest.approx(1.0, abs=1e-12)


def test_solve_delay_ivp_matches_hand_values():
    out = dt.solve_delay_ivp(m=[[-1.0]], tau=1.0, x0=[1.0],
                             prehistory=[1.0], forcing=None, horizon=2.0,
                             t_grid=[0.0, 1.0, 2.0])
    states = out["states"]
    assert states[1][0] == pytest.approx(2.0, abs=1e-12)
    assert states[2][0] == pytest.approx(3.5, abs=1e-12)

    steps = dt.solve_delay_ivp(m=[[-1.0]], tau=1.0, x0=[1.0],
                               prehistory=[1.0], forcing=None, horizon=2.0,
                               t_grid=[0.0, 1.0, 2.0], method="steps")
    assert steps["states"][2][0] == pytest.approx(3.5, abs=1e-8)


def test_simulate_arrays_shapes_and_traces():
    out = dt.simulate_arrays(json.dumps(UNIT_CONFIG))
    nt, nx = len(out["t"]), len(out["x"])
    assert nt == 61 and nx == 17
    assert len(out["V"]) == nt and len(out["V"][0]) == nx
    for j in range(nt):
        assert abs(out["V"][j][0][0]) <= 1e-10
        assert abs(out["V"][j][nx - 1][0]) <= 1e-10
    assert out["theta"][0][0] == pytest.approx(out["V"][0][0][2], abs=0.0)


def test_converge_slope():
    cfg = json.loads(json.dumps(UNIT_CONFIG))
    cfg["run"]["n_modes"] = 2
    cfg["run"]["horizon"] = 1.0
    cfg["physical"].update({"bulk": 0.625, "shear": 0.28125, "alpha": 1.6, "theta0": 1.0})
    rep = dt.converge(json.dumps(cfg), [0.2, 0.1, 0.05])
    assert rep["slope_defined"]
    assert 0.8 < rep["slope"] < 1.2


def test_config_rejection():
    bad = json.loads(json.dumps(UNIT_CONFIG))
    bad["physical"]["mu"] = 2.0
    with pytest.raises(dt.ConfigError, match=r"physical\.mu"):
        dt.simulate_arrays(json.dumps(bad))


def test_cli_binary_simulate(tmp_path):
    cli = os.environ.get("DELAYTHERM_CLI")
    if not cli or not os.path.exists(cli):
        pytest.skip("CLI binary not available")
    config = tmp_path / "config.json"
    config.write_text(json.dumps(UNIT_CONFIG))
    out_dir = tmp_path / "out"
    proc = subprocess.run([cli, "simulate", "--config", str(config),
                           "--output", str(out_dir)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (out_dir / "field.csv").exists()
    assert (out_dir / "manifest.json").exists()
    header = (out_dir / "field.csv").read_text().splitlines()[0]
    assert header == "t,x,V1,V2,V3,u,theta"


def test_cli_binary_converge(tmp_path):
    cli = os.environ.get("DELAYTHERM_CLI")
    if not cli or not os.path.exists(cli):
        pytest.skip("CLI binary not available")
    cfg = json.loads(json.dumps(UNIT_CONFIG))
    cfg["run"]["n_modes"] = 2
    cfg["run"]["horizon"] = 1.0
    config = tmp_path / "config.json"
    config.write_text(json.dumps(cfg))
    out_dir = tmp_path / "out"
    proc = subprocess.run([cli, "converge", "--config", str(config),
                           "--output", str(out_dir), "--tau-list", "0.2,0.1,0.05"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    rows = (out_dir / "convergence.csv").read_text().splitlines()
    assert rows[0] == "tau,sup_error,bound,bound_satisfied"
    assert len(rows) == 4
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["summary"]["slope_defined"] is True


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
