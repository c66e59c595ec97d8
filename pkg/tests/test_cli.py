import csv
import json

import numpy as np
import pytest

from psiepistemic import cli
from psiepistemic.constants import PhysicsConstants
from psiepistemic.oracles import wh_production_amplitudes_oracle


def run(tmp_path, command, config=None, *extra):
    out = tmp_path / command
    argv = [command, "--out", str(out), *extra]
    if config is not None:
        tmp_path.mkdir(parents=True, exist_ok=True)
        path = tmp_path / f"{command}.json"
        path.write_text(json.dumps(config))
        argv += ["--config", str(path)]
    return cli.main(argv), out


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_fig1(tmp_path):
    code, out = run(tmp_path, "fig1")
    assert code == 0
    header, data = read_csv(out / "fig1.csv")
    assert header == ["cos_theta", "dGamma_plus", "dGamma_minus", "dGamma_zero"]
    assert data.shape == (201, 4) and np.all(data[:, 1:] >= 0)
    c = PhysicsConstants()
    zero = data[:, 3]
    ratio = c.m_e**2 / c.m_W**2
    assert zero[0] / zero.max() == pytest.approx(ratio, rel=1e-8)
    assert zero[-1] / zero.max() == pytest.approx(ratio, rel=1e-8)
    assert np.argmax(data[:, 2]) == 200 and np.argmax(data[:, 1]) == 0
    assert (out / "fig1.csv").read_text().endswith("\n")


def test_fig2_matches_oracle(tmp_path):
    code, out = run(tmp_path, "fig2")
    assert code == 0
    header, data = read_csv(out / "fig2.csv")
    assert data.shape == (101 * 101, 5) and np.all(data[:, 2:] >= 0)
    grid = data.reshape(101, 101, 5)
    c = PhysicsConstants()
    norm = None
    for i in range(0, 101, 25):
        for j in range(0, 101, 25):
            row = grid[i, j]
            amps = wh_production_amplitudes_oracle(row[0], row[1], 0.0, 500.0, c)
            m2 = np.array([abs(amps[(-1, +1, lam)]) ** 2 for lam in (0, +1, -1)])
            if norm is None:
                # dsigma = K |M|^2 with one kinematic constant K
                nz = np.argmax(m2)
                norm = row[2 + nz] / m2[nz]
            assert row[2:] == pytest.approx(norm * m2, rel=1e-8, abs=1e-14 * norm * m2.max())


def test_povm_table(tmp_path):
    code, out = run(tmp_path, "povm-table", {"povm_table": {"eps": 0.2}})
    assert code == 0
    _, data = read_csv(out / "povm_table.csv")
    assert data.shape == (3, 5)
    assert data[:, 2:].sum(axis=0) == pytest.approx([1, 1, 1], abs=1e-10)


def test_limits(tmp_path):
    code, out = run(tmp_path, "limits")
    assert code == 0
    _, data = read_csv(out / "limits.csv")
    assert np.all(np.diff(data[:, 1:], axis=0) < 0)
    row = data[data[:, 0] == 10**6][0]
    assert row[3] == pytest.approx(3e-6, rel=1e-12)
    summary = json.loads((out / "limits_summary.json").read_text())
    cross = summary["poisson_tighter_than_one_sided_for_n_above"]
    assert cross == pytest.approx(9 / 5.42)
    assert np.all(data[data[:, 0] > cross, 3] < data[data[:, 0] > cross, 2])


def test_pbr_verify(tmp_path):
    code, out = run(tmp_path, "pbr-verify", {"pbr": {"alphas": [np.pi / 2, np.pi / 3, 0.05]}})
    assert code == 0
    with open(out / "pbr_verify.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["feasible"] for r in rows] == ["True", "True", "False"]
    assert float(rows[0]["max_overlap"]) <= 1e-10 and float(rows[0]["completeness"]) <= 1e-10
    assert float(rows[1]["max_overlap"]) <= 1e-8


def test_selftest(tmp_path):
    code, out = run(tmp_path, "selftest")
    assert code == 0
    assert all(json.loads((out / "selftest.json").read_text()).values())


def test_simulate_verdicts(tmp_path):
    code, out = run(tmp_path, "simulate")
    assert code == 0
    assert json.loads((out / "report.json").read_text())["verdict"] == "not excluded"
    code, out = run(tmp_path / "ep", "simulate", {"scenario": {"hypothesis": "Epistemic", "q": 0.1}})
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["verdict"] == "excluded"
    assert set(manifest["outputs"]) == {"counts.csv", "counts.meta.json", "report.json", "config.json"}


def test_byte_identical_reruns(tmp_path):
    cfg = {"scenario": {"process": "WDecayAngular", "lambda_W": 0, "n": 123_456, "edges": [0.0, 1.0, 2.0, np.pi]}}
    _, a = run(tmp_path / "a", "simulate", cfg, "--seed", "9")
    _, b = run(tmp_path / "b", "simulate", cfg, "--seed", "9")
    for name in ("counts.csv", "counts.meta.json", "report.json", "config.json", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    _, c = run(tmp_path / "c", "simulate", cfg, "--seed", "10")
    assert (a / "counts.csv").read_bytes() != (c / "counts.csv").read_bytes()


def test_json_format(tmp_path):
    code, out = run(tmp_path, "limits", None, "--format", "json")
    assert code == 0
    doc = json.loads((out / "limits.json").read_text())
    assert doc["columns"][0] == "n" and len(doc["rows"]) == 7


def test_unknown_key_exit_2(tmp_path, capsys):
    code, out = run(tmp_path, "fig1", {"fig1": {"n_pointz": 3}})
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert "fig1.n_pointz" in err["message"] and err["exit_code"] == 2
    assert json.loads((out / "error.json").read_text())["error"] == "ConfigError"


def test_bad_values_exit_2(tmp_path):
    assert run(tmp_path, "limits", {"limits": {"n_values": [0]}})[0] == 2
    assert run(tmp_path, "fig1", {"constants": {"m_W": -1.0}})[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["fig1", "--config", str(bad), "--out", str(tmp_path / "x")]) == 2


def test_numerical_failure_exit_3(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "selftest_checks", lambda cfg: {"broken": False})
    assert run(tmp_path, "selftest")[0] == 3


def test_io_failure_exit_4(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["fig1", "--out", str(blocker / "sub")]) == 4
    assert cli.main(["fig1", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 4


def test_manifest(tmp_path):
    _, out = run(tmp_path, "fig1", None, "--seed", "4")
    m = json.loads((out / "manifest.json").read_text())
    assert m["seed"] == 4 and m["command"] == "fig1" and len(m["config_sha256"]) == 64
    assert set(m["outputs"]) == {"fig1.csv"}
