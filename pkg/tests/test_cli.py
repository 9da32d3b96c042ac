import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from collective_dfs.cli import main
from collective_dfs.modelspec import ModelSpec, ModelSpecError

CASE_II = {"n": 3, "a": {"mode": "uniform", "lambda": 1.0},
           "b": {"preset": "case-ii", "b12": 1.0, "b13": 2.0}}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("n,lines", [
    (3, ["J=3/2 x1", "J=1/2 x2"]),
    (1, ["J=1/2 x1"]),
    (4, ["J=2 x1", "J=1 x3", "J=0 x2"]),
])
def test_decompose(capsys, n, lines):
    code, out, _ = run(capsys, "decompose", "--n", n)
    assert code == 0
    for line in lines:
        assert line in out.splitlines()


def test_decompose_too_large(capsys):
    code, _, err = run(capsys, "decompose", "--n", 9)
    assert code == 2 and "exceeds" in err


def test_cdfs_case_ii_finds_u(capsys, tmp_path):
    path = write_json(tmp_path, "m.json", CASE_II)
    code, out, _ = run(capsys, "cdfs", "--model", path, "--k", 1, "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["cdfs_dimension"] == 1 and rep["df_dimension"] == 2
    x = np.array([complex(*z) for z in rep["cdfs_basis"][0]])
    u = np.zeros(8)
    u[1], u[4] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    assert abs(np.vdot(u, x)) > 1 - 1e-10
    (rest,) = rep["remainder"]
    assert rest["tau2"] == pytest.approx(1.5)   # [DERIVED] v: 2 Var = 4/9 (b12-b13)^2 => tau2 = 3/2


def test_cdfs_uniform_and_random(capsys):
    code, out, _ = run(capsys, "cdfs", "--model", '{"n": 3, "b": {"preset": "uniform", "value": 1.0}}', "--k", 1)
    assert code == 0 and "cdfs dimension=2" in out
    code, out, _ = run(capsys, "cdfs", "--model", '{"n": 4, "b": {"preset": "random", "seed": 7}}', "--k", 1)
    assert code == 0 and "cdfs dimension=0" in out


@pytest.mark.parametrize("model", [
    '{"n": 3, "b": {"preset": "case-ii"}}',
    '{"n": 3, "b": {"preset": "nope"}}',
    '{"n": 3, "b": {"re": [[0, 1], [1, 0]]}}',
    '{"n": 2, "b": {"re": [[0, 1], [2, 0]]}}',
    '{"b": {}}',
    '{"n": 3',
    "/nonexistent/model.json",
])
def test_cdfs_bad_model(capsys, model):
    code, _, err = run(capsys, "cdfs", "--model", model, "--k", 1)
    assert code == 2 and err.startswith("error:")


def test_evolve_singlet(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, stdout, _ = run(capsys, "evolve", "--model", '{"n": 2, "b": {"preset": "uniform", "value": 1.0}}',
                          "--state", "singlet", "--t", 2, "--dt", 0.01, "--out", out)
    assert code == 0 and "final fidelity = 1" in stdout
    rows = read_csv(out)
    assert len(rows) == 201
    assert all(abs(float(r["fidelity"]) - 1) < 1e-12 for r in rows)


def test_evolve_u_stays(capsys, tmp_path):
    out = tmp_path / "u.csv"
    code, _, _ = run(capsys, "evolve", "--model", write_json(tmp_path, "m.json", CASE_II),
                     "--state", "u", "--t", 10, "--dt", 0.01, "--out", out, "--record-every", 10)
    assert code == 0
    assert max(abs(float(r["fidelity"]) - 1) for r in read_csv(out)) < 1e-6


def test_evolve_omega_zero_no_leakage(capsys, tmp_path):
    out = tmp_path / "o.csv"
    code, stdout, _ = run(capsys, "evolve", "--model", '{"n": 4, "b": {"preset": "random", "seed": 3}}',
                          "--state", "omega-zero", "--t", 10, "--dt", 0.01, "--no-dissipator", "--out", out)
    assert code == 0
    leak = float(stdout.split("span(f,g,h) = ")[1])
    assert leak < 1e-9


def test_evolve_state_file_and_json_format(capsys, tmp_path):
    state = write_json(tmp_path, "psi.json", {"re": [0, 1 / np.sqrt(2), -1 / np.sqrt(2), 0]})
    code, stdout, err = run(capsys, "evolve", "--model", '{"n": 2}', "--state", state,
                            "--t", 1, "--dt", 0.02, "--format", "json")
    assert code == 0
    data = json.loads(stdout)
    assert len(data["rows"]) == 51
    assert "final fidelity" in err


@pytest.mark.parametrize("state,n", [("zz", 3), ("singlet", 3), ("omega-zero", 3), ("g", 3)])
def test_evolve_unknown_state(capsys, state, n):
    code, _, err = run(capsys, "evolve", "--model", json.dumps({"n": n}), "--state", state,
                       "--t", 1, "--dt", 0.01)
    assert code == 2 and "state" in err


def test_evolve_guard_and_bad_times(capsys):
    model = '{"n": 2, "b": {"preset": "uniform", "value": 100.0}}'
    code, _, err = run(capsys, "evolve", "--model", model, "--state", "ground", "--t", 1, "--dt", 0.5)
    assert code == 2 and "dt" in err
    code, _, _ = run(capsys, "evolve", "--model", model, "--state", "ground", "--t", -1, "--dt", 0.01)
    assert code == 2


def test_metrics_1b(capsys, tmp_path):
    out = tmp_path / "f.csv"
    code, stdout, _ = run(capsys, "metrics", "--fig", "1b", "--out", out)
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["r", "d_df", "p_df", "product"]
    best = max(rows, key=lambda r: float(r["product"]))
    assert 0.21 <= float(best["r"]) <= 0.24
    assert "maximum" in stdout


def test_metrics_1a_endpoint(capsys):
    code, out, _ = run(capsys, "metrics", "--fig", "1a")
    last = out.strip().splitlines()[-1]
    assert code == 0 and last == "0.5,1,0"


def test_metrics_2(capsys):
    code, out, _ = run(capsys, "metrics", "--fig", "2")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 250
    assert float(rows[0]["p_df_jtot"]) > float(rows[-1]["p_df_jtot"])
    code, _, _ = run(capsys, "metrics", "--fig", "2", "--n", 7)
    assert code == 2


def test_encode4(capsys, tmp_path):
    code, _, err = run(capsys, "encode4", "--b", '{"preset": "uniform", "value": 1.0}')
    assert code == 3 and "Omega" in err
    out = tmp_path / "enc.json"
    code, _, _ = run(capsys, "encode4", "--b", '{"n": 4, "b": {"preset": "random", "seed": 11}}', "--out", out)
    data = json.loads(out.read_text())
    assert code == 0 and max(data["residuals"].values()) < 1e-10
    assert len(data["one_L"]) == 2
    b = [[0, .3, .5, -.2], [.3, 0, .5, -.2], [.5, .5, 0, .9], [-.2, -.2, .9, 0]]
    code, out, _ = run(capsys, "encode4", "--b", json.dumps(b))
    g = json.loads(out)["zero_L"]["fgh"]["g"]
    assert code == 0 and abs(abs(complex(*g)) - 1) < 1e-12
    code, _, _ = run(capsys, "encode4", "--b", json.dumps({"re": np.eye(3).tolist()}))
    assert code == 2


def test_reproduce_figures_deterministic(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("COLLECTIVE_DFS_THREADS", "3")
    assert run(capsys, "reproduce-figures", "--outdir", tmp_path / "a", "--n", 60)[0] == 0
    monkeypatch.setenv("COLLECTIVE_DFS_THREADS", "1")
    assert run(capsys, "reproduce-figures", "--outdir", tmp_path / "b", "--n", 60)[0] == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["fig1a.csv", "fig1b.csv", "fig2.csv", "fig2_series.csv"]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    monkeypatch.setenv("COLLECTIVE_DFS_THREADS", "many")
    assert run(capsys, "reproduce-figures", "--outdir", tmp_path / "c")[0] == 2


def test_model_spec_presets():
    spec = ModelSpec.from_dict({"n": 4, "a": {"mode": "uniform", "lambda": 2.0},
                                "b": {"preset": "four-sym", "b12": 1, "b34": 2, "b23": 3, "b24": 4}})
    assert spec.model.lam == pytest.approx(2.0)
    assert spec.b[0, 3] == spec.b[1, 2] == 3 and spec.b[0, 2] == spec.b[1, 3] == 4
    spec = ModelSpec.from_dict({"n": 2, "a": {"mode": "matrix", "re": [[1, 0], [0, 1]]},
                                "b": {"re": [[0, 1], [1, 0]], "im": [[0, -1], [1, 0]]}})
    assert not spec.model.is_collective and spec.b[0, 1] == 1 - 1j
    with pytest.raises(ModelSpecError):
        ModelSpec.from_dict({"n": 4, "b": {"preset": "case-ii", "b12": 1, "b13": 2}})
    with pytest.raises(ModelSpecError):
        ModelSpec.from_dict({"n": 2, "a": {"mode": "uniform", "lambda": -1}})


@pytest.mark.parametrize("verb", ["decompose", "cdfs", "evolve", "metrics", "encode4", "reproduce-figures"])
def test_help(verb):
    res = subprocess.run([sys.executable, "-m", "collective_dfs", verb, "--help"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "usage" in res.stdout
