import json

import numpy as np
import pytest

from phasepom import io
from phasepom.cli import main
from phasepom.config import RunConfig
from phasepom.finite import FiniteHeisenberg, random_state_vector
from phasepom.fock import FockSpace, projector, random_density
from phasepom.phase import PhaseGrid
from phasepom.tomo import forward_model


# ---- serialisation --------------------------------------------------------------


def test_json_floats_use_17_significant_digits():
    text = io.dumps({"x": 0.1, "y": 1 / 3, "z": 2.0, "n": 3, "b": True, "s": None})
    obj = json.loads(text)
    assert obj["x"] == 0.1 and obj["y"] == 1 / 3
    assert "0.10000000000000001" in text
    assert '"z": 2.0' in text and '"n": 3' in text
    assert isinstance(obj["z"], float)


def test_json_rejects_non_finite():
    with pytest.raises(ValueError):
        io.dumps({"x": float("nan")})


def test_matrix_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(0)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    io.write_matrix(A, tmp_path / "a.json")
    B = io.read_matrix(tmp_path / "a.json")
    assert np.array_equal(A, B)
    assert json.loads((tmp_path / "a.json").read_text())["dim"] == 4


def test_matrix_accepts_flat_row_major_entries():
    obj = {"dim": 2, "entries": [[1, 0], [0, 2], [3, 0], [0, 4]]}
    np.testing.assert_array_equal(io.matrix_from_json(obj), np.array([[1, 2j], [3, 4j]]))


@pytest.mark.parametrize("obj", [{"entries": []}, {"dim": 2, "entries": [[1, 0]]}, {"dim": "x", "entries": []}])
def test_matrix_malformed(obj):
    with pytest.raises(io.ParseError):
        io.matrix_from_json(obj)


def test_field_csv_round_trip(tmp_path):
    grid = PhaseGrid(3.0, 31)
    rng = np.random.default_rng(1)
    vals = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    io.write_field_csv(vals, grid, tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "q,p,re,im"
    assert len(lines) == 31 * 31 + 1
    assert lines[1].startswith("-3,-3,")
    back, g = io.read_field_csv(tmp_path / "f.csv")
    assert g == grid
    assert np.array_equal(back, vals)


def test_field_csv_rejects_bad_header(tmp_path):
    (tmp_path / "f.csv").write_text("a,b,c,d\n0,0,0,0\n")
    with pytest.raises(io.ParseError):
        io.read_field_csv(tmp_path / "f.csv")


def test_finite_csv_round_trip(tmp_path):
    vals = np.arange(25).reshape(5, 5) * (1 - 0.5j)
    io.write_finite_csv(vals, 5, tmp_path / "d.csv")
    assert np.array_equal(io.read_finite_csv(tmp_path / "d.csv", 5), vals)


# ---- config ---------------------------------------------------------------------


def test_config_defaults_validate():
    cfg = RunConfig().validate()
    assert (cfg.L, cfg.M, cfg.N, cfg.nphys, cfg.d) == (7.0, 141, 60, 12, 5)


@pytest.mark.parametrize("change", [{"d": 4}, {"M": 140}, {"nphys": 61}, {"L": -1.0}, {"tolerances": {"bogus": 1.0}}])
def test_config_validation_errors(change):
    with pytest.raises(ValueError):
        RunConfig.from_dict(change).validate()


def test_config_merge_keeps_other_tolerances():
    cfg = RunConfig.from_dict({"tolerances": {"neumark": 1e-20}, "seed": 3})
    assert cfg.tolerances["neumark"] == 1e-20
    assert cfg.tolerances["normalization"] == 1e-5
    assert cfg.seed == 3
    with pytest.raises(ValueError):
        RunConfig.from_dict({"colour": "red"})


# ---- command line ----------------------------------------------------------------


@pytest.fixture
def states(tmp_path):
    vac = np.zeros((1, 1), dtype=complex)
    vac[0, 0] = 1
    io.write_matrix(vac, tmp_path / "vac.json")
    T5 = projector(random_state_vector(5, 3))
    W5 = random_density(FockSpace(5, 1), 2, 4)
    io.write_matrix(T5, tmp_path / "T5.json")
    io.write_matrix(W5, tmp_path / "W5.json")
    io.write_matrix(np.eye(5) / 5, tmp_path / "mixed5.json")
    io.write_matrix(np.diag([1.5, -0.5]), tmp_path / "bad.json")
    return tmp_path


def test_husimi_vacuum_peak(states, capsys):
    out = states / "h.csv"
    assert main(["husimi", "--state", str(states / "vac.json"), "--out", str(out), "--L", "5", "--M", "51"]) == 0
    vals, grid = io.read_field_csv(out)
    c = grid.points // 2
    assert vals[c, c] == 1.0
    assert "integral:" in capsys.readouterr().out


def test_husimi_missing_file(states, capsys):
    assert main(["husimi", "--state", str(states / "nope.json"), "--out", str(states / "x.csv")]) == 2
    assert "not found" in capsys.readouterr().err


def test_husimi_invalid_state(states, capsys):
    assert main(["husimi", "--state", str(states / "bad.json"), "--out", str(states / "x.csv")]) == 3
    assert "not a state" in capsys.readouterr().err


def test_husimi_malformed_json(states):
    (states / "junk.json").write_text("{not json")
    assert main(["husimi", "--state", str(states / "junk.json"), "--out", str(states / "x.csv")]) == 2


def test_checks_even_modulus_rejected_before_work(states, capsys):
    assert main(["checks", "--d", "4", "--out", str(states / "c.json")]) == 2
    assert not (states / "c.json").exists()
    assert "odd" in capsys.readouterr().err


def test_checks_tight_tolerance_reports_failure(states):
    path = states / "c.json"
    assert main(["checks", "--regime", "finite", "--tol", "finite_resolution=1e-20", "--out", str(path)]) == 1
    report = json.loads(path.read_text())
    by_name = {c["name"]: c for c in report["result"]["checks"]}
    assert by_name["finite_resolution"]["pass"] is False
    assert by_name["finite_orthogonality"]["pass"] is True
    assert set(by_name["finite_orthogonality"]) >= {"name", "defect", "tolerance", "pass"}


def test_checks_default_config_pass_and_deterministic(states):
    a, b = states / "a.json", states / "b.json"
    assert main(["checks", "--out", str(a)]) == 0
    assert main(["checks", "--out", str(b)]) == 0
    ja, jb = json.loads(a.read_text()), json.loads(b.read_text())
    assert "timestamp" in ja["meta"]
    ja.pop("meta"), jb.pop("meta")
    assert io.dumps(ja) == io.dumps(jb)


def test_checks_config_file(states):
    (states / "cfg.json").write_text(json.dumps({"d": 3, "seed": 9}))
    path = states / "c.json"
    assert main(["checks", "--regime", "finite", "--config", str(states / "cfg.json"), "--out", str(path)]) == 0
    assert json.loads(path.read_text())["config"]["d"] == 3


def test_finite_demo_report(states):
    path = states / "fd.json"
    assert main(["finite-demo", "--d", "5", "--report", str(path), "--tables", str(states / "tables")]) == 0
    report = json.loads(path.read_text())["result"]
    assert report["multiplicity"] == 5
    assert report["passed"] is True
    assert len(list((states / "tables").glob("pi_*.json"))) == 25
    np.testing.assert_allclose(io.read_matrix(states / "tables" / "pi_0_0.json"), np.eye(5))


def _finite_data(states):
    T = io.read_matrix(states / "T5.json")
    W = io.read_matrix(states / "W5.json")
    io.write_finite_csv(forward_model(W, T, FiniteHeisenberg(5)).values, 5, states / "d5.csv")
    return states / "d5.csv"


def test_reconstruct_finite_round_trip(states, capsys):
    data = _finite_data(states)
    args = ["reconstruct", "--regime", "finite", "--data", str(data), "--ref-state", str(states / "T5.json"),
            "--truth", str(states / "W5.json"), "--out", str(states / "What.json"), "--report", str(states / "r.json")]
    assert main(args) == 0
    out = capsys.readouterr().out
    assert "fidelity:" in out
    report = json.loads((states / "r.json").read_text())["result"]
    assert report["defect"] <= 1e-10
    assert {"defect", "damped_modes", "verdict"} <= set(report)
    np.testing.assert_allclose(io.read_matrix(states / "What.json"), io.read_matrix(states / "W5.json"), atol=1e-10)


def test_reconstruct_not_ic_exit_code(states, capsys):
    data = _finite_data(states)
    args = ["reconstruct", "--regime", "finite", "--data", str(data), "--ref-state", str(states / "mixed5.json"),
            "--out", str(states / "x.json")]
    assert main(args) == 4
    assert "not-informationally-complete" in capsys.readouterr().err


def test_reconstruct_without_truth_has_no_fidelity_line(states, capsys):
    data = _finite_data(states)
    args = ["reconstruct", "--regime", "finite", "--data", str(data), "--ref-state", str(states / "T5.json"),
            "--out", str(states / "x.json")]
    assert main(args) == 0
    assert "fidelity" not in capsys.readouterr().out


def test_orthogonality_command(states, capsys):
    assert main(["orthogonality", "--index-max", "1"]) == 0
    assert main(["orthogonality", "--index-max", "4"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_make_state(states):
    path = states / "s.json"
    assert main(["make-state", "--kind", "random", "--dim", "6", "--rank", "2", "--seed", "1", "--out", str(path)]) == 0
    rho = io.read_matrix(path)
    assert rho.shape == (6, 6)
    assert np.trace(rho).real == pytest.approx(1.0)
