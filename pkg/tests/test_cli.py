import csv
import json

import numpy as np
import pytest

from wolffsys import cli
from wolffsys.cli import PROFILE_COLUMNS, TRACE_COLUMNS, exit_code_for, main
from wolffsys.errors import (AccuracyFailure, ConditionFailure, DegenerateMeasure, InvalidArgument,
                             NumericFailure, ParameterError, SandwichFailure, SupersolutionFailure)
from wolffsys.scenarios import BUNDLED, ScenarioError

SMALL_GRID = "0.01:100:32"


def _stderr_json(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


@pytest.mark.parametrize("exc, code", [
    (ScenarioError("x"), 2),
    (ParameterError("x", "q-range"), 3),
    (InvalidArgument("x"), 3),
    (ConditionFailure("x"), 3),
    (NumericFailure("x"), 4),
    (SupersolutionFailure("x"), 4),
    (DegenerateMeasure("x"), 4),
    (SandwichFailure("x"), 4),
    (AccuracyFailure("x"), 4),
])
def test_exit_code_mapping(exc, code):
    assert exit_code_for(exc) == code


def test_exponents_text(capsys):
    assert main(["exponents", "--p", "2", "--q1", "0.5", "--q2", "0.5"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "gamma1=2"
    assert out[1] == "gamma2=2"


def test_exponents_json(capsys):
    assert main(["exponents", "--p", "2", "--q1", "0.3", "--q2", "0.8", "--json", "--J", "5"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert len(d["delta"]) == 5 and d["gamma1"] > 1


def test_exponents_bad_q(capsys):
    assert main(["exponents", "--p", "2", "--q1", "1.5", "--q2", "0.5"]) == 3
    d = _stderr_json(capsys)
    assert d["exit"] == 3 and d["reason"] == "q-range"


def test_potential_of_dirac(capsys):
    argv = ["potential", "--measure", "dirac", "--n", "3", "--p", "2", "--alpha", "1", "--at", "2"]
    assert main(argv) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.5, rel=1e-14)


def test_riesz_potential_json(capsys):
    argv = ["potential", "--measure", "dirac", "--n", "3", "--p", "2", "--alpha", "1",
            "--at", "1", "4", "--riesz", "2", "--json"]
    assert main(argv) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["kind"] == "riesz"
    assert [row["value"] for row in d["values"]] == pytest.approx([1.0, 0.25], rel=1e-14)


def test_check_pass_and_fail(capsys):
    base = ["--measure", "dirac", "--n", "3", "--p", "2", "--alpha", "1"]
    assert main(["check", "finiteness", *base]) == 0
    assert "finiteness: pass" in capsys.readouterr().out
    assert main(["check", "capacity_ball_scaling", *base]) == 1
    capsys.readouterr()
    assert main(["check", "local_integrability", "--json", *base]) == 1
    d = json.loads(capsys.readouterr().out)
    assert d[0]["pass"] is False and d[0]["constant"] == "inf"


def test_check_unknown_id_is_usage_error(capsys):
    argv = ["check", "bogus", "--measure", "dirac", "--n", "3", "--p", "2", "--alpha", "1"]
    assert main(argv) == 2
    assert _stderr_json(capsys)["error"] == "parse-error"


@pytest.mark.parametrize("argv", [["frobnicate"], ["exponents", "--p", "2"], ["solve", "--bogus"]])
def test_argparse_errors_exit_2(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2


def test_bad_json_scenario(tmp_path, capsys):
    f = tmp_path / "broken.json"
    f.write_text("{not json")
    assert main(["run", str(f)]) == 2
    assert _stderr_json(capsys)["error"] == "parse-error"


def test_unknown_scenario_field(tmp_path, capsys):
    f = tmp_path / "extra.json"
    f.write_text(json.dumps(dict(BUNDLED["zero-measure"], colour="blue")))
    assert main(["run", str(f)]) == 2


def test_run_without_target_is_usage_error(capsys):
    assert main(["run"]) == 2


def test_p_equals_n_refused(tmp_path, capsys):
    assert main(["run", "pde-p-equals-n", "--out", str(tmp_path)]) == 3
    assert _stderr_json(capsys)["reason"] == "p>=n nonexistence"
    assert not any(tmp_path.iterdir())


def test_dirac_solve_refused(tmp_path, capsys):
    assert main(["run", "dirac", "--out", str(tmp_path)]) == 3
    d = _stderr_json(capsys)
    assert d["error"] == "condition-failure" and d["condition"] == "capacity_ball_scaling"


def test_zero_measure_run(tmp_path, capsys):
    assert main(["run", "zero-measure", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "profiles.csv")))
    assert tuple(rows[0]) == PROFILE_COLUMNS
    assert all(float(r["u"]) == 0.0 and float(r["v"]) == 0.0 for r in rows)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["pass"] and report["converged"]


@pytest.fixture(scope="module")
def ball_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("ball")
    code = main(["run", "ball-lebesgue-asym", "--grid", SMALL_GRID, "--out", str(out)])
    return code, out


def test_ball_run_artifacts(ball_run):
    code, out = ball_run
    assert code == 0
    assert {p.name for p in out.iterdir()} == {"profiles.csv", "trace.csv", "report.json", "meta.json"}
    rows = list(csv.DictReader(open(out / "profiles.csv")))
    assert len(rows) >= 32 and tuple(rows[0]) == PROFILE_COLUMNS
    for r in rows:
        u, under, over = float(r["u"]), float(r["under_u"]), float(r["over_u"])
        assert under <= u * (1 + 1e-10) and u <= over * (1 + 1e-10)
    trace = list(csv.DictReader(open(out / "trace.csv")))
    assert tuple(trace[0]) == TRACE_COLUMNS
    report = json.loads((out / "report.json").read_text())
    assert report["pass"] and all(report["checks"].values())
    assert set(report["checks"]) == set(BUNDLED["ball-lebesgue-asym"]["checks"])
    assert report["steps"] == len(trace) - 1


def test_run_is_deterministic(ball_run, tmp_path):
    code, out = ball_run
    assert main(["run", "ball-lebesgue-asym", "--grid", SMALL_GRID, "--out", str(tmp_path)]) == 0
    for name in ("profiles.csv", "trace.csv", "report.json"):
        assert (tmp_path / name).read_bytes() == (out / name).read_bytes()


def test_default_output_dir_from_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("WOLFFSYS_OUT", str(tmp_path))
    assert main(["solve", "--measure", "zero", "--n", "3", "--p", "2", "--alpha", "1"]) == 0
    assert (tmp_path / "zero-n3" / "report.json").exists()


def test_solve_json_stdout(tmp_path, capsys):
    argv = ["solve", "--measure", "zero", "--n", "3", "--p", "2", "--alpha", "1",
            "--json", "--out", str(tmp_path)]
    assert main(argv) == 0
    assert json.loads(capsys.readouterr().out)["scenario"] == "zero-n3"


def test_failed_check_exits_1(tmp_path, monkeypatch, capsys):
    from wolffsys.conditions import ConditionReport
    monkeypatch.setattr(cli, "capacity_ball_scaling",
                        lambda *a, **k: ConditionReport("capacity_ball_scaling", False, np.inf, "stub"))
    sc = dict(BUNDLED["zero-measure"], checks=["converged", "capacity_ball_scaling"])
    f = tmp_path / "z.json"
    f.write_text(json.dumps(sc))
    assert main(["run", str(f), "--out", str(tmp_path / "o")]) == 1
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["checks"] == {"converged": True, "capacity_ball_scaling": False}
    assert "capacity_ball_scaling: FAIL" in capsys.readouterr().out


def test_nonintegrable_weighted_density_is_validation_error(tmp_path, capsys):
    # sigma ~ r^-2.5 keeps W sigma finite away from 0, but v^q d sigma is not
    # locally integrable, so the operator refuses it
    r = np.geomspace(1e-3, 1.0, 40)
    sc = dict(BUNDLED["ball-lebesgue-sym"], checks=["converged"],
              grid={"r_min": 0.01, "r_max": 100, "points": 32},
              measure={"variant": "radial_density", "r": r.tolist(), "values": (r ** -2.5).tolist(),
                       "inner_exponent": -2.5, "tail_exponent": -2.5, "support_radius": 1.0})
    f = tmp_path / "singular.json"
    f.write_text(json.dumps(sc))
    assert main(["run", str(f), "--out", str(tmp_path / "o")]) == 3
    assert _stderr_json(capsys)["error"] == "invalid-argument"
