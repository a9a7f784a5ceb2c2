import csv
import io
import json

import numpy as np
import pytest

from sipsdp import cli
from sipsdp.instances import cylinder_program, halfline, quadratic_family_program, quadratic_family_set
from sipsdp.io import ProblemFileError, load_problem, parse_schedule, problem_from_dict, save_problem
from sipsdp.sdp import import_sdpa, solve


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for key, prob in [("op2", quadratic_family_program()), ("sdr2", quadratic_family_set()),
                      ("cyl", cylinder_program()), ("half", halfline("linear"))]:
        paths[key] = tmp_path / f"{key}.json"
        save_problem(prob, paths[key])
    return paths


def test_roundtrip_problem_file(files):
    prob = load_problem(files["op2"])
    ref = quadratic_family_program()
    assert prob.f == ref.f and prob.p == ref.p and prob.generators == ref.generators
    assert prob.tau == ref.tau and prob.box == ref.box


def _doc(path):
    return json.loads(path.read_text())


def test_bad_exponent_length_names_record(files, capsys):
    doc = _doc(files["op2"])
    doc["constraint_p"][2]["exponents"] = [1, 0]
    files["op2"].write_text(json.dumps(doc))
    code, _, err = run(["solve", files["op2"]], capsys)
    assert code == 1
    assert "constraint_p record 2" in err and "expected 4" in err


def test_invalid_json_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "variables": [1,,]\n}')
    code, _, err = run(["solve", path], capsys)
    assert code == 1 and "line 2" in err


def test_duplicate_names_rejected():
    with pytest.raises(ProblemFileError, match="duplicate"):
        problem_from_dict({"variables": {"x": ["a"], "y": ["a"]}, "objective": [],
                           "constraint_p": []})


def test_tau_unset_and_schedule_parse():
    doc = {"variables": {"x": ["x1"], "y": []}, "objective": [{"exponents": [2], "coeff": 1}],
           "constraint_p": [{"exponents": [0], "coeff": 1}], "tau_K": "unset"}
    assert problem_from_dict(doc).tau is None
    assert parse_schedule("1:1, 2:3,:4,5") == [(1, 1), (2, 3), (None, 4), (None, 5)]
    with pytest.raises(ProblemFileError):
        parse_schedule("1:x")


def test_solve_report_and_determinism(files, capsys):
    code, out, _ = run(["solve", files["op2"], "--t", "1", "--no-timing"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.80942, abs=1e-3)
    assert doc["degrees"] == {"d_x": 2, "d_y": 1, "d_S": 1, "d_K": 1, "d_P": 2}
    assert doc["selected"] == {"r": None, "t": 1}
    assert "seconds" not in out
    _, again, _ = run(["solve", files["op2"], "--t", "1", "--no-timing"], capsys)
    assert again == out


def test_solve_schedule_and_mode(files, capsys):
    code, out, _ = run(["solve", files["half"], "--schedule", "1:1,1:2", "--no-timing",
                        "--tol", "feas_tol=1e-9"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert [(p["r"], p["t"]) for p in doc["points"]] == [(1, 1), (1, 2)]
    assert doc["settings"]["feas_tol"] == 1e-9


def test_solve_precondition_exit(files, capsys):
    code, _, err = run(["solve", files["sdr2"], "--mode", "general", "--r", "1", "--t", "0"], capsys)
    assert code == 3 and "t = 0 < d_K = 1" in err
    doc = _doc(files["half"])
    doc["tau_K"] = "unset"
    files["half"].write_text(json.dumps(doc))
    code, _, err = run(["solve", files["half"]], capsys)
    assert code == 3 and "tau_K" in err


def test_solver_failure_exit(files, capsys):
    code, _, _ = run(["solve", files["half"], "--tol", "max_iter=1"], capsys)
    assert code == 2


def test_usage_errors(files, capsys):
    assert run(["solve", files["op2"], "--bogus"], capsys)[0] == 1
    assert run(["solve", files["op2"], "--tol", "nokey"], capsys)[0] == 1
    assert run(["frobnicate"], capsys)[0] == 1


def test_boundary_csv(files, capsys):
    code, out, _ = run(["boundary", files["sdr2"], "--r", "1", "--t", "1", "-N", "4"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["angle", "x1", "x2", "support_value"]
    assert len(rows) == 5
    for row in rows[1:]:
        angle, x1, x2, val = map(float, row)
        assert val == pytest.approx(np.cos(angle) * x1 + np.sin(angle) * x2, abs=1e-6)
    assert all("%.17g" % float(v) == v for row in rows[1:] for v in row)


def test_boundary_box_toy_matches_oracle(tmp_path, capsys):
    # K = [-1, 1] x [-0.5, 0.5] written as |x1| <= 1, |x2| <= 0.5 over y in [-1, 1]
    doc = {"variables": {"x": ["x1", "x2"], "y": ["y"]},
           "objective": [{"exponents": [0, 0], "coeff": 0}],
           "constraint_p": [{"exponents": [0, 0, 0], "coeff": 1},
                            {"exponents": [2, 0, 0], "coeff": -0.5},
                            {"exponents": [2, 0, 1], "coeff": -0.5},
                            {"exponents": [0, 2, 0], "coeff": -2},
                            {"exponents": [0, 2, 1], "coeff": 2}],
           "index_set": [[{"exponents": [0], "coeff": 1}, {"exponents": [2], "coeff": -1}]],
           "tau_K": 1.2}
    path = tmp_path / "box.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(["boundary", path, "--r", "1", "--t", "1", "-N", "4"], capsys)
    assert code == 0
    vals = [float(r[3]) for r in list(csv.reader(io.StringIO(out)))[1:]]
    np.testing.assert_allclose(vals, [1.0, 0.5, 1.0, 0.5], atol=1e-4)


def test_boundary_empty_and_errors(files, capsys):
    code, out, _ = run(["boundary", files["sdr2"], "-N", "0"], capsys)
    assert code == 0 and out == "angle,x1,x2,support_value\n"
    three = files["half"]
    code, _, err = run(["boundary", three, "-N", "2"], capsys)
    assert code == 3 and "2 x variables" in err


def test_check_commands(files, capsys):
    code, out, _ = run(["check", files["op2"], "sos-convex"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["objective"] and doc["negated_constraint_on_samples"]
    code, out, _ = run(["check", files["sdr2"], "slater", "-0.5,0"], capsys)
    doc = json.loads(out)
    assert doc["slater"]["margin"] == pytest.approx(0.25)
    assert run(["check", files["sdr2"], "slater", "1,2,3"], capsys)[0] == 1
    assert run(["check", files["sdr2"], "eps-star"], capsys)[0] == 1


def test_check_eps_star(tmp_path, capsys):
    doc = {"variables": {"x": ["x1"], "y": []}, "objective": [{"exponents": [0], "coeff": -1}],
           "constraint_p": [{"exponents": [0], "coeff": 1}], "tau_K": 1}
    path = tmp_path / "neg.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(["check", path, "eps-star", "1"], capsys)
    assert code == 0
    assert json.loads(out)["eps_star"] == pytest.approx(1.0, abs=1e-6)


def test_homogenize_command(files, tmp_path, capsys):
    out_path = tmp_path / "hom.json"
    code, _, _ = run(["homogenize", files["half"], "-o", out_path], capsys)
    assert code == 0
    doc = _doc(out_path)
    assert doc["variables"]["y"] == ["y0", "y"]
    assert "generic" in doc["generic_equality"]
    prob = load_problem(out_path)
    assert len(prob.generators) == 4


def test_export_sdpa_command(files, tmp_path, capsys):
    path = tmp_path / "op2.dat-s"
    code, out, _ = run(["export-sdpa", files["op2"], "--relaxation", "sosconvex-dsdp",
                        "--t", "1", "-o", path], capsys)
    assert code == 0 and json.loads(out)["t"] == 1
    rep = solve(import_sdpa(path))
    assert rep.primal_value == pytest.approx(0.80942, abs=1e-3)
