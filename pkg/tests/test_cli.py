"""Command-line frontend: DSL parsing, dispatch, report emission, exit
codes."""

import json

import pytest

from artifact.cli import main, parse_problem_file, print_problem

CASE1 = """\
manifold dim 2
vars x y
distribution V = span(d/dy)
truncation 8
equation R order 1 on V: p[1,0] = 0
transversal N: y=0
"""

CASE2_PLANE = """\
manifold dim 2
vars x y
distribution V = span(d/dy)
truncation 8
plane symbol: A = 1; B = x
transversal N: y=0
"""

ISO = """\
manifold dim 2
vars x y
distribution V = span(d/dy)
truncation 8
equation R order 1 on V: p[0,1] = (2*x + x^2)*p[1,0]
equation S order 1 on V: p[0,1] = (2*x + 3*x^2 - 4*x^3 + 9*x^4 - 24*x^5 \
+ 70*x^6 - 216*x^7 + 693*x^8)*p[1,0]
transversal N: y=0
section F order 2: x -> x + x^2; y -> y
"""

CONN_FLAT = """\
manifold dim 3
vars x y z
distribution V = span(d/dy d/dz)
truncation 6
connection C order 1: trivial
"""

CONN_CURVED = """\
manifold dim 3
vars x y z
distribution V = span(d/dy d/dz)
truncation 6
connection C order 1: z[0,0,2] -> y
"""


def run(tmp_path, text, *args):
    f = tmp_path / "problem.lie"
    f.write_text(text)
    return main(["--input", str(f), *args])


def run_json(tmp_path, capsys, text, *args):
    code = run(tmp_path, text, "--format", "json", *args)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_check_integrability(tmp_path, capsys):
    code, doc = run_json(tmp_path, capsys, CASE1,
                         "--command", "check-integrability")
    assert code == 0
    assert doc["schema"] == 1
    assert doc["results"]["verdict"] == "formally_integrable"


def test_json_deterministic(tmp_path, capsys):
    run(tmp_path, CASE1, "--command", "check-integrability",
        "--format", "json")
    first = capsys.readouterr().out
    run(tmp_path, CASE1, "--command", "check-integrability",
        "--format", "json")
    second = capsys.readouterr().out
    assert first == second


def test_prolong_depth(tmp_path, capsys):
    text = CASE1.replace("p[1,0] = 0", "free")
    code, doc = run_json(tmp_path, capsys, text,
                         "--command", "prolong", "--depth", "1")
    assert code == 0
    assert doc["results"]["fiber_dims"] == [3, 6]


def test_symbol_command(tmp_path, capsys):
    code, doc = run_json(tmp_path, capsys, CASE1, "--command", "symbol")
    assert code == 0
    assert doc["results"]["dim"] == 1


def test_classify_plane(tmp_path, capsys):
    code, doc = run_json(tmp_path, capsys, CASE2_PLANE,
                         "--command", "classify-plane")
    assert code == 0
    res = doc["results"]
    assert res["case"] == "Case2"
    assert res["valuation"] == 1
    assert "x*e^y" in res["solution_family"] or "xe^y" in res[
        "solution_family"] or "x" in res["solution_family"]


def test_bracket_table(tmp_path, capsys):
    code, doc = run_json(tmp_path, capsys, CASE1,
                         "--command", "bracket-table")
    assert code == 0
    table = doc["results"]["table"]
    assert table["[Y0,Y1]"]["v"] == ["1", "0"]
    assert table["[Y-1,Y1]"]["v"] == ["0", "0"]


def test_verify_iso_passes(tmp_path, capsys):
    code, doc = run_json(tmp_path, capsys, ISO, "--command", "verify-iso")
    assert code == 0
    assert doc["results"]["passed"] is True


def test_verify_iso_fails_with_exit_one(tmp_path, capsys):
    bad = ISO.replace("693", "694")
    code, doc = run_json(tmp_path, capsys, bad, "--command", "verify-iso")
    assert code == 1
    assert doc["results"]["passed"] is False


def test_connection_curvature(tmp_path, capsys):
    code, doc = run_json(tmp_path, capsys, CONN_FLAT,
                         "--command", "connection-curvature")
    assert code == 0
    assert doc["results"]["flat"] is True
    code, doc = run_json(tmp_path, capsys, CONN_CURVED,
                         "--command", "connection-curvature")
    assert code == 1
    assert doc["results"]["flat"] is False
    assert doc["results"]["witness_pair"] == ["y", "z"]


def test_spencer_d_on_holonomic_section(tmp_path, capsys):
    text = CASE1 + "section S order 2: x -> x + y; y -> y - x\n"
    code, doc = run_json(tmp_path, capsys, text, "--command", "spencer-d")
    assert code == 0
    # holonomic sections have vanishing Spencer derivative
    assert all(not comps for comps in doc["results"].values())


def test_parse_error_exit_two(tmp_path):
    assert run(tmp_path, "manifold dim nonsense\n",
               "--command", "symbol") == 2


def test_order_violation_exit_two(tmp_path):
    text = CASE1.replace("p[1,0]", "p[2,0]")
    assert run(tmp_path, text, "--command", "symbol") == 2


def test_unknown_variable_exit_two(tmp_path):
    text = CASE1.replace("= 0", "= z*p[0,1]")
    assert run(tmp_path, text, "--command", "symbol") == 2


def test_non_regular_exit_three(tmp_path):
    text = CASE1.replace("p[1,0] = 0", "x*p[1,0] = 0")
    assert run(tmp_path, text, "--command", "symbol") == 3


def test_missing_file_exit_two(tmp_path):
    assert main(["--input", str(tmp_path / "absent.lie"),
                 "--command", "symbol"]) == 2


def test_truncation_flag(tmp_path, capsys):
    code, doc = run_json(tmp_path, capsys, CASE1,
                         "--command", "check-integrability",
                         "--truncation", "6")
    assert code == 0
    assert doc["results"]["verdict"] == "formally_integrable"


def test_round_trip_normalization():
    spec = parse_problem_file(CASE1)
    printed = print_problem(spec)
    again = parse_problem_file(printed)
    assert print_problem(again) == printed
