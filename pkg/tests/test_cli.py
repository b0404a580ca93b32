import json
import subprocess
import sys

import pytest

from tate_syzygy.cli import (
    EXIT_ERROR,
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    SCHEMA,
    analyze,
    emit_json,
    load_input,
    main,
    parse_range,
    parse_report,
)
from tate_syzygy.presentation import parse_presentation


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_lambda2(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", "lambda2.alg", "--json", str(path))
    assert code == EXIT_OK
    assert "GorensteinOfDimension(1)" in out
    data = json.loads(path.read_text())
    assert data["schema"] == SCHEMA
    assert data["gorenstein"]["status"] == "GorensteinOfDimension" and data["gorenstein"]["d"] == 1
    assert (data["periodicity"]["n"], data["periodicity"]["p"]) == (2, 2)
    assert set(data) >= {"schema", "input", "algebra", "gorenstein", "periodicity", "tables", "checks", "timings_ms"}
    assert data["input"]["digest"].startswith("sha256:")
    assert all(c["pass"] for c in data["checks"])


def test_analyze_lambda1_is_inconclusive(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", "lambda1", "--json", str(path))
    assert code == EXIT_INCONCLUSIVE
    data = json.loads(path.read_text())
    assert data["gorenstein"] == {"status": "NotGorensteinUpTo", "bound": 12, "left": None, "right": None}
    assert data["periodicity"]["n"] == 2
    assert "does not apply" in out


def test_analyze_char2_tate_range(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "analyze", "a_char2.alg", "--range", "-4..6", "--json", str(path))
    assert code == EXIT_OK
    report = parse_report(path.read_text())
    tate = report.table("TateHH")
    assert (tate.low, tate.high) == (-4, 6) and tate.values() == [2] * 11


def test_analyze_gamma1_finite_global_dimension(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", "gamma1.alg", "--json", str(path))
    assert code == EXIT_OK
    report = parse_report(path.read_text())
    assert report.algebra["bimodule_projective_dimension"] == 1
    assert report.table("TateHH").values() == [0] * 11
    assert report.check("finite_global_dimension_tate_zero").passed


def test_field_override(capsys, tmp_path):
    path = tmp_path / "r.json"
    run(capsys, "analyze", "kx2", "--field", "F2", "--range=0..2", "--json", str(path))
    data = json.loads(path.read_text())
    assert data["input"]["field"] == "F2"
    assert (data["periodicity"]["n"], data["periodicity"]["p"]) == (0, 1)


def test_json_round_trip_and_determinism(tmp_path):
    inp = load_input("a.alg")
    r1 = analyze(inp, -2, 3)
    text = emit_json(r1.to_dict())
    assert parse_report(text) == r1
    assert emit_json(parse_report(text).to_dict()) == text
    r2 = analyze(load_input("a.alg"), -2, 3)
    assert emit_json(r2.to_dict()) == text


def test_cli_json_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "analyze", "lambda2", "--seed", "5", "--json", str(a))
    run(capsys, "analyze", "lambda2", "--seed", "5", "--json", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["periodicity"]["seed"] == 5


def test_timings_only_on_request(capsys, tmp_path):
    path = tmp_path / "r.json"
    run(capsys, "analyze", "kx2", "--timings", "--json", str(path))
    assert set(json.loads(path.read_text())["timings_ms"]) == {"main_theorem", "checks"}


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("vertices 1\narrow a : 1 -> 2\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == EXIT_ERROR
    assert "line 2, column 16" in err


def test_missing_file_and_bad_range(capsys):
    assert run(capsys, "analyze", "no-such-file.alg")[0] == EXIT_ERROR
    code, _, err = run(capsys, "analyze", "kx2", "--range", "3..1")
    assert code == EXIT_ERROR and "empty range" in err


def test_parse_range():
    assert parse_range("-4..6") == (-4, 6)
    assert parse_range(" 0 .. 3 ") == (0, 3)


@pytest.mark.parametrize("a,b,dim", [("kx2.alg", "gamma1.alg", 6), ("kx2.alg", "point.alg", 2), ("gamma1.alg", "gamma1.alg", 9)])
def test_tensor_command(capsys, tmp_path, a, b, dim):
    out_path = tmp_path / "t.json"
    code, out, _ = run(capsys, "tensor", a, b, str(out_path))
    assert code == EXIT_OK
    assert f"dim {dim}" in out
    assert json.loads(out_path.read_text())["format"] == "basis-algebra/1"


def test_tensor_dump_feeds_analyze(capsys, tmp_path):
    dump = tmp_path / "gg.json"
    run(capsys, "tensor", "gamma1", "gamma1", str(dump))
    report_path = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", str(dump), "--json", str(report_path))
    assert code == EXIT_OK
    assert json.loads(report_path.read_text())["algebra"]["bimodule_projective_dimension"] == 2


def test_tensor_field_mismatch(capsys, tmp_path):
    code, _, err = run(capsys, "tensor", "a_char2.alg", "gamma1.alg", str(tmp_path / "x.json"))
    assert code == EXIT_ERROR and "field mismatch" in err


def test_resolve_with_bardzell(capsys):
    code, out, _ = run(capsys, "resolve", "lambda2.alg", "--module", "regular-bimodule", "--length", "6", "--bardzell")
    assert code == EXIT_OK
    assert "DISAGREE" not in out and "[pass] bardzell_agreement" in out
    rows = [line.split() for line in out.splitlines() if line[:3].strip().isdigit()]
    assert all(r[3] == "(1,1)" and r[4] == "bardzell" for r in rows if int(r[0]) >= 2)


def test_resolve_projective_terminates(capsys):
    code, out, _ = run(capsys, "resolve", "lambda2.alg", "--module", "projective", "1", "--length", "3")
    assert code == EXIT_OK and "projective dimension 0" in out


def test_resolve_example_algebra_verdicts(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "resolve", "a_char2.alg", "--length", "5", "--json", str(path))
    assert code == EXIT_OK
    assert "[pass] d_squared_zero" in out and "[pass] minimal" in out
    assert json.loads(path.read_text())["checks"] == {"d_squared_zero": True, "minimal": True, "exact": True}


def test_resolve_errors(capsys):
    assert run(capsys, "resolve", "a.alg", "--bardzell")[0] == EXIT_ERROR
    assert run(capsys, "resolve", "lambda2", "--module", "simple", "7")[0] == EXIT_ERROR
    assert run(capsys, "resolve", "lambda2", "--module", "injective", "1")[0] == EXIT_ERROR


@pytest.mark.parametrize("field,branch", [("F2", "odd"), ("Q", "even")])
def test_tensor_check_command(capsys, tmp_path, field, branch):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "tensor-check", "kx2.alg", "gamma1.alg", "--field", field, "--json", str(path))
    assert code == EXIT_OK
    data = json.loads(path.read_text())
    assert data["branch"] == branch and all(data["checks"].values())


def test_tensor_check_hypothesis_failure(capsys):
    code, _, err = run(capsys, "tensor-check", "gamma1.alg", "kx2.alg")
    assert code == EXIT_INCONCLUSIVE and "global dimension" in err


def test_gamma_command(capsys, tmp_path):
    code, out, _ = run(capsys, "gamma", "3", "--field", "Q")
    assert code == EXIT_OK
    pres = parse_presentation(out)
    assert len(pres.quiver.vertices) == 4 and pres.field.is_rational
    target = tmp_path / "g.alg"
    run(capsys, "gamma", "2", "-o", str(target))
    assert load_input(str(target)).algebra.dim == 5
    assert load_input("gamma2").algebra.dim == 5


def test_usage_error_is_exit_one(capsys):
    assert run(capsys, "analyze")[0] == EXIT_ERROR
    assert run(capsys, "--help")[0] == EXIT_OK


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tate_syzygy", "analyze", "kx2", "--field", "Q", "--range", "-1..1"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "periodicity n = 0  p = 2" in proc.stdout
