import json
import subprocess
import sys

import pytest

from bihardy.classify import Verdict
from bihardy.cli import ConfigError, load_config, main, validate_config
from bihardy.conditions import ConditionReport

HYPERBOLIC_A = """
[geometry]
kind = "Hyperbolic"
dim = 2

[weights.u]
form = "sinh_power"
exponent = -2

[weights.v1]
form = "sinh_power"
exponent = 1

[weights.v2]
form = "sinh_power"
exponent = 1
"""


def write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_default_datum(capsys):
    code, out, _ = run(capsys, "check")
    assert code == 0
    assert "CaseI" in out and "0.707106781187" in out and "23.3238075794" in out


def test_check_unbalanced(capsys, tmp_path):
    cfg = write(tmp_path, '[weights.u]\nform = "power"\nexponent = -5\n')
    code, out, _ = run(capsys, "check", "--config", cfg)
    assert code == 2 and "B1        inf" in out


def test_check_not_covered(capsys, tmp_path):
    cfg = write(tmp_path, "[exponents]\np1 = 2\np2 = 2\nq = 0.8\n")
    code, out, _ = run(capsys, "check", "--config", cfg)
    assert code == 3 and "NotCovered" in out and "q = 0.8" in out


def test_check_json_round_trip(capsys):
    code, out, _ = run(capsys, "check", "--json")
    assert code == 0
    text = out.rstrip("\n")
    assert ConditionReport.from_json(text).to_json() == text
    assert json.dumps(json.loads(text), sort_keys=True, indent=2) == text


def test_classify_hyperbolic_A(capsys, tmp_path):
    code, out, _ = run(capsys, "classify", "--config", write(tmp_path, HYPERBOLIC_A), "--json")
    assert code == 0
    text = out.rstrip("\n")
    v = Verdict.from_json(text)
    assert v.kind == "HoldsSufficient" and v.to_json() == text


def test_classify_exit_codes(capsys, tmp_path):
    unknown = HYPERBOLIC_A.replace("dim = 2", "dim = 3").replace("exponent = -2", "exponent = -5")
    unknown = unknown.replace("exponent = 1", "exponent = 2.5")
    assert run(capsys, "classify", "--config", write(tmp_path, unknown))[0] == 4
    fails = HYPERBOLIC_A.replace("exponent = -2", "exponent = 1")
    assert run(capsys, "classify", "--config", write(tmp_path, fails))[0] == 2
    cover = "[exponents]\np1 = 3\np2 = 3\nq = 2\n"
    assert run(capsys, "classify", "--config", write(tmp_path, cover))[0] == 3


def test_classify_needs_matching_forms(capsys, tmp_path):
    bad = HYPERBOLIC_A.replace('form = "sinh_power"\nexponent = -2', 'form = "power"\nexponent = -2')
    code, _, err = run(capsys, "classify", "--config", write(tmp_path, bad))
    assert code == 1 and "weights.u.form" in err


def test_witness_json_and_csv(capsys, tmp_path):
    out_csv = tmp_path / "trace.csv"
    code, out, _ = run(capsys, "witness", "--budget", "30", "--seed", "4", "--json",
                       "--out", str(out_csv))
    assert code == 0
    payload = json.loads(out)
    assert 0 < payload["evaluations"] <= 30
    assert json.dumps(payload, sort_keys=True, indent=2) == out.rstrip("\n")
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "eval_index,a1,a2,log_tlo,log_thi,ratio" and len(lines) == payload["evaluations"] + 1


def test_witness_deterministic(capsys):
    a = run(capsys, "witness", "--budget", "25", "--seed", "9", "--json")[1]
    b = run(capsys, "witness", "--budget", "25", "--seed", "9", "--json")[1]
    assert a == b


def test_reduce_verify_default_suite(capsys):
    code, out, _ = run(capsys, "reduce-verify", "--json")
    payload = json.loads(out)
    assert code == 0 and payload["pass"] and len(payload["checks"]) == 20


def test_calibrate_table(capsys):
    code, out, _ = run(capsys, "calibrate", "--json")
    payload = json.loads(out)
    ratios = [r["ratio"] for r in payload["rows"]]
    assert code == 0 and len(ratios) == 3
    assert ratios == sorted(ratios) and ratios[-1] < 4.0


def test_out_writes_report(capsys, tmp_path):
    dest = tmp_path / "report.json"
    code, out, _ = run(capsys, "check", "--json", "--out", str(dest))
    assert code == 0 and dest.read_text() == out


@pytest.mark.parametrize("text,field", [
    ("[geometry]\nkind = \"Homogeneous\"\ndim = 4\ncolour = 1\n", "geometry.colour"),
    ("[extra]\nx = 1\n", "[extra]"),
    ("[exponents]\np1 = \"two\"\n", "exponents.p1"),
    ("[weights.u]\nform = \"spline\"\n", "weights.u.form"),
    ("[weights.u]\nform = \"custom\"\nname = \"nope\"\n", "weights.u.name"),
    ("[weights.v1]\nform = \"power\"\nexponent = 1\nshift = 2\n", "weights.v1.shift"),
    ("[witness]\nbudget = 1.5\n", "witness.budget"),
])
def test_config_errors_name_the_field(capsys, tmp_path, text, field):
    code, _, err = run(capsys, "check", "--config", write(tmp_path, text))
    assert code == 1 and field in err


def test_malformed_toml_reports_line(capsys, tmp_path):
    code, _, err = run(capsys, "check", "--config", write(tmp_path, "[geometry\nkind = 1\n"))
    assert code == 1 and "line 1" in err


def test_missing_config_file(capsys, tmp_path):
    code, _, err = run(capsys, "check", "--config", str(tmp_path / "absent.toml"))
    assert code == 1 and "cannot read" in err


def test_invalid_exponent_value(capsys, tmp_path):
    code, _, err = run(capsys, "check", "--config", write(tmp_path, "[exponents]\np1 = 0.5\n"))
    assert code == 1 and "p1" in err


def test_flags_override_config(tmp_path):
    cfg = load_config(write(tmp_path, "[quadrature]\nrel_tol = 1e-6\n"))
    assert cfg["quadrature"]["rel_tol"] == 1e-6
    from bihardy.cli import apply_overrides, build_parser
    args = build_parser().parse_args(["check", "--rel-tol", "1e-8", "--seed", "3"])
    merged = apply_overrides(cfg, args)
    assert merged["quadrature"]["rel_tol"] == 1e-8 and merged["witness"]["seed"] == 3


def test_custom_weight_registry(capsys, tmp_path):
    text = ('[geometry]\nkind = "Homogeneous"\ndim = 1\n'
            '[weights.u]\nform = "custom"\nname = "shifted_power"\nexponent = -5\n'
            '[weights.v1]\nform = "constant"\n[weights.v2]\nform = "constant"\n'
            '[exponents]\np1 = 4\np2 = 4\nq = 1.5\n')
    code, out, _ = run(capsys, "check", "--config", write(tmp_path, text))
    assert code == 0 and "CaseIV" in out


def test_validate_config_rejects_non_table():
    with pytest.raises(ConfigError):
        validate_config({"geometry": 3})


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bihardy", "calibrate"], capture_output=True,
                          text=True, timeout=120)
    assert proc.returncode == 0 and "sharp constant 4" in proc.stdout
