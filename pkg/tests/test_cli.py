import json
import subprocess
import sys
from pathlib import Path

import pytest

from berkstab.cli import main, parse_norm
from berkstab.symnorm import lp

ROOT = Path(__file__).resolve().parent.parent
SAMPLES = ROOT / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data, indent=2))
    return path


def test_parse_norm():
    assert parse_norm("l2").p == 2
    assert parse_norm("linf") == lp("inf", 1)
    assert parse_norm("lp:3").p == 3
    assert parse_norm("topk:2,1").kind == "topk"
    with pytest.raises(ValueError):
        parse_norm("lq")


def test_curve_mabuchi_prod_prints_zero(capsys):
    assert run(capsys, "curve", "mabuchi", SAMPLES / "PROD.json") == (0, "0\n", "")


def test_curve_scalars(capsys):
    twopt = SAMPLES / "TWOPT.json"
    assert run(capsys, "curve", "energy", twopt)[1] == "1/4\n"
    assert run(capsys, "curve", "entropy", twopt)[1] == "1\n"
    assert run(capsys, "curve", "eval", twopt, "--point", "0", "--c", "1/2")[1] == "1/4\n"
    assert run(capsys, "curve", "d1", SAMPLES / "PROD.json", SAMPLES / "T0.json")[1] == "1/2\n"
    code, out, _ = run(capsys, "curve", "energy", twopt, "--format", "json")
    assert code == 0 and json.loads(out) == {"energy": "1/4"}


def test_curve_ma_and_solve_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "curve", "ma", SAMPLES / "TWOPT.json")
    assert code == 0
    measure = write(tmp_path, "mu.json", json.loads(out))
    code, out, _ = run(capsys, "curve", "solve-ma", measure)
    assert code == 0
    phi = write(tmp_path, "phi.json", json.loads(out))
    code, out, _ = run(capsys, "curve", "ma", phi)
    assert code == 0 and json.loads(out)["atoms"] == json.loads(measure.read_text())["atoms"]
    assert run(capsys, "curve", "dual-energy", SAMPLES / "measures" / "two_atoms.json")[1] == "1/4\n"


def test_report_csv_and_verdict(capsys):
    code, out, err = run(capsys, "curve", "report", *(SAMPLES / f"{k}.json" for k in ("PROD", "T0", "TWOPT")))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "name,E,R,H,M,d1,ratio,verdict"
    assert lines[1:] == [
        "PROD,1/2,-2,1,0,1/4,0,product-type",
        "T0,0,0,0,0,0,inf,constant",
        "TWOPT,1/4,-1,1,1/2,1/8,4,positive",
    ]
    assert "uniform K̂-stability fails" in err


def test_report_json(capsys):
    code, out, _ = run(capsys, "curve", "report", SAMPLES / "TWOPT.json", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["sigma"] == "4"


def test_profile_dot(capsys):
    code, out, _ = run(capsys, "curve", "profile", SAMPLES / "TWOPT.json", "--format", "dot")
    assert code == 0 and out.startswith('digraph "TWOPT"')


def test_infeasible_solve_ma_exits_1(capsys, tmp_path):
    bad = write(tmp_path, "bad.json", {"atoms": [{"point": "0", "c": "1", "mass": "1"}, {"point": "inf", "c": "1", "mass": "1/2"}]})
    code, _, err = run(capsys, "curve", "solve-ma", bad)
    assert code == 1 and "infeasible" in err


def test_malformed_input_exits_2_with_line_and_field(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "m": 1,\n  "sections": [\n    {"zeros": {"0": 1}, "lambda": "x"},\n    {"zeros": {"inf": 1}, "lambda": 0}\n  ]\n}\n')
    code, _, err = run(capsys, "curve", "energy", path)
    assert code == 2
    assert f"{path}:4: field 'sections[0].lambda'" in err
    path.write_text("{ not json")
    assert run(capsys, "curve", "energy", path)[0] == 2
    assert run(capsys, "curve", "energy", tmp_path / "missing.json")[0] == 2
    assert run(capsys, "curve", "eval", SAMPLES / "PROD.json", "--point", "0")[0] == 2
    assert run(capsys, "curve", "energy", SAMPLES / "PROD.json", "--horizon", "-1")[0] == 2


def test_herm_and_na_commands(capsys, tmp_path):
    a = write(tmp_path, "a.json", {"gram": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]})
    b = write(tmp_path, "b.json", {"basis": [["1", "0"], ["0", "1"]], "values": ["1", "2"]})
    code, out, _ = run(capsys, "herm", "dist", a, b, "--norm", "l1")
    assert code == 0 and float(out) == pytest.approx(3, abs=1e-12)
    code, out, _ = run(capsys, "herm", "geodesic", a, b, "--t", "0.5")
    assert code == 0 and "gram" in json.loads(out)
    code, out, _ = run(capsys, "herm", "codiag", a, b)
    assert code == 0 and sorted(float(x) for x in json.loads(out)["mu_prime"]) == pytest.approx([1, 2])
    code, out, _ = run(capsys, "herm", "convexity", a, b, b, a, "--norm", "l2")
    assert code == 0 and float(out) <= 1e-8

    n1 = write(tmp_path, "n1.json", {"basis": [["1", "1"], ["0", "1"]], "values": ["1", "0"]})
    n2 = write(tmp_path, "n2.json", {"basis": [["1", "0"], ["0", "1"]], "values": ["0", "1"]})
    code, out, _ = run(capsys, "na", "dist", n1, n2, "--norm", "l1")
    assert code == 0 and out == "2\n"
    code, out, _ = run(capsys, "na", "codiag", n1, n2)
    assert code == 0 and sorted(json.loads(out)["mu"]) == ["0", "1"]


def test_radial_check(capsys):
    code, out, _ = run(capsys, "radial", "check", "--n", "2", "--pairs", "10", "--horizon", "1e6")
    data = json.loads(out)
    assert code == 0 and data["failed"] == 0 and float(data["max_defect"]) <= 1e-5
    code, out, _ = run(capsys, "radial", "check", "--n", "3", "--pairs", "2", "--format", "csv")
    assert code == 0 and out.splitlines()[0].startswith("pair,norm,estimate")


def test_output_file_and_determinism(capsys, tmp_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    for target in (out1, out2):
        assert run(capsys, "radial", "check", "--n", "3", "--pairs", "4", "--seed", "7", "--out", target)[0] == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "berkstab", "curve", "mabuchi", str(SAMPLES / "TWOPT.json")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1/2\n"


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--criteria", "4,8")
    assert code == 0
    assert [line.startswith("[PASS]") for line in out.splitlines()] == [True, True]
    assert run(capsys, "selftest", "--criteria", "99")[0] == 2
