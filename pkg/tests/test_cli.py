import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from triwerner.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, load_schema, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_classify_g(capsys):
    code, out, _ = run(capsys, "classify", "--point", "0.2,0,0,0,0")
    assert code == EXIT_OK
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema("classify"))
    assert not doc["label"]["triseparable"]
    assert all(doc["label"]["biseparable"].values())


def test_classify_b(capsys):
    code, out, _ = run(capsys, "classify", "--point", "1,0,0,0,0")
    assert code == EXIT_OK
    assert json.loads(out)["label"]["triseparable"]


def test_classify_invalid(capsys):
    code, out, _ = run(capsys, "classify", "--point", "0.4,0.4,0.3,0,0")
    assert code == EXIT_INVALID
    doc = json.loads(out)
    assert doc["category"] == "invalid"
    assert not doc["label"]["valid"]


@pytest.mark.parametrize("point", ["0.2,0,0", "a,b,c,d,e", ""])
def test_classify_malformed(capsys, point):
    code, _, err = run(capsys, "classify", "--point", point)
    assert code == EXIT_USAGE
    assert "error" in err


def test_classify_csv(capsys):
    code, out, _ = run(capsys, "classify", "--point", "0.2,0,0,0,0", "--format", "csv")
    assert code == EXIT_OK
    (row,) = _csv(out)
    assert row["category"] == "biseparable"
    assert row["triseparable"] == "0" and row["bisep1"] == "1"


def test_unknown_subcommand_and_bad_d(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--point", "1,0,0,0,0", "--d", "9"])
    assert exc.value.code == EXIT_USAGE
    capsys.readouterr()


def test_figure1_csv(capsys):
    code, out, _ = run(capsys, "figure1", "--resolution", "31")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "r_plus,r_minus,trisep,bisep_wp,bisep_projection"
    rows = {(round(float(r["r_plus"]), 9), round(float(r["r_minus"]), 9)): r for r in _csv(out)}
    assert rows[(round(1 / 6, 9), round(1 / 6, 9))]["trisep"] == "1"
    g = rows[(0.2, 0.0)]
    assert g["trisep"] == "0" and g["bisep_wp"] == "1"
    f = rows[(0.0, round(1 / 3, 9))]
    assert f["bisep_wp"] == "0" and f["bisep_projection"] == "1"


def test_figure1_json_schema(capsys):
    code, out, _ = run(capsys, "figure1", "--resolution", "7", "--format", "json")
    assert code == EXIT_OK
    jsonschema.validate(json.loads(out), load_schema("figure1"))


def test_figure2(capsys, tmp_path):
    path = tmp_path / "fig2.csv"
    code, _, _ = run(capsys, "figure2", "--rplus", "0.27", "--rminus", "0.1", "--resolution", "11", "--out", str(path))
    assert code == EXIT_OK
    rows = _csv(path.read_text())
    assert len(rows) == 11**3
    assert list(rows[0]) == ["r1", "r2", "r3", "label"]
    centre = rows[len(rows) // 2]
    assert float(centre["r1"]) == float(centre["r2"]) == float(centre["r3"]) == 0
    assert centre["label"] == "triseparable"
    for r in rows:
        if float(r["r1"]) ** 2 + float(r["r2"]) ** 2 + float(r["r3"]) ** 2 > 0.63**2 + 1e-12:
            assert r["label"] == "invalid"


def test_figure2_json_schema(capsys):
    code, out, _ = run(capsys, "figure2", "--resolution", "5", "--format", "json")
    assert code == EXIT_OK
    jsonschema.validate(json.loads(out), load_schema("figure2"))


def test_figure2_outside_triangle(capsys):
    code, _, err = run(capsys, "figure2", "--rplus", "0.8", "--rminus", "0.5")
    assert code == EXIT_USAGE
    assert "triangle" in err


def test_unwritable_path(capsys, tmp_path):
    code, _, err = run(capsys, "figure1", "--resolution", "3", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == EXIT_USAGE
    assert "cannot write" in err


@pytest.mark.parametrize("kind", ["product", "biproduct"])
def test_sample_reproducible(capsys, kind):
    a = run(capsys, "sample", "--kind", kind, "--n", "50", "--seed", "3")[1]
    b = run(capsys, "sample", "--kind", kind, "--n", "50", "--seed", "3")[1]
    c = run(capsys, "sample", "--kind", kind, "--n", "50", "--seed", "4")[1]
    assert a == b and a != c
    assert len(_csv(a)) == 50
    doc = json.loads(run(capsys, "sample", "--kind", kind, "--n", "5", "--format", "json")[1])
    jsonschema.validate(doc, load_schema("sample"))


def test_figure_output_is_byte_identical(capsys):
    a = run(capsys, "figure2", "--resolution", "9")[1]
    b = run(capsys, "figure2", "--resolution", "9")[1]
    assert a == b


@pytest.mark.parametrize(
    "suite,d",
    [("algebra", 3), ("hyperplanes", 3), ("oracles", 2), ("criteria", 3), ("twirl", 2)],
)
def test_verify_suites(capsys, suite, d):
    code, out, err = run(capsys, "verify", "--suite", suite, "--d", str(d), "--samples", "500")
    assert code == EXIT_OK, err
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema("verify"))
    assert doc["passed"]


def test_verify_failure_exit_code(capsys, monkeypatch):
    from triwerner import cli

    def broken(*args, **kwargs):
        return {"suite": "algebra", "d": 3, "seed": 0, "passed": False,
                "suites": {"algebra": [{"name": "x", "passed": False, "value": 1.0, "threshold": 0.0, "detail": ""}]}}

    monkeypatch.setattr(cli, "run_suite", broken)
    code, _, err = run(capsys, "verify", "--suite", "algebra")
    assert code == EXIT_VERIFY
    assert "FAILED [algebra] x" in err


def test_tolerance_flags(capsys):
    # a point just outside the state space: loosening the criterion slack admits it
    point = "0,0,-1.0000001,0,0"
    strict = json.loads(run(capsys, "classify", "--point", point, "--d", "2")[1])
    loose = json.loads(run(capsys, "classify", "--point", point, "--d", "2", "--tol-criterion", "1e-3")[1])
    assert not strict["label"]["valid"]
    assert loose["label"]["valid"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "triwerner", "classify", "--point", "1,0,0,0,0"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["category"] == "triseparable"
