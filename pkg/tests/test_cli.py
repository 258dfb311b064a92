import json
import math
import subprocess
import sys

import numpy as np
import pytest

from fuzzysphere.cli import main
from fuzzysphere.surd import Surd


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cg_outputs_exact_and_float(capsys):
    code, out, _ = run(capsys, "cg", "--j1", "1", "--j2", "1", "--j", "2", "--m1", "0", "--m2", "0", "--m", "0")
    assert code == 0
    data = json.loads(out)
    assert Surd.from_json(data["value"]["exact"]) == Surd.sqrt(2) * Surd.sqrt(3) / 3
    assert data["value"]["float"] == pytest.approx(math.sqrt(2 / 3))


def test_cg_trivial_and_half_integer(capsys):
    code, out, _ = run(capsys, "cg", "--j1", "1", "--j2", "0", "--j", "1", "--m1", "1", "--m2", "0", "--m", "1")
    assert code == 0 and json.loads(out)["value"]["float"] == 1
    code, out, _ = run(capsys, "cg", "--j1", "1/2", "--j2", "1/2", "--j", "0", "--m1", "1/2", "--m2", "-1/2", "--m", "0")
    assert json.loads(out)["value"]["float"] == pytest.approx(math.sqrt(0.5))


@pytest.mark.parametrize("spin", ["1/3", "0.5", "abc"])
def test_malformed_spin_is_usage_error(capsys, spin):
    code, out, err = run(capsys, "cg", "--j1", spin, "--j2", "1", "--j", "1", "--m1", "0", "--m2", "0", "--m", "0")
    assert code == 2 and out == "" and "error" in err


def test_sixj(capsys):
    code, out, _ = run(capsys, "sixj", *sum((["--j%d" % i, "1"] for i in range(1, 7)), []))
    assert code == 0 and json.loads(out)["value"]["text"] == "1/6"


def test_basis_hahn(capsys):
    code, out, _ = run(capsys, "basis", "--n", "2", "--m", "1")
    data = json.loads(out)
    assert code == 0 and data["format"] == "hahn"
    assert data["expression"] == "Jp*(-eps - 2*z)"
    code, out, _ = run(capsys, "basis", "--n", "0", "--m", "0")
    assert json.loads(out)["expression"] == "1"


def test_basis_matrix(capsys):
    code, out, _ = run(capsys, "basis", "--k", "1", "--n", "1", "--m", "0", "--format", "matrix")
    data = json.loads(out)
    r2 = math.sqrt(2)
    assert np.allclose(data["matrix"]["real"], [[-r2, 0, 0], [0, 0, 0], [0, 0, r2]])
    assert data["zero_norm"] is False and "warning" not in data
    code, out, _ = run(capsys, "basis", "--k", "1", "--n", "3", "--m", "0", "--format", "matrix")
    data = json.loads(out)
    assert data["zero_norm"] is True and "warning" in data


def test_basis_usage_errors(capsys):
    assert run(capsys, "basis", "--n", "1", "--m", "0", "--format", "matrix")[0] == 2
    assert run(capsys, "basis", "--n", "1", "--m", "2")[0] == 2


def test_product(capsys):
    code, out, _ = run(capsys, "product", "--k", "3", "--n1", "1", "--m1", "0", "--n2", "1", "--m2", "0")
    data = json.loads(out)
    assert code == 0
    assert [t["n"] for t in data["terms"]] == [0, 2]
    assert data["terms"][0]["coeff"][0] == pytest.approx(8.0)
    code, out, _ = run(capsys, "product", "--k", "1", "--n1", "2", "--m1", "0", "--n2", "2", "--m2", "0")
    assert json.loads(out)["quotient"] == [3, 4]
    assert run(capsys, "product", "--k", "1/2", "--n1", "2", "--m1", "0", "--n2", "0", "--m2", "0")[0] == 2


def test_verify_table1(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "--suite", "table1", "--out", str(target))
    assert code == 0 and out == ""
    data = json.loads(target.read_text(encoding="utf-8"))
    assert data["schema_version"] == 1 and data["passed"]
    checks = data["results"][0]["checks"]
    assert len(checks) == 16
    assert sum(c["status"] == "pass" for c in checks) == 14
    assert sum(c["status"] == "advisory" for c in checks) == 2


def test_verify_text_and_determinism(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "rotation-sign", "--format", "text")
    assert code == 0 and out.strip().endswith("PASSED")
    a = run(capsys, "verify", "--suite", "leibniz", "--seed", "3")[1]
    b = run(capsys, "verify", "--suite", "leibniz", "--seed", "3")[1]
    strip = lambda s: [r["checks"] for r in json.loads(s)["results"]]
    assert strip(a) == strip(b)


def test_verify_tolerance_override_can_fail(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "norms", "--k-max", "2", "--tol", "1e-30")
    assert code == 1 and not json.loads(out)["passed"]


def test_verify_usage_errors(capsys, monkeypatch):
    assert run(capsys, "verify", "--suite", "nope")[0] == 2
    assert run(capsys, "verify", "--suite", "norms", "--tol", "-1")[0] == 2
    monkeypatch.setenv("NC_SPHERE_KCAP", "3")
    assert run(capsys, "verify", "--suite", "norms", "--k-max", "4")[0] == 2


def test_verify_exact_mode(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "norms", "--k-max", "2", "--exact")
    names = [c["name"] for c in json.loads(out)["results"][0]["checks"]]
    assert code == 0 and any("exact mode" in n for n in names)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fuzzysphere.cli", "cg", "--j1", "1/3", "--j2", "0",
                           "--j", "0", "--m1", "0", "--m2", "0", "--m", "0"], capture_output=True, text=True)
    assert proc.returncode == 2 and "malformed" in proc.stderr
