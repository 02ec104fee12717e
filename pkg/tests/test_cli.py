import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qorth.cli import main
from qorth.core import CNOT, SWAP, haar_random_unitary, matrix_to_json
from qorth.subalgebra import to_json
from qorth.theorems import pauli_four_family


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    lines = [json.loads(l) for l in out.getvalue().splitlines()]
    return code, lines, out.getvalue()


@pytest.fixture
def mat_file(tmp_path):
    def write(M, name="m.json"):
        p = tmp_path / name
        p.write_text(json.dumps(matrix_to_json(M)))
        return str(p)
    return write


def test_complementary_example():
    code, lines, _ = run(["complementary", "--a", "triple:+IX,+IY,+IZ",
                          "--b", "triple:+XI,+YX,+ZX"])
    assert code == 0
    assert lines[0]["overlap"] == 0.0 and lines[0]["complementary"] is True
    assert lines[0]["tol"] == 1e-9


def test_complementary_named_and_masa():
    code, lines, _ = run(["complementary", "--a", "A0", "--b", "A0"])
    assert code == 0 and lines[0]["overlap"] == pytest.approx(3)
    code, lines, _ = run(["complementary", "--a", "A0", "--b", "masa:+XX,+YZ,+ZY"])
    assert lines[0]["complementary"] is True


def test_complementary_from_file(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(to_json(pauli_four_family()[1])))
    code, lines, _ = run(["complementary", "--a", "A0", "--b", str(p)])
    assert code == 0 and lines[0]["complementary"] is True


def test_kak_swap(mat_file):
    code, lines, _ = run(["kak", "--in", mat_file(SWAP)])
    assert code == 0
    d = lines[0]
    for key in ("alpha", "beta", "gamma"):
        assert d[key] == pytest.approx(math.pi / 4, abs=1e-8)
    assert set(d) >= {"L1", "L2", "L3", "L4", "phase", "reconstruction_error", "chamber"}
    assert d["reconstruction_error"] <= 1e-8
    assert d["alpha"] == float(f"{d['alpha']:.12g}")


def test_check_useful(mat_file):
    code, lines, _ = run(["check-useful", "--in", mat_file(SWAP)])
    assert code == 0 and lines[0]["useful"] and lines[0]["complementary_to_A0"]
    code, lines, _ = run(["check-useful", "--in", mat_file(CNOT)])
    assert code == 0 and not lines[0]["useful"]


def test_overlap_and_cond_exp():
    code, lines, _ = run(["overlap", "--angles", "0.25pi,0.25pi,0"])
    assert code == 0 and lines[0]["overlap_formula"] == pytest.approx(1)
    assert lines[0]["class_N"] and lines[0]["bound_holds"]
    code, lines, _ = run(["cond-exp", "--angles", "0.3,0.2,0.1"])
    assert code == 0 and [l["direction"] for l in lines] == ["XI", "YI", "ZI"]
    assert lines[2]["reference_direction"] == "YI"


def test_audit(tmp_path):
    code, lines, _ = run(["audit", "--pauli-four", "--latex"])
    assert code == 0 and lines[0]["verdict"] == "valid_family"
    assert lines[0]["latex"].startswith("\\begin{tabular}")
    p = tmp_path / "fam.json"
    p.write_text(json.dumps({"family": [{"triple": ["+IX", "+IY", "+IZ"]},
                                        {"triple": "+IX,+YY,+YZ"}]}))
    code, lines, _ = run(["audit", "--in", str(p)])
    assert code == 0 and lines[0]["verdict"] == "violations"


def test_search_discrete():
    code, lines, _ = run(["search", "discrete", "--include-a0"])
    assert code == 0 and lines[0]["max_size"] == 4 and lines[0]["witness_count"] == 6


def test_search_continuous_is_byte_identical(tmp_path):
    argv = ["search", "continuous", "--k", "3", "--restarts", "2", "--max-iters", "500",
            "--seed", "5"]
    c1, lines, text1 = run(argv + ["--csv", str(tmp_path / "log.csv")])
    c2, _, text2 = run(argv)
    assert c1 == c2 == 0 and text1 == text2
    assert lines[0]["config"]["seed"] == 5
    rows = list(csv.DictReader(open(tmp_path / "log.csv")))
    assert [r["restart"] for r in rows] == ["0", "1"]


def test_seed_from_environment(monkeypatch):
    argv = ["search", "continuous", "--k", "2", "--restarts", "1", "--max-iters", "200"]
    monkeypatch.setenv("QORTH_SEED", "9")
    _, lines, _ = run(argv)
    assert lines[0]["config"]["seed"] == 9
    monkeypatch.setenv("QORTH_SEED", "nine")
    code, lines, _ = run(argv)
    assert code == 2 and "QORTH_SEED" in lines[0]["error"]


def test_selftest_subset():
    code, lines, _ = run(["selftest", "--only", "6a,8"])
    assert code == 0 and [l["criterion"] for l in lines] == ["6a", "8"]
    assert all(l["passed"] for l in lines)


@pytest.mark.parametrize("payload, field", [
    ('{"rows": 4, "cols": 4}', "data"),
    ('{"rows": "4", "cols": 4, "data": []}', "rows"),
    ('{"rows": 4,', "not valid JSON"),
])
def test_malformed_matrix_exits_2(tmp_path, payload, field):
    p = tmp_path / "bad.json"
    p.write_text(payload)
    code, lines, _ = run(["kak", "--in", str(p)])
    assert code == 2 and field in lines[0]["error"]


def test_usage_errors_exit_2(tmp_path, mat_file):
    assert run(["kak", "--in", mat_file(SWAP), "--bogus"])[0] == 2
    assert run(["nonsense"])[0] == 2
    assert run(["overlap", "--angles", "1,2"])[0] == 2
    assert run(["overlap", "--angles", "1,2,abc"])[0] == 2
    assert run(["kak", "--in", str(tmp_path / "missing.json")])[0] == 2
    assert run(["kak", "--in", mat_file(np.diag([1, 1, 1, 2]))])[0] == 2
    assert run(["audit"])[0] == 2
    assert run(["selftest", "--only", "99"])[0] == 2
    assert run(["search", "continuous", "--k", "1"])[0] == 2


def test_output_is_finite_json(mat_file):
    W = haar_random_unitary(4, 3)
    _, _, text = run(["kak", "--in", mat_file(W)])
    json.loads(text, parse_constant=lambda c: pytest.fail(f"non-finite {c}"))


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qorth.cli", "complementary", "--a", "A0",
                           "--b", "B"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["complementary"] is True
    assert "complementary" in proc.stderr
