import json
import subprocess
import sys

import numpy as np
import pytest

from covrep.cli import EXIT_CAP, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from covrep.serialize import decode_matrix, load_rep, save_rep
from covrep.shifts import shift_dual_closed_form, interior_columns

from conftest import nilpotent_shift


@pytest.fixture
def ex_a_file(tmp_path, ex_a):
    p = tmp_path / "ex_a.json"
    save_rep(ex_a, p)
    return p


def test_gen_unit_shift_is_ex_c(tmp_path):
    out = tmp_path / "c.json"
    assert main(["gen", "shift", "--kind", "unilateral", "--n", "1", "--window", "0..3",
                 "--unit", "--out", str(out)]) == EXIT_OK
    assert np.array_equal(load_rep(out).v_tilde, nilpotent_shift(4))


def test_gen_ex_d_with_negative_window_and_dual(tmp_path, ex_d_spec):
    w = tmp_path / "w.json"
    w.write_text(json.dumps([1, 2, 0, 3, 1]))
    rep_path, dual_path = tmp_path / "d.json", tmp_path / "dd.json"
    assert main(["gen", "shift", "--kind", "bilateral", "--n", "1", "--window", "-2..2",
                 "--weights", str(w), "--out", str(rep_path)]) == EXIT_OK
    assert main(["dual", "--input", str(rep_path), "--out", str(dual_path)]) == EXIT_OK
    cols = interior_columns(ex_d_spec)
    got = load_rep(dual_path).v_tilde[:, cols]
    assert np.allclose(got, shift_dual_closed_form(ex_d_spec)[:, cols], atol=1e-14)


def test_pinv_of_zero_rep(tmp_path):
    src, out = tmp_path / "z.json", tmp_path / "p.json"
    src.write_text(json.dumps({"dim_h": 2, "n": 2, "v_tilde": [[0, 0, 0, 0], [0, 0, 0, 0]]}))
    assert main(["pinv", "--input", str(src), "--out", str(out)]) == EXIT_OK
    m = decode_matrix(json.loads(out.read_text())["matrix"])
    assert m.shape == (4, 2) and not m.any()


def test_wold_ex_a(tmp_path, ex_a_file):
    out = tmp_path / "w.json"
    assert main(["wold", "--input", str(ex_a_file), "--out", str(out)]) == EXIT_OK
    obj = json.loads(out.read_text())
    assert obj["wandering"]["rank"] == 0 and obj["generalized_range"]["rank"] == 2


def test_check_ex_c_structure(tmp_path, ex_c):
    p = tmp_path / "c.json"
    save_rep(ex_c, p)
    assert main(["check", "--input", str(p), "--battery", "structure"]) == EXIT_OK


def test_check_json_report(tmp_path, ex_a_file):
    out = tmp_path / "r.json"
    assert main(["check", "--input", str(ex_a_file), "--format", "json", "--report", str(out)]) == EXIT_OK
    obj = json.loads(out.read_text())
    assert obj["tool"] == "covrep" and len(obj["input_digest"]) == 64
    assert not any(c["verdict"] == "FAIL" for c in obj["checks"])


def test_exit_fail_on_impossible_tolerance(ex_a_file, capsys):
    assert main(["check", "--input", str(ex_a_file), "--tolerance", "1e-300"]) == EXIT_FAIL


def test_exit_usage(tmp_path, capsys):
    assert main(["check", "--input", str(tmp_path / "missing.json")]) == EXIT_USAGE
    assert main(["nonsense"]) == EXIT_USAGE
    assert main(["gen", "random", "--kind", "left-invertible", "--dim-h", "2", "--n", "2",
                 "--out", str(tmp_path / "x.json")]) == EXIT_USAGE
    assert main(["fuzz", "--trials", "1", "--seed", "0", "--dims", "h<=x"]) == EXIT_USAGE


def test_exit_cap(monkeypatch, ex_a_file, capsys):
    monkeypatch.setenv("COVREP_MAX_DIM", "2")
    assert main(["check", "--input", str(ex_a_file)]) == EXIT_CAP


def test_fuzz_writes_report(tmp_path, capsys):
    out = tmp_path / "f.json"
    assert main(["fuzz", "--trials", "4", "--seed", "1", "--report", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["trials"] == 4


def test_module_entry_point(ex_a_file):
    done = subprocess.run([sys.executable, "-m", "covrep", "check", "--input", str(ex_a_file),
                           "--battery", "duality"], capture_output=True, text=True)
    assert done.returncode == EXIT_OK
    assert "# counts" in done.stdout
