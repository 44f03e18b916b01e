import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from covrep.report import CheckReport
from covrep.serialize import (
    InputError, decode_matrix, digest, dumps, encode_matrix, load_rep, parse_weights,
    rep_from_json, rep_to_json, report_to_json, save_rep,
)
from covrep.shifts import random_rep


@given(st.integers(0, 5000), st.integers(1, 4), st.integers(1, 3))
def test_rep_round_trip_is_bit_exact(seed, h, n):
    rep = random_rep(seed, h, n, "dense")
    back = rep_from_json(json.loads(dumps(rep_to_json(rep))))
    assert np.array_equal(back.v_tilde, rep.v_tilde)
    assert digest(back) == digest(rep)


def test_file_round_trip_keeps_generators(tmp_path, ex_d):
    p = tmp_path / "d.json"
    save_rep(ex_d, p)
    back = load_rep(p)
    assert np.array_equal(back.v_tilde, ex_d.v_tilde)
    assert back.sigma_gens[0][0] == "herm:1"
    assert back.metadata["shift"] == ex_d.metadata["shift"]


def test_decode_accepts_plain_numbers():
    m = decode_matrix([[1, [0, 2]], ["0x1.8p+0", "2.5"]])
    assert np.array_equal(m, np.array([[1, 2j], [1.5, 2.5]]))


def test_encode_special_values():
    enc = encode_matrix(np.array([[0.1 + 0j]]))
    assert float.fromhex(enc["entries"][0][0][0]) == 0.1


@pytest.mark.parametrize("bad", [
    {"rows": 2, "cols": 1, "entries": [[1]]},
    [[1, 2], [3]],
    [[[1, 2, 3]]],
    [["abc"]],
    [[True]],
    [["nan"]],
    {"rows": 1},
])
def test_decode_errors(bad):
    with pytest.raises(InputError):
        decode_matrix(bad)


def test_rep_errors():
    with pytest.raises(InputError):
        rep_from_json([])
    with pytest.raises(InputError):
        rep_from_json({"dim_h": 2, "n": 1})
    with pytest.raises(InputError):
        rep_from_json({"dim_h": 2, "n": 1, "v_tilde": [[1, 0, 0]]})


def test_load_missing_and_garbage(tmp_path):
    with pytest.raises(InputError):
        load_rep(tmp_path / "nope.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(InputError):
        load_rep(p)


def test_weight_forms_agree():
    window = (-1, 1)
    expect = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]])
    assert np.array_equal(parse_weights([1, 2, 3], 2, window), expect)
    assert np.array_equal(parse_weights([[1, 2, 3], [1, 2, 3]], 2, window), expect)
    assert np.array_equal(parse_weights({"offset": -2, "weights": [9, 1, 2, 3]}, 2, window), expect)
    trip = [{"i": i, "m": m, "w": m + 2} for i in (1, 2) for m in (-1, 0, 1)]
    assert np.array_equal(parse_weights(trip, 2, window), expect)
    assert np.array_equal(parse_weights({"triplets": trip}, 2, window), expect)


def test_weight_errors():
    with pytest.raises(InputError):
        parse_weights([1, 2], 1, (0, 2))
    with pytest.raises(InputError):
        parse_weights([[1, 2, 3]], 2, (0, 2))
    with pytest.raises(InputError):
        parse_weights([{"i": 1, "m": 0, "w": 1}], 1, (0, 1))
    with pytest.raises(InputError):
        parse_weights([[1, 0], 1, 1], 1, (0, 2))
    with pytest.raises(InputError):
        parse_weights(["1+2j", 1, 1], 1, (0, 2))


def test_report_json_is_strict():
    r = CheckReport("t", 1e-10)
    r.measure("m", "a", False, float("inf"))
    text = dumps(report_to_json(r, "abc"))
    obj = json.loads(text)
    assert obj["input_digest"] == "abc" and obj["checks"][0]["residual"] == "inf"
