import json
import math
import pickle

import numpy as np
import pytest
from hypothesis import given, strategies as st

from besselbel.records import CSV_COLUMNS, McEstimate, VerificationReport, dumps_record, read_jsonl, write_report
from besselbel.testfunctions import REGISTRY, get_test_function


def report(**kw):
    base = dict(name="demo", inputs={"delta": 1.0, "x": 0.5, "T": 1.0, "n": 10, "dt": 1e-3},
                analytic=0.1, oracle=0.1 + 1e-9, mc=McEstimate(0.11, 0.01, 10, 3),
                tolerance_spec="3se", passed=True)
    base.update(kw)
    return VerificationReport(**base)


def test_mc_estimate_from_samples():
    e = McEstimate.from_samples([1.0, 2.0, 3.0], seed=1)
    assert e.mean == 2.0
    assert e.std_error == pytest.approx(1 / math.sqrt(3))
    assert e.within(2.5, n_se=1.0)
    assert not e.within(4.0, n_se=1.0)
    assert e.within(4.0, n_se=0.0, rel=0.5)
    with pytest.raises(ValueError):
        McEstimate.from_samples([], 0)


def test_status_must_agree_with_passed():
    assert report().status == "pass"
    assert report(passed=False).status == "fail"
    assert report(passed=False, status="inconclusive").status == "inconclusive"
    with pytest.raises(ValueError):
        report(passed=True, status="fail")
    with pytest.raises(ValueError):
        report(passed=False, status="maybe")


@given(st.floats(allow_nan=False), st.floats(allow_nan=False, allow_infinity=False))
def test_json_round_trip_is_exact(a, b):
    r = report(analytic=a, oracle=b)
    back = VerificationReport.from_dict(json.loads(dumps_record(r)))
    assert back.analytic == a and back.oracle == b
    assert back.mc == r.mc


def test_numpy_values_serialise():
    r = report(details={"arr": np.array([1.5, 2.0]), "flag": np.bool_(True), "k": np.int64(3)})
    d = json.loads(dumps_record(r))
    assert d["details"] == {"arr": [1.5, 2.0], "flag": True, "k": 3}


def test_csv_and_jsonl_files(tmp_path):
    reps = [report(), report(name="other", mc=None, passed=False)]
    p = tmp_path / "r.csv"
    write_report(reps, "csv", p)
    lines = p.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].endswith(",true") and lines[2].endswith(",false")
    q = tmp_path / "r.jsonl"
    write_report(reps, "jsonl", q)
    back = read_jsonl(q)
    assert [r.name for r in back] == ["demo", "other"]
    write_report([], "csv", p)
    assert p.read_text() == ",".join(CSV_COLUMNS) + "\n"
    with pytest.raises(ValueError):
        write_report(reps, "xml", p)


def test_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    write_report([report()], "jsonl", a)
    write_report([report()], "jsonl", b)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("name", REGISTRY)
def test_registered_functions_are_bounded_and_picklable(name):
    F = get_test_function(name)
    ys = np.linspace(0, 20, 401)
    assert np.max(np.abs(F(ys))) <= F.sup_norm
    assert isinstance(F(0.3), float)
    assert pickle.loads(pickle.dumps(F)) == F


def test_function_parameters():
    ind = get_test_function("indicator_0_a", a=0.5)
    assert ind(0.5) == 1.0 and ind(0.51) == 0.0
    assert ind.jumps == (0.5,)
    assert ind.label == "indicator_0_a(a=0.5)"
    assert get_test_function("gaussian", lam=2.0)(1.0) == pytest.approx(math.exp(-2.0))
    with pytest.raises(KeyError):
        get_test_function("nope")
    with pytest.raises(ValueError):
        get_test_function("indicator_0_a", a=-1.0)
