import csv
import io
import json
import math

import pytest

from jacsob.jacobi_core import JacobiParams
from jacsob.report import CSV_HEADER, Check, ExperimentReport, format_number, to_csv, to_json, \
    write_report


def sample_report():
    r = ExperimentReport("demo", [JacobiParams(0.25, -0.5)], {"N": 64, "p": 2.0, "grid": [64, 0.5, 16]})
    r.check("tiny value", 1e-17 / 3, 1e-12)
    r.check("third", 1 / 3, 0.5, "<")
    r.check("positive", 2.0, 0.0, ">")
    r.notes["ratio"] = [0.1, 0.2 + 0.1]
    return r


def test_overall_is_conjunction():
    r = sample_report()
    assert r.overall
    r.check("fails", 2.0, 1.0)
    assert not r.overall
    assert not r.checks[-1].passed


def test_relations_and_explicit_flag():
    r = ExperimentReport("x")
    assert r.check("eq", 0.0, 0.0, "==").passed
    assert not r.check("gt", 1.0, 1.0, ">").passed
    assert r.check("ge", 1.0, 1.0, ">=").passed
    assert not r.check("forced", 0.0, 1.0, passed=False).passed


def test_non_finite_measurement_rejected():
    with pytest.raises(ValueError):
        Check("bad", math.nan, 1.0, True)
    with pytest.raises(ValueError):
        Check("bad", math.inf, 1.0, True)


def test_json_round_trip_is_bit_exact():
    r = sample_report()
    data = json.loads(to_json(r))
    assert data["overall"] is True
    assert data["params"] == [{"alpha": 0.25, "beta": -0.5}]
    for c, d in zip(r.checks, data["checks"]):
        assert d["measured"] == c.measured
        assert d["threshold"] == c.threshold
        assert d["pass"] == c.passed
    assert data["notes"]["ratio"][1] == 0.2 + 0.1


def test_json_floats_stay_floats():
    text = to_json({"a": 1.0, "b": 3, "c": -0.0, "d": 1e300})
    data = json.loads(text)
    assert isinstance(data["a"], float) and isinstance(data["b"], int)
    assert '"a": 1.0' in text


def test_json_infinity_sentinel():
    data = json.loads(to_json({"upper": math.inf, "lower": -math.inf}))
    assert data == {"upper": "inf", "lower": "-inf"}


def test_empty_report():
    r = ExperimentReport("empty")
    data = json.loads(to_json(r))
    assert data["overall"] is True and data["checks"] == []
    rows = list(csv.reader(io.StringIO(to_csv(r))))
    assert rows == [list(CSV_HEADER)]


def test_csv_rows():
    r = sample_report()
    rows = list(csv.reader(io.StringIO(to_csv(r))))
    assert rows[0] == list(CSV_HEADER)
    assert len(rows) == 1 + len(r.checks)
    assert float(rows[2][2]) == 1 / 3
    assert rows[1][4] == "true"


def test_json_is_deterministic():
    assert to_json(sample_report()) == to_json(sample_report())


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(math.inf) == "inf"
    assert float(format_number(1 / 7)) == 1 / 7


def test_write_report(tmp_path):
    r = sample_report()
    write_report(r, "json", tmp_path / "r.json")
    write_report(r, "csv", tmp_path / "r.csv")
    assert json.loads((tmp_path / "r.json").read_text())["name"] == "demo"
    assert (tmp_path / "r.csv").read_text().startswith("name,check")
    with pytest.raises(ValueError):
        write_report(r, "xml", tmp_path / "r.xml")


def test_extend_prefixes_checks():
    a = ExperimentReport("a")
    b = ExperimentReport("b")
    b.check("inner", 1.0, 2.0)
    a.extend(b, prefix="b: ")
    assert a.checks[0].description == "b: inner"
    lines = list(a.summary_lines())
    assert lines[0].startswith("[PASS] a: b: inner")


def test_unserialisable_object():
    with pytest.raises(TypeError):
        to_json({"x": object()})
