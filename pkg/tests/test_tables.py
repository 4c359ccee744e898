"""Byte-stable table emission and round-trips."""

import math

import pytest

from renorm import tables


def test_float_formatting_17_digits():
    assert tables.format_value(1.0 / 3.0) == "0.33333333333333331"
    assert tables.format_value(1000.0) == "1000"
    assert float(tables.format_value(math.pi)) == math.pi
    assert tables.format_value(-0.0) == "0"


def test_parse_token_types():
    assert tables.parse_token("42") == 42
    assert tables.parse_token("-1.5e-3") == -1.5e-3
    assert tables.parse_token("true") is True
    assert tables.parse_token("false") is False
    assert tables.parse_token("finite") == "finite"
    assert tables.parse_token("") == ""


def test_csv_round_trip_bytes(tmp_path):
    path = tmp_path / "t.csv"
    header = ["name", "n", "x", "flag"]
    rows = [
        ("alpha", 3, 1.0 / 7.0, True),
        ("beta", -2, 6.02214076e23, False),
        ("", 0, 1000.0, True),
    ]
    tables.write_csv(path, header, rows)
    first = path.read_bytes()
    h2, r2 = tables.read_csv(path)
    assert h2 == header
    path2 = tmp_path / "t2.csv"
    tables.write_csv(path2, h2, r2)
    assert path2.read_bytes() == first


def test_csv_rejects_embedded_separators(tmp_path):
    with pytest.raises(ValueError):
        tables.write_csv(tmp_path / "bad.csv", ["a"], [("x,y",)])


def test_json_round_trip_bytes(tmp_path):
    path = tmp_path / "t.json"
    obj = [{"n": 1, "x": 0.1, "s": "hello"}, {"n": 2, "x": 2.0, "s": ""}]
    tables.write_json(path, obj)
    first = path.read_bytes()
    back = tables.read_json(path)
    path2 = tmp_path / "t2.json"
    tables.write_json(path2, back)
    assert path2.read_bytes() == first
