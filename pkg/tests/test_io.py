import io
import math

import pytest
from hypothesis import given, settings, strategies as st

from modtransfer.io import (SchemaError, format_complex, format_real, parse_complex,
                            read_table, write_table)

finite = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=300, deadline=None)
@given(finite, finite)
def test_complex_round_trip(a, b):
    z = complex(a, b)
    assert parse_complex(format_complex(z)) == z


@settings(max_examples=300, deadline=None)
@given(finite)
def test_real_round_trip(x):
    assert float(format_real(x)) == x


def test_complex_format_examples():
    assert format_complex(1.5 - 2e-3j) == "1.5-0.002i"
    assert format_complex(complex(0, 1)) == "0+1i"
    assert parse_complex("-1e-05+3.25i") == complex(-1e-5, 3.25)
    assert math.isnan(parse_complex("nan+1i").real)
    for bad in ("1+2j", "abc", "1.5", ""):
        with pytest.raises(SchemaError):
            parse_complex(bad)


ROWS = [(1, 0.1, 2 - 3j, "a b"), (2, -1e-300, 1e300 + 0j, "c")]
COLS = ["n", "x", "z", "tag"]
HEADER = {"version": "0.1.0", "N": 24, "tol": 1e-6, "s": 0.5 + 9.5j}


def test_csv_table_round_trip(tmp_path):
    p = tmp_path / "t.csv"
    write_table(p, HEADER, COLS, ROWS, "csv")
    header, cols, rows = read_table(p)
    assert cols == COLS
    assert header["N"] == "24" and float(header["tol"]) == 1e-6
    assert parse_complex(header["s"]) == 0.5 + 9.5j
    for got, want in zip(rows, ROWS):
        assert int(got[0]) == want[0]
        assert float(got[1]) == want[1]
        assert parse_complex(got[2]) == want[2]
        assert got[3] == want[3]


def test_json_table_round_trip(tmp_path):
    p = tmp_path / "t.jsonl"
    write_table(p, HEADER, COLS, ROWS, "json")
    header, cols, rows = read_table(p)
    assert cols == COLS
    assert header["N"] == 24 and header["s"] == {"real": 0.5, "imag": 9.5}
    for got, want in zip(rows, ROWS):
        assert got[1] == want[1]
        assert complex(got[2]["real"], got[2]["imag"]) == want[2]


def test_write_to_stream():
    buf = io.StringIO()
    write_table(buf, {"k": 1}, ["a"], [(1.0,)])
    assert buf.getvalue() == "# k = 1\na\n1\n"


def test_read_errors(tmp_path):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    with pytest.raises(SchemaError):
        read_table(empty)
    bad = tmp_path / "b.jsonl"
    bad.write_text('{"header": {}}\n{not json\n')
    with pytest.raises(SchemaError):
        read_table(bad)
    nohead = tmp_path / "n.jsonl"
    nohead.write_text('{"a": 1}\n')
    with pytest.raises(SchemaError):
        read_table(nohead)
    with pytest.raises(OSError):
        read_table(tmp_path / "missing.csv")


def test_unknown_format():
    with pytest.raises(ValueError):
        write_table(io.StringIO(), {}, ["a"], [], "xml")
