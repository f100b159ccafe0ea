"""Lossless table files: CSV with a commented header, or JSON lines.

CSV
    Lines starting with ``#`` carry the header as ``# key = value``; the first
    other line names the columns. Reals are written with 17 significant
    digits and complex numbers as ``R+Ii`` (for example ``1.5-2e-03i``).
JSON lines
    The first line is ``{"header": {...}}``; each further line is one record.
    Complex numbers become ``{"real": ..., "imag": ...}``.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

__all__ = ["SchemaError", "format_real", "format_complex", "parse_complex",
           "format_value", "write_table", "read_table", "detect_format"]


class SchemaError(ValueError):
    """A file does not follow the documented table layout."""


def format_real(x: float) -> str:
    return f"{float(x):.17g}"


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


_COMPLEX_RE = re.compile(
    r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?(?:nan|inf))"
    r"([+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-](?:nan|inf))i\s*$")


def parse_complex(text: str) -> complex:
    """Inverse of :func:`format_complex`."""
    m = _COMPLEX_RE.match(text)
    if not m:
        raise SchemaError(f"not a complex number in R+Ii form: {text!r}")
    return complex(float(m.group(1)), float(m.group(2)))


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, float):
        return format_real(v)
    return str(v)


def _json_value(v):
    if isinstance(v, complex):
        return {"real": v.real, "imag": v.imag}
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def detect_format(path, fmt=None) -> str:
    if fmt:
        return fmt
    return "json" if str(path).endswith((".json", ".jsonl")) else "csv"


def write_table(stream_or_path, header: dict, columns, rows, fmt: str = "csv"):
    """Write a header plus rows (sequences aligned with ``columns``)."""
    if fmt == "csv":
        lines = [f"# {k} = {format_value(v)}" for k, v in header.items()]
        lines.append(",".join(columns))
        lines += [",".join(format_value(v) for v in row) for row in rows]
    elif fmt == "json":
        lines = [json.dumps({"header": {k: _json_value(v) for k, v in header.items()}})]
        lines += [json.dumps({c: _json_value(v) for c, v in zip(columns, row)}) for row in rows]
    else:
        raise ValueError(f"unknown format {fmt!r}")
    text = "\n".join(lines) + "\n"
    if hasattr(stream_or_path, "write"):
        stream_or_path.write(text)
    else:
        Path(stream_or_path).write_text(text)


def read_table(path, fmt: str | None = None):
    """Read a file written by :func:`write_table`.

    Returns
    -------
    header : dict of str
        Raw header values (strings for CSV, JSON values for JSON lines).
    columns : list of str
    rows : list of list of str or JSON values

    Raises
    ------
    OSError
        If the file cannot be read.
    SchemaError
        If the layout is wrong or the file is empty.
    """
    text = Path(path).read_text()
    if not text.strip():
        raise SchemaError("empty file")
    fmt = detect_format(path, fmt)
    if fmt == "json" or text.lstrip().startswith("{"):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        try:
            recs = [json.loads(ln) for ln in lines]
        except ValueError as e:
            raise SchemaError(f"bad JSON line: {e}") from None
        if not isinstance(recs[0], dict) or "header" not in recs[0]:
            raise SchemaError("first JSON line must hold the header")
        header = recs[0]["header"]
        body = recs[1:]
        columns = list(body[0]) if body else []
        rows = []
        for r in body:
            if list(r) != columns:
                raise SchemaError("inconsistent JSON record fields")
            rows.append([r[c] for c in columns])
        return header, columns, rows
    header, columns, rows = {}, None, []
    for ln in text.splitlines():
        if not ln.strip():
            continue
        if ln.startswith("#"):
            if "=" not in ln:
                continue
            k, v = ln[1:].split("=", 1)
            header[k.strip()] = v.strip()
        elif columns is None:
            columns = ln.split(",")
        else:
            row = ln.split(",")
            if len(row) != len(columns):
                raise SchemaError(f"row has {len(row)} fields, expected {len(columns)}")
            rows.append(row)
    if columns is None:
        raise SchemaError("missing column line")
    return header, columns, rows
