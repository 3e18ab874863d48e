"""Deterministic report serialisation: JSON with 17 significant digits and a CSV mirror."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def format_float(x: float) -> str:
    return "%.17g" % x


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def dumps(obj, indent: int = 1, _level: int = 0) -> str:
    """JSON text with sorted keys, floats as %.17g and non-finite floats as null."""
    obj = _plain(obj)
    pad = "\n" + " " * (indent * (_level + 1))
    end = "\n" + " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format_float(obj)
        if "." not in text and "e" not in text and "inf" not in text:
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + dumps(obj[k], indent, _level + 1)
                 for k in sorted(obj, key=str)]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [dumps(v, indent, _level + 1) for v in obj]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _cell(x):
    x = _plain(x)
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return dumps(x) if math.isfinite(x) else ""
    if isinstance(x, (dict, list, tuple)):
        return dumps(x, indent=0).replace("\n", "")
    if x is None:
        return ""
    return str(x)


def to_csv(rows, columns) -> str:
    """CSV with the given columns; nested values are embedded as compact JSON."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()
