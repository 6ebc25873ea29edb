"""Deterministic text serialisation: 17 significant digits, ``.`` decimals, no locale."""
from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np


def fmt_float(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, Fraction):
        # exact rationals travel as strings
        return json.dumps([str(obj.numerator), str(obj.denominator)])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_json(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits and non-finite values as ``null``."""
    return _encode(obj, indent, 0) + "\n"


def to_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
                cells.append(str(int(v)))
            elif isinstance(v, str):
                cells.append(v)
            else:
                cells.append("" if fmt_float(v) == "null" else fmt_float(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
