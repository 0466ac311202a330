"""Canonical JSON emission.

Reports must be byte-identical across runs, so all floats go through a
single fixed formatter: 12 significant digits, except where that would
lose more than 1e-13 absolutely (point coordinates near round-trip
tolerance), in which case the shortest exact representation is used.
"""

from __future__ import annotations

import json
import math
from typing import Any


def format_float(v: float) -> str:
    if v != v:  # NaN
        return "null"
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    s = format(v, ".12g")
    if abs(float(s) - v) > 5e-13:
        s = repr(v)
    if s == "-0":
        s = "0"
    return s


def _encode(obj: Any) -> str:
    if obj is None or obj is True or obj is False:
        return json.dumps(obj)
    if isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int,)):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        inner = ",".join(json.dumps(str(k)) + ":" + _encode(v) for k, v in items)
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json())
    if hasattr(obj, "item"):  # numpy scalars
        return _encode(obj.item())
    raise TypeError(f"cannot canonically encode {type(obj)!r}")


def canonical_dumps(obj: Any) -> str:
    """Deterministic JSON string with sorted keys and fixed float format."""
    return _encode(obj)
