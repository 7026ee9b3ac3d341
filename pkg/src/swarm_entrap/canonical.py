"""Canonical JSON and float rendering for byte-stable output files.

Floats are rendered with 17 significant decimal digits, which round-trips
any IEEE-754 double exactly and is identical across platforms; dicts keep
insertion order. Non-finite floats become null (the 'never'/'undefined'
sentinel of the report formats).
"""

from __future__ import annotations

import json
import math


def format_float(x: float) -> str:
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """Serialize plain data (dict/list/str/int/float/bool/None) canonically."""
    out: list[str] = []
    _write(obj, out, indent, 0)
    return "".join(out)


def _write(obj, out: list[str], indent: int, level: int) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append("null" if not math.isfinite(obj) else format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (list, tuple)):
        _write_items(list(obj), out, indent, level, "[", "]", _write)
    elif isinstance(obj, dict):
        def write_pair(pair, o, ind, lvl):
            key, value = pair
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {type(key)}")
            o.append(json.dumps(key, ensure_ascii=False))
            o.append(": " if ind else ":")
            _write(value, o, ind, lvl)

        _write_items(list(obj.items()), out, indent, level, "{", "}", write_pair)
    else:
        raise TypeError(f"cannot serialize {type(obj)} canonically")


def _write_items(items, out, indent, level, open_ch, close_ch, write_item) -> None:
    if not items:
        out.append(open_ch + close_ch)
        return
    out.append(open_ch)
    separator = "," if not indent else ",\n" + " " * (indent * (level + 1))
    if indent:
        out.append("\n" + " " * (indent * (level + 1)))
    for i, item in enumerate(items):
        if i:
            out.append(separator)
        write_item(item, out, indent, level + 1)
    if indent:
        out.append("\n" + " " * (indent * level))
    out.append(close_ch)
