"""Deterministic JSON output.

Floats are written with 17 significant digits so that every value
round-trips bit-exactly and repeated runs produce identical bytes.
Non-finite floats become ``null``.
"""

import json
import math

import numpy as np


def _scalar(obj):
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(obj, indent, level, out):
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    sep = ": " if indent else ":"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{" + nl)
        for i, (key, value) in enumerate(obj.items()):
            out.append(pad + json.dumps(str(key)) + sep)
            _encode(value, indent, level + 1, out)
            out.append(("," if i < len(obj) - 1 else "") + nl)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        # numeric vectors stay on one line to keep reports compact
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            out.append("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.append("[" + nl)
        for i, value in enumerate(obj):
            out.append(pad)
            _encode(value, indent, level + 1, out)
            out.append(("," if i < len(obj) - 1 else "") + nl)
        out.append(end + "]")
    else:
        out.append(_scalar(obj))


def dumps(obj, indent=2):
    out = []
    _encode(obj, indent, 0, out)
    return "".join(out)


def dump(obj, path, indent=2):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj, indent))
        fh.write("\n")


def loads(text):
    return json.loads(text)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
