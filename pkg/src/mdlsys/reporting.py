"""Deterministic JSON reports: sorted keys, 17-significant-digit floats.

The serializer is hand-rolled so that float formatting is byte-stable across
runs and platforms; complex numbers become [re, im] pairs and arrays become
nested lists.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Any

import numpy as np


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == int(x) and abs(x) < 1e16:
        return repr(float(x))
    return f"{x:.17g}"


def _normalize(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _normalize(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return _normalize(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, (np.complexfloating, complex)):
        z = complex(obj)
        if z.imag == 0.0:
            return float(z.real)
        return [float(z.real), float(z.imag)]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _emit(obj: Any, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, key in enumerate(sorted(obj)):
            out.append(pad_in + json.dumps(key) + ": ")
            _emit(obj[key], out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        flat = all(not isinstance(v, (dict, list)) for v in obj)
        if flat:
            out.append("[")
            out.append(", ".join(_scalar(v) for v in obj))
            out.append("]")
        else:
            out.append("[\n")
            for i, v in enumerate(obj):
                out.append(pad_in)
                _emit(v, out, indent, level + 1)
                out.append(",\n" if i < len(obj) - 1 else "\n")
            out.append(pad + "]")
    else:
        out.append(_scalar(obj))


def _scalar(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialize {type(v)}")


def dumps_canonical(obj: Any, indent: int = 2) -> str:
    out: list[str] = []
    _emit(_normalize(obj), out, indent, 0)
    out.append("\n")
    return "".join(out)
