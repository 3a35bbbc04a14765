"""System, point-list, and polynomial JSON formats.

A system file carries ``d``, the dimensions, matrices ``A`` (a list of d
matrices), optional ``B``/``D``, and ``C``.  Matrix entries are numbers,
``[re, im]`` pairs, or expression strings over the ``params`` object
(``"a"``, ``"1-a"``, ``"2*i"``); ``i`` and ``j`` name the imaginary unit.
Words serialize as digit strings, multi-indices as arrays.
"""

from __future__ import annotations

import ast
import json
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from .spaces import BallPoly, FockPoly
from .systems import OutputPair, SystemRealization
from .words import MultiIndex, Word

_ALLOWED_NODES = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.Pow,
    ast.USub,
    ast.UAdd,
    ast.Constant,
    ast.Name,
    ast.Load,
)


def eval_entry_expr(expr: str, params: Mapping[str, complex]) -> complex:
    """Evaluate an arithmetic expression over the parameter names and i/j."""
    tree = ast.parse(expr, mode="eval")
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ValueError(f"disallowed syntax in entry {expr!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float, complex)):
            raise ValueError(f"non-numeric constant in entry {expr!r}")
    names = {"i": 1j, "j": 1j}
    names.update({k: complex(v) for k, v in params.items()})

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant):
            return complex(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ValueError(f"unknown name {node.id!r} in entry {expr!r}")
            return names[node.id]
        if isinstance(node, ast.UnaryOp):
            val = walk(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp):
            a, b = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
            if isinstance(node.op, ast.Pow):
                return a**b
        raise ValueError(f"unsupported node in entry {expr!r}")

    return walk(tree)


def parse_scalar(entry: Any, params: Mapping[str, complex]) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, str):
        return eval_entry_expr(entry, params)
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    raise ValueError(f"cannot parse matrix entry {entry!r}")


def parse_matrix(rows: Sequence[Sequence[Any]], params: Mapping[str, complex]) -> np.ndarray:
    return np.array([[parse_scalar(e, params) for e in row] for row in rows], dtype=complex)


def parse_param_value(raw: str) -> complex:
    """Parse a --param value: plain complex literals or expressions."""
    try:
        return complex(raw.replace("i", "j"))
    except ValueError:
        return eval_entry_expr(raw, {})


def load_system(
    path: str | Path, params: Optional[Mapping[str, complex]] = None
) -> SystemRealization:
    data = json.loads(Path(path).read_text())
    return system_from_dict(data, params)


def system_from_dict(
    data: Mapping[str, Any], params: Optional[Mapping[str, complex]] = None
) -> SystemRealization:
    file_params = {
        k: parse_scalar(v, {}) for k, v in data.get("params", {}).items()
    }
    if params:
        file_params.update({k: complex(v) for k, v in params.items()})
    d = int(data["d"])
    A_list = data["A"]
    if len(A_list) != d:
        raise ValueError(f"expected {d} state matrices, found {len(A_list)}")
    A = tuple(parse_matrix(M, file_params) for M in A_list)
    C = parse_matrix(data["C"], file_params)
    pair = OutputPair(C=C, A=A)
    B = None
    if "B" in data and data["B"] is not None:
        B = tuple(parse_matrix(M, file_params) for M in data["B"])
    D = parse_matrix(data["D"], file_params) if data.get("D") is not None else None
    q = int(data["inputDim"]) if "inputDim" in data else None
    sys = SystemRealization(pair=pair, B=B, D=D, input_dim=q)
    for key, expected in (
        ("stateDim", pair.state_dim),
        ("outputDim", pair.output_dim),
    ):
        if key in data and int(data[key]) != expected:
            raise ValueError(f"{key} = {data[key]} but matrices give {expected}")
    return sys


def load_points(path: str | Path) -> list[np.ndarray]:
    """Point lists: arrays of [re, im] pairs per coordinate."""
    data = json.loads(Path(path).read_text())
    pts = data["points"] if isinstance(data, dict) else data
    out = []
    for pt in pts:
        out.append(np.array([complex(float(c[0]), float(c[1])) for c in pt]))
    return out


def load_input_map(path: str | Path, flavor: str) -> dict:
    """Input signals keyed by digit-string words or array multi-indices."""
    data = json.loads(Path(path).read_text())
    entries = data.get("input", data)
    out: dict = {}
    for key, vec in entries.items():
        values = [parse_scalar(v, {}) for v in vec]
        if flavor == "nc":
            word: Word = tuple(int(ch) for ch in key) if key else ()
            out[word] = np.array(values)
        else:
            idx: MultiIndex = tuple(json.loads(key)) if key.startswith("[") else tuple(
                int(ch) for ch in key.split(",")
            )
            out[idx] = np.array(values)
    return out


def word_to_str(v: Word) -> str:
    return "".join(str(k) for k in v)


def fock_poly_to_dict(f: FockPoly) -> dict:
    return {
        "flavor": "nc",
        "coeffDim": f.dim,
        "depth": f.depth,
        "coeffs": {
            word_to_str(v): [[c.real, c.imag] for c in vec]
            for v, vec in sorted(f.coeffs.items())
        },
    }


def ball_poly_to_dict(f: BallPoly) -> dict:
    return {
        "flavor": "commutative",
        "coeffDim": f.dim,
        "depth": f.degree,
        "coeffs": {
            json.dumps(list(n)): [[c.real, c.imag] for c in vec]
            for n, vec in sorted(f.coeffs.items())
        },
    }


def poly_from_dict(data: Mapping[str, Any]) -> FockPoly | BallPoly:
    dim = int(data["coeffDim"])
    depth = int(data["depth"])
    flavor = data.get("flavor", "nc")
    coeffs = {}
    for key, vec in data["coeffs"].items():
        values = np.array([parse_scalar(v, {}) for v in vec])
        if flavor == "nc":
            coeffs[tuple(int(ch) for ch in key) if key else ()] = values
        else:
            coeffs[tuple(json.loads(key))] = values
    if flavor == "nc":
        return FockPoly(dim, depth, coeffs)
    return BallPoly(dim, depth, coeffs)


def load_subspace(path: str | Path) -> list[FockPoly] | list[BallPoly]:
    data = json.loads(Path(path).read_text())
    return [poly_from_dict(entry) for entry in data["basis"]]
