"""JSON encoding of operators, channels, classical-quantum MACs and results.

Formats::

    operator  {"dims": [...], "matrix": [[[re, im], ...], ...]}
    channel   {"kraus": [matrix, ...], "in_dims": [...], "out_dims": [...]}
    cq MAC    {"p_x": [...], "p_y": [...], "outputs": {"x,y": operator}}

Floats are written with 17 significant digits so output is bit-reproducible;
non-finite values are written as the strings ``"inf"``, ``"-inf"``, ``"nan"``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .mac import CqMac
from .operators import HermitianOperator, QuantumChannel


class InputError(ValueError):
    """Malformed input, with a location such as ``file:line:col`` or a JSON path."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


# Encoding ---------------------------------------------------------------


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _enc(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_enc(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        return _enc(obj.tolist(), indent, level)
    if isinstance(obj, (list, tuple)):
        if obj and any(isinstance(v, dict) for v in obj):
            items = [pad + _enc(v, indent, level + 1) for v in obj]
            return "[\n" + ",\n".join(items) + "\n" + end + "]"
        return "[" + ", ".join(_enc(v, indent, level + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text; key order is the insertion order of ``obj``."""
    return _enc(obj, indent, 0) + "\n"


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def operator_to_json(op: HermitianOperator) -> dict:
    return {"dims": list(op.dims), "matrix": matrix_to_json(op.matrix)}


def channel_to_json(ch: QuantumChannel) -> dict:
    return {
        "kraus": [matrix_to_json(k) for k in ch.kraus],
        "in_dims": list(ch.in_dims),
        "out_dims": list(ch.out_dims),
    }


def cqmac_to_json(cq: CqMac) -> dict:
    d = cq.d_out
    return {
        "p_x": [float(p) for p in cq.p_x],
        "p_y": [float(p) for p in cq.p_y],
        "outputs": {
            f"{x},{y}": {"dims": [d], "matrix": matrix_to_json(m)} for (x, y), m in sorted(cq.outputs.items())
        },
    }


def to_csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(format_float(v).strip('"') if isinstance(v, float) else str(v) for v in r))
    return "\n".join(lines) + "\n"


# Decoding ---------------------------------------------------------------


def _decode_float(v: Any, where: str) -> float:
    if isinstance(v, str) and v in ("inf", "-inf", "nan"):
        return float(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"expected a number, got {v!r}", where)
    return float(v)


def matrix_from_json(obj: Any, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise InputError("expected a non-empty list of rows", where)
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise InputError("expected a list of entries", f"{where}[{i}]")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"row has {len(row)} entries, expected {width}", f"{where}[{i}]")
        vals = []
        for j, z in enumerate(row):
            loc = f"{where}[{i}][{j}]"
            if isinstance(z, list):
                if len(z) != 2:
                    raise InputError("complex entries are [re, im] pairs", loc)
                vals.append(complex(_decode_float(z[0], loc), _decode_float(z[1], loc)))
            else:
                vals.append(complex(_decode_float(z, loc), 0.0))
        rows.append(vals)
    return np.array(rows, dtype=complex)


def _dims(obj: Any, where: str) -> tuple[int, ...]:
    if not isinstance(obj, list) or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in obj):
        raise InputError("dims must be a list of positive integers", where)
    return tuple(obj)


def _require(obj: Any, key: str, where: str):
    if not isinstance(obj, dict):
        raise InputError("expected an object", where)
    if key not in obj:
        raise InputError(f"missing key {key!r}", where)
    return obj[key]


def operator_from_json(obj: Any, where: str = "$") -> HermitianOperator:
    m = matrix_from_json(_require(obj, "matrix", where), f"{where}.matrix")
    dims = _dims(obj["dims"], f"{where}.dims") if "dims" in obj else (m.shape[0],)
    try:
        return HermitianOperator(m, dims)
    except ValueError as e:
        raise InputError(str(e), where) from None


def channel_from_json(obj: Any, where: str = "$") -> QuantumChannel:
    ks = _require(obj, "kraus", where)
    if not isinstance(ks, list) or not ks:
        raise InputError("kraus must be a non-empty list", f"{where}.kraus")
    mats = [matrix_from_json(k, f"{where}.kraus[{i}]") for i, k in enumerate(ks)]
    in_dims = _dims(_require(obj, "in_dims", where), f"{where}.in_dims")
    out_dims = _dims(_require(obj, "out_dims", where), f"{where}.out_dims")
    try:
        return QuantumChannel(tuple(mats), in_dims, out_dims)
    except ValueError as e:
        raise InputError(str(e), where) from None


def cqmac_from_json(obj: Any, where: str = "$") -> CqMac:
    px = [_decode_float(v, f"{where}.p_x") for v in _require(obj, "p_x", where)]
    py = [_decode_float(v, f"{where}.p_y") for v in _require(obj, "p_y", where)]
    outs_obj = _require(obj, "outputs", where)
    if not isinstance(outs_obj, dict):
        raise InputError("outputs must be an object keyed by 'x,y'", f"{where}.outputs")
    outs = {}
    for key, val in outs_obj.items():
        try:
            x, y = (int(t) for t in key.split(","))
        except ValueError:
            raise InputError(f"bad output key {key!r}", f"{where}.outputs") from None
        outs[(x, y)] = operator_from_json(val, f"{where}.outputs[{key!r}]").matrix
    try:
        return CqMac(np.array(px), np.array(py), outs)
    except ValueError as e:
        raise InputError(str(e), where) from None


def load_json(path: str | Path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(e.msg, f"{path}:{e.lineno}:{e.colno}") from None
