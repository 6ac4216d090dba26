"""Deterministic JSON output and parsing diagnostics.

All numbers are emitted with 17 significant digits, which round-trips every
double exactly and keeps output byte-stable across runs and platforms.
"""

import json

import numpy as np

from .errors import ParseError


def _num(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if not np.isfinite(v):
        raise ValueError(f"cannot serialize non-finite number {v!r}")
    return format(v, ".17g")


def dumps(obj, indent=0):
    """Serialize to JSON text: dicts keep insertion order, numeric arrays stay
    on one line, everything else is indented two spaces per level."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {dumps(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) for v in obj):
            return "[" + ", ".join(_num(v) for v in obj) + "]"
        items = [f"{pad}  {dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    return _num(obj)


def loads(text, what="document"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{what}: line {e.lineno} column {e.colno}: {e.msg}") from e


def field(doc, path, kind=None):
    """Walk a parsed document by dotted path, raising ParseError that names
    the missing or mistyped field."""
    cur = doc
    walked = []
    for part in path.split("."):
        walked.append(part)
        if not isinstance(cur, dict) or part not in cur:
            raise ParseError(f"missing field {'.'.join(walked)!r}")
        cur = cur[part]
    if kind is not None and not isinstance(cur, kind):
        raise ParseError(f"field {path!r} has type {type(cur).__name__}, expected {kind.__name__}")
    return cur
