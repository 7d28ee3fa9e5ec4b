"""JSON formats for tensors (``symtensor3-v1``) and algebras (``algebra-v1``).

Indices in files are 1-based; scalars are strings.  Exact files use
``"p/q"`` rationals, float files use decimal strings.
"""

from __future__ import annotations

import json
import re

import numpy as np

from .algebra import Algebra
from .errors import OdecoError
from .scalars import exact_zeros, format_part, format_scalar, gq, parse_scalar
from .tensor import BilinearForm, SymTensor3

TENSOR_FORMAT = "symtensor3-v1"
ALGEBRA_FORMAT = "algebra-v1"
EXACT_SCALAR = "gaussian-rational"
FLOAT_SCALAR = "complex-f64"

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class FormatError(OdecoError):
    """Malformed input file."""


def _require(cond, msg):
    if not cond:
        raise FormatError(msg)


def _parse_part(s, exact: bool, where: str):
    _require(isinstance(s, str), f"{where}: scalar parts must be strings")
    s = s.strip()
    if exact:
        _require(_RATIONAL.match(s) is not None, f"{where}: {s!r} is not a decimal-free rational")
        _require(not s.endswith("/0"), f"{where}: zero denominator")
        return gq(s)
    try:
        return float(s)
    except ValueError:
        raise FormatError(f"{where}: {s!r} is not a decimal number") from None


def _parse_scalar_string(s, exact: bool, where: str):
    _require(isinstance(s, str), f"{where}: scalars must be strings")
    try:
        return parse_scalar(s, exact)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def _scalar_mode(doc) -> bool:
    scalar = doc.get("scalar", EXACT_SCALAR)
    _require(scalar in (EXACT_SCALAR, FLOAT_SCALAR), f"unknown scalar type {scalar!r}")
    return scalar == EXACT_SCALAR


def _dim(doc) -> int:
    n = doc.get("dim")
    _require(isinstance(n, int) and not isinstance(n, bool) and n >= 0, "dim must be a non-negative integer")
    return n


def _gram_from_json(rows, n: int, exact: bool) -> BilinearForm:
    _require(isinstance(rows, list) and len(rows) == n, f"gram must be a list of {n} rows")
    g = exact_zeros((n, n)) if exact else np.zeros((n, n), complex)
    for i, row in enumerate(rows):
        _require(isinstance(row, list) and len(row) == n, f"gram row {i + 1} must have {n} entries")
        for j, s in enumerate(row):
            g[i, j] = _parse_scalar_string(s, exact, f"gram[{i + 1}][{j + 1}]")
    try:
        return BilinearForm(g)
    except ValueError as exc:
        raise FormatError(f"gram: {exc}") from None


def _gram_to_json(form: BilinearForm) -> list:
    return [[format_scalar(x) for x in row] for row in form.gram]


# --------------------------------------------------------------------------
# tensors


def tensor_to_json(t: SymTensor3, form: BilinearForm | None = None) -> dict:
    entries = []
    for idx, v in sorted(t.coeffs.items()):
        if t.exact:
            g = gq(v)
            re_s, im_s = format_part(g.re, True), format_part(g.im, True)
        else:
            z = complex(v)
            re_s, im_s = format_part(z.real, False), format_part(z.imag, False)
        entries.append({"idx": [i + 1 for i in idx], "re": re_s, "im": im_s})
    doc = {
        "format": TENSOR_FORMAT,
        "dim": t.dim,
        "scalar": EXACT_SCALAR if t.exact else FLOAT_SCALAR,
        "entries": entries,
    }
    if form is not None and not form.is_identity:
        doc["gram"] = _gram_to_json(form if t.exact else form.to_float())
    return doc


def tensor_from_json(doc: dict) -> tuple[SymTensor3, BilinearForm]:
    _require(isinstance(doc, dict), "tensor file must be a JSON object")
    _require(doc.get("format") == TENSOR_FORMAT, f"format must be {TENSOR_FORMAT!r}")
    n = _dim(doc)
    exact = _scalar_mode(doc)
    entries = doc.get("entries", [])
    _require(isinstance(entries, list), "entries must be a list")
    coeffs = {}
    for pos, e in enumerate(entries):
        where = f"entry {pos + 1}"
        _require(isinstance(e, dict), f"{where}: must be an object")
        idx = e.get("idx")
        _require(
            isinstance(idx, list) and len(idx) == 3 and all(isinstance(i, int) for i in idx),
            f"{where}: idx must be three integers",
        )
        _require(list(idx) == sorted(idx), f"{where}: idx {idx} is not sorted")
        _require(all(1 <= i <= n for i in idx), f"{where}: idx {idx} out of range 1..{n}")
        key = tuple(i - 1 for i in idx)
        _require(key not in coeffs, f"{where}: duplicate idx {idx}")
        re_v = _parse_part(e.get("re", "0"), exact, where)
        im_v = _parse_part(e.get("im", "0"), exact, where)
        coeffs[key] = re_v + im_v * gq(0, 1) if exact else complex(re_v, im_v)
    t = SymTensor3(n, coeffs, exact)
    form = _gram_from_json(doc["gram"], n, exact) if "gram" in doc else BilinearForm.identity(n, exact)
    return t, form


# --------------------------------------------------------------------------
# algebras


def algebra_to_json(a: Algebra) -> dict:
    mul = []
    for i in range(a.dim):
        for j in range(i, a.dim):
            vals = a.mul[i, j]
            if any(vals) if a.exact else np.any(vals != 0):
                mul.append({"idx": [i + 1, j + 1], "val": [format_scalar(x) for x in vals]})
    doc = {
        "format": ALGEBRA_FORMAT,
        "dim": a.dim,
        "scalar": EXACT_SCALAR if a.exact else FLOAT_SCALAR,
        "mul": mul,
    }
    if not a.form.is_identity:
        doc["gram"] = _gram_to_json(a.form)
    return doc


def algebra_from_json(doc: dict, validate: bool = True) -> Algebra:
    _require(isinstance(doc, dict), "algebra file must be a JSON object")
    _require(doc.get("format") == ALGEBRA_FORMAT, f"format must be {ALGEBRA_FORMAT!r}")
    n = _dim(doc)
    exact = _scalar_mode(doc)
    mul = exact_zeros((n, n, n)) if exact else np.zeros((n, n, n), complex)
    seen = set()
    for pos, e in enumerate(doc.get("mul", [])):
        where = f"mul entry {pos + 1}"
        _require(isinstance(e, dict), f"{where}: must be an object")
        idx = e.get("idx")
        _require(
            isinstance(idx, list) and len(idx) == 2 and all(isinstance(i, int) for i in idx),
            f"{where}: idx must be two integers",
        )
        i, j = idx
        _require(i <= j, f"{where}: idx {idx} must satisfy i <= j")
        _require(1 <= i and j <= n, f"{where}: idx {idx} out of range 1..{n}")
        _require((i, j) not in seen, f"{where}: duplicate idx {idx}")
        seen.add((i, j))
        vals = e.get("val")
        _require(isinstance(vals, list) and len(vals) == n, f"{where}: val must list {n} scalars")
        vec = [_parse_scalar_string(s, exact, where) for s in vals]
        mul[i - 1, j - 1] = vec
        mul[j - 1, i - 1] = vec
    form = _gram_from_json(doc["gram"], n, exact) if "gram" in doc else BilinearForm.identity(n, exact)
    try:
        return Algebra(mul, form, validate=validate)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


# --------------------------------------------------------------------------
# text helpers


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    _require(isinstance(doc, dict), "top-level JSON value must be an object")
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1) + "\n"


def read_tensor(text: str) -> tuple[SymTensor3, BilinearForm]:
    return tensor_from_json(loads(text))


def read_algebra(text: str, validate: bool = True) -> Algebra:
    return algebra_from_json(loads(text), validate)


def read_any(text: str):
    """A tensor file becomes ``(tensor, form)``; an algebra file an ``Algebra``."""
    doc = loads(text)
    fmt = doc.get("format")
    if fmt == TENSOR_FORMAT:
        return tensor_from_json(doc)
    if fmt == ALGEBRA_FORMAT:
        return algebra_from_json(doc)
    raise FormatError(f"unknown format {fmt!r}")


__all__ = [
    "ALGEBRA_FORMAT",
    "FormatError",
    "TENSOR_FORMAT",
    "algebra_from_json",
    "algebra_to_json",
    "dumps",
    "loads",
    "read_algebra",
    "read_any",
    "read_tensor",
    "tensor_from_json",
    "tensor_to_json",
]
