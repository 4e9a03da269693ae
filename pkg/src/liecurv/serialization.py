"""JSON algebra documents.

Schema (indices are 1-based, every record has ``i < j``)::

    {
      "dim": 4,
      "brackets": [{"i": 1, "j": 2, "k": 2, "c": 1.0}, ...],
      "form":   [[...], ...],      # optional, symmetric
      "metric": [[...], ...],      # optional, symmetric positive definite
      "labels": ["D", "X", ...]    # optional
    }

Floats are written with Python's shortest round-trip repr, so
``load(dump(x))`` reproduces every value bit for bit.
"""
from __future__ import annotations

import io
import json
import math
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DocumentError, LiecurvError
from .lie_core import LieAlgebra
from .quad_form import InvariantForm, Metric

_FIELDS = {"dim", "brackets", "form", "metric", "labels"}


def _fail(code, message, location=None):
    raise DocumentError(message, code=code, location=location)


def _number(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail("E_SCHEMA", f"expected a number, got {type(v).__name__}", where)
    if not math.isfinite(v):
        _fail("E_NONFINITE", "non-finite number", where)
    return float(v)


def _index(v, dim, where):
    if isinstance(v, bool) or not isinstance(v, int):
        _fail("E_SCHEMA", "bracket indices must be integers", where)
    if not 1 <= v <= dim:
        _fail("E_INDEX_RANGE", f"index {v} outside 1..{dim}", where)
    return v - 1


def _matrix(raw, dim, name):
    if not isinstance(raw, list) or len(raw) != dim:
        _fail("E_SCHEMA", f"{name} must be a list of {dim} rows", name)
    rows = []
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != dim:
            _fail("E_SCHEMA", f"{name} row must have {dim} entries", f"{name}[{r}]")
        rows.append([_number(v, f"{name}[{r}][{c}]") for c, v in enumerate(row)])
    M = np.array(rows)
    bad = np.argwhere(M != M.T)
    if len(bad):
        r, c = bad[0]
        _fail("E_ASYMMETRIC", f"{name} is not symmetric", f"{name}[{r}][{c}]")
    return M


def parse_document(doc) -> Tuple[LieAlgebra, Optional[InvariantForm], Optional[Metric]]:
    if not isinstance(doc, dict):
        _fail("E_SCHEMA", "document must be a JSON object")
    extra = set(doc) - _FIELDS
    if extra:
        _fail("E_SCHEMA", f"unknown fields: {sorted(extra)}", sorted(extra)[0])
    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        _fail("E_SCHEMA", "dim must be a positive integer", "dim")
    records = doc.get("brackets", [])
    if not isinstance(records, list):
        _fail("E_SCHEMA", "brackets must be a list", "brackets")
    C = np.zeros((dim, dim, dim))
    seen = set()
    for n, rec in enumerate(records):
        where = f"brackets[{n}]"
        if not isinstance(rec, dict) or set(rec) != {"i", "j", "k", "c"}:
            _fail("E_SCHEMA", "bracket record needs exactly i, j, k, c", where)
        i = _index(rec["i"], dim, where + ".i")
        j = _index(rec["j"], dim, where + ".j")
        k = _index(rec["k"], dim, where + ".k")
        if i == j:
            _fail("E_DIAG_BRACKET", "bracket of a basis vector with itself is zero", where)
        if i > j:
            _fail("E_BRACKET_ORDER", "records must have i < j", where)
        if (i, j, k) in seen:
            _fail("E_DUPLICATE_BRACKET", "repeated (i, j, k)", where)
        seen.add((i, j, k))
        C[i, j, k] = _number(rec["c"], where + ".c")
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != dim or not all(isinstance(s, str) for s in labels):
            _fail("E_SCHEMA", f"labels must be {dim} strings", "labels")
    alg = LieAlgebra(C, labels)
    form = metric = None
    if doc.get("form") is not None:
        form = InvariantForm(_matrix(doc["form"], dim, "form"))
    if doc.get("metric") is not None:
        g = _matrix(doc["metric"], dim, "metric")
        try:
            metric = Metric(g)
        except LiecurvError as exc:
            raise DocumentError(str(exc), code=exc.code, location="metric") from None
    return alg, form, metric


def load_algebra(source: Union[str, Path, io.TextIOBase]):
    """Read a document from a path or an open text stream."""
    try:
        if hasattr(source, "read"):
            text = source.read()
        else:
            text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(str(exc), code="E_IO", location=str(source)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg}", code="E_PARSE",
                            location=f"line {exc.lineno} column {exc.colno}") from None
    return parse_document(doc)


def algebra_document(alg: LieAlgebra, form: Optional[InvariantForm] = None,
                     metric: Optional[Metric] = None) -> dict:
    doc = {
        "dim": alg.dim,
        "brackets": [{"i": i + 1, "j": j + 1, "k": k + 1, "c": c} for i, j, k, c in alg.nonzero_brackets()],
    }
    if form is not None:
        doc["form"] = form.matrix.tolist()
    if metric is not None:
        doc["metric"] = metric.matrix.tolist()
    if alg.labels is not None:
        doc["labels"] = list(alg.labels)
    return doc


def _flat(value):
    if isinstance(value, list):
        return all(not isinstance(v, (list, dict)) for v in value)
    if isinstance(value, dict):
        return all(not isinstance(v, (list, dict)) for v in value.values())
    return True


def _encode(value, depth):
    if _flat(value):
        return json.dumps(value, allow_nan=False)
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(value, list):
        items = [inner + _encode(v, depth + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    items = [inner + json.dumps(str(k)) + ": " + _encode(v, depth + 1) for k, v in value.items()]
    return "{\n" + ",\n".join(items) + "\n" + pad + "}"


def dumps(doc) -> str:
    """Indented JSON with scalar-only lists and records kept on one line."""
    return _encode(doc, 0)


def save_algebra(path, alg, form=None, metric=None):
    Path(path).write_text(dumps(algebra_document(alg, form, metric)) + "\n", encoding="utf-8")
