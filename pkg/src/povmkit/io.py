"""POVM documents (JSON) and report serialization.

Document schema, version "1"::

    {
      "schema_version": "1",
      "dim": d,
      "effects": [ [[ [re, im], ... d entries ], ... d rows], ... n effects ],
      "metadata": {"name": "...", "seed": "...", ...}
    }

Floats are written in the shortest form that reads back to the same double,
so the file loses no precision.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import re

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import ParseError
from .povm import POVM

SCHEMA_VERSION = "1"

_MARK = "\x00flt:"
_MARK_RE = re.compile(r'"\\u0000flt:([^"]*)"')


def format_float(x: float) -> str:
    return repr(float(x))


def _tag_floats(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        # JSON has no NaN or infinity
        return _MARK + format_float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _tag_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_tag_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _tag_floats(obj.tolist())
    return obj


def dumps(obj, indent: int | None = 2) -> str:
    """``json.dumps`` with round-trip float formatting and numpy support."""
    text = json.dumps(_tag_floats(obj), indent=indent, sort_keys=False)
    return _MARK_RE.sub(lambda m: m.group(1), text)


def povm_to_document(p: POVM, metadata: dict | None = None) -> dict:
    effects = [[[[float(z.real), float(z.imag)] for z in row] for row in E] for E in p.effects]
    return {
        "schema_version": SCHEMA_VERSION,
        "dim": p.dim,
        "effects": effects,
        "metadata": {str(k): str(v) for k, v in (metadata or {}).items()},
    }


def document_to_povm(doc, tol: Tolerances = DEFAULT) -> POVM:
    """Parse a document dict into a validated POVM.

    Structural problems raise :class:`ParseError`; mathematical ones raise the
    specific validation error (``NotPSD``, ``CompletenessViolation``, ...).
    """
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    if str(doc.get("schema_version")) != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {doc.get('schema_version')!r}")
    try:
        d = int(doc["dim"])
        raw = np.asarray(doc["effects"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed document: {exc}") from None
    if raw.ndim != 4 or raw.shape[1:] != (d, d, 2) or raw.shape[0] < 1:
        raise ParseError(f"effects must have shape (n, {d}, {d}, 2), got {raw.shape}")
    return POVM(raw[..., 0] + 1j * raw[..., 1], tol=tol)


def save_povm(p: POVM, path, metadata: dict | None = None) -> dict:
    doc = povm_to_document(p, metadata)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))
        fh.write("\n")
    return doc


def loads_povm(text: str, tol: Tolerances = DEFAULT) -> POVM:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return document_to_povm(doc, tol)


def load_povm(path, tol: Tolerances = DEFAULT) -> POVM:
    with open(path, encoding="utf-8") as fh:
        return loads_povm(fh.read(), tol)


def csv_table(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
