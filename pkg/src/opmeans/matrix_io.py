"""Reading and writing matrices and matrix tuples as JSON.

Single matrix::

    {"dim": 2, "rows": [[2.0, 1.0], [1.0, 2.0]]}

Tuple of matrices, weights optional::

    {"matrices": [{"dim": 2, "rows": ...}, ...], "weights": [0.5, 0.5]}

Writers emit every float with 17 significant digits so files round-trip
bit-exactly.
"""
from __future__ import annotations

import json

import numpy as np

from .spd_core import NotPositiveDefiniteError, as_spd


class MatrixFileError(ValueError):
    """Schema violation in a matrix file, with a line anchor when available."""

    def __init__(self, message, line=None, source="<input>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def matrix_to_json(A) -> str:
    A = np.asarray(A, dtype=float)
    rows = ", ".join("[" + ", ".join(format_float(v) for v in row) + "]" for row in A)
    return f'{{"dim": {A.shape[0]}, "rows": [{rows}]}}'


def tuple_to_json(matrices, weights=None) -> str:
    parts = [f'"matrices": [{", ".join(matrix_to_json(A) for A in matrices)}]']
    if weights is not None:
        parts.append('"weights": [' + ", ".join(format_float(w) for w in weights) + "]")
    return "{" + ", ".join(parts) + "}\n"


def write_tuple(path, matrices, weights=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(tuple_to_json(matrices, weights))


def _line_of(text: str, offset: int) -> int:
    return text.count("\n", 0, offset) + 1


def _element_offsets(text: str, key: str) -> list[int]:
    """Character offsets of the elements of the top-level array ``key``."""
    decoder = json.JSONDecoder()
    start = text.find(f'"{key}"')
    if start < 0:
        return []
    pos = text.find("[", start)
    if pos < 0:
        return []
    pos += 1
    offsets = []
    while pos < len(text):
        while pos < len(text) and text[pos] in " \t\r\n,":
            pos += 1
        if pos >= len(text) or text[pos] == "]":
            break
        offsets.append(pos)
        try:
            _, pos = decoder.raw_decode(text, pos)
        except json.JSONDecodeError:
            break
    return offsets


def parse_matrix(obj, line=None, source="<input>", spd=True) -> np.ndarray:
    if not isinstance(obj, dict) or "rows" not in obj:
        raise MatrixFileError('matrix must be an object with "dim" and "rows"', line, source)
    rows = obj["rows"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise MatrixFileError('"rows" must be a non-empty list of lists', line, source)
    dim = obj.get("dim", len(rows))
    if not isinstance(dim, int) or isinstance(dim, bool) or dim != len(rows):
        raise MatrixFileError(f'"dim" is {dim!r} but there are {len(rows)} rows', line, source)
    if any(len(r) != dim for r in rows):
        raise MatrixFileError(f"every row must have {dim} entries", line, source)
    try:
        A = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise MatrixFileError("matrix entries must be numbers", line, source) from None
    if not np.all(np.isfinite(A)):
        raise MatrixFileError("matrix entries must be finite", line, source)
    if not np.allclose(A, A.T, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise MatrixFileError("matrix is not symmetric", line, source)
    if spd:
        try:
            A = as_spd(A)
        except NotPositiveDefiniteError as exc:
            raise MatrixFileError(str(exc), line, source) from None
    return A


def loads_tuple(text: str, source="<input>"):
    """Parse a matrix-tuple document; returns ``(matrices, weights_or_None)``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno, source) from None
    if not isinstance(doc, dict):
        raise MatrixFileError("top level must be an object", 1, source)
    if "matrices" not in doc:
        if "rows" in doc:
            return [parse_matrix(doc, 1, source)], None
        raise MatrixFileError('missing "matrices" array', 1, source)
    mats = doc["matrices"]
    if not isinstance(mats, list) or not mats:
        raise MatrixFileError('"matrices" must be a non-empty array', _line_of(text, text.find('"matrices"')), source)
    offsets = _element_offsets(text, "matrices")
    out = []
    for k, m in enumerate(mats):
        line = _line_of(text, offsets[k]) if k < len(offsets) else None
        out.append(parse_matrix(m, line, source))
    dims = {A.shape[0] for A in out}
    if len(dims) != 1:
        raise MatrixFileError(f"matrices have different dimensions {sorted(dims)}", None, source)
    weights = doc.get("weights")
    if weights is not None:
        wline = _line_of(text, text.find('"weights"'))
        if not isinstance(weights, list) or len(weights) != len(out):
            raise MatrixFileError(f'"weights" must be a list of {len(out)} numbers', wline, source)
        try:
            weights = np.array(weights, dtype=float)
        except (TypeError, ValueError):
            raise MatrixFileError('"weights" must be numbers', wline, source) from None
    return out, weights


def read_tuple(path):
    with open(path, encoding="utf-8") as fh:
        return loads_tuple(fh.read(), source=str(path))
