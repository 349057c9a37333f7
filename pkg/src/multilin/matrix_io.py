"""CSV and JSON encodings for matrices and scalars.

JSON: a matrix is an array of row arrays.  Rationals are ``"p/q"`` strings
(integers may be bare), reals are numbers and complex entries are ``[re, im]``
pairs.  CSV: header-free, row-major, entries decimal or ``p/q``.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .scalars import COMPLEX, RATIONAL, REAL, DimensionError, as_matrix, backend_of


class MatrixFormatError(ValueError):
    """Malformed matrix file."""


def scalar_to_json(x, backend: str):
    if backend == RATIONAL:
        return str(Fraction(x))
    if backend == REAL:
        return float(x)
    z = complex(x)
    return [z.real, z.imag]


def scalar_from_json(v, backend: str):
    if backend == RATIONAL:
        if isinstance(v, list) or (isinstance(v, float) and not v.is_integer()):
            raise MatrixFormatError(f"non-rational entry {v!r}")
        return Fraction(int(v)) if isinstance(v, float) else Fraction(v)
    if backend == REAL:
        if isinstance(v, list):
            raise MatrixFormatError(f"complex entry {v!r} in a real matrix")
        return float(Fraction(v)) if isinstance(v, str) else float(v)
    if isinstance(v, list):
        if len(v) != 2:
            raise MatrixFormatError(f"complex entry must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(float(Fraction(v)) if isinstance(v, str) else v)


def infer_backend(rows) -> str:
    flat = [x for r in rows for x in r]
    if any(isinstance(x, list) for x in flat):
        return COMPLEX
    if any(isinstance(x, float) for x in flat):
        return REAL
    return RATIONAL


def matrix_to_json(M: np.ndarray) -> list:
    backend = backend_of(M)
    return [[scalar_to_json(x, backend) for x in row] for row in M]


def matrix_from_json(rows, backend: str | None = None) -> np.ndarray:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise MatrixFormatError("matrix JSON must be an array of row arrays")
    _check_rectangular([len(r) for r in rows])
    backend = backend or infer_backend(rows)
    try:
        return as_matrix([[scalar_from_json(x, backend) for x in r] for r in rows], backend)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise MatrixFormatError(f"bad matrix entry: {exc}") from None


def _check_rectangular(lengths):
    for i, m in enumerate(lengths):
        if m != lengths[0]:
            raise MatrixFormatError(
                f"row {i + 1} has {m} entries, expected {lengths[0]} (from row 1)")


def parse_csv_matrix(text: str, backend: str = RATIONAL) -> np.ndarray:
    rows = [[c.strip() for c in r] for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    _check_rectangular([len(r) for r in rows])
    try:
        if backend == RATIONAL:
            data = [[Fraction(c) for c in r] for r in rows]
        else:
            data = [[float(Fraction(c)) for c in r] for r in rows]
    except (ValueError, ZeroDivisionError) as exc:
        raise MatrixFormatError(f"bad matrix entry: {exc}") from None
    return as_matrix(data, backend)


def format_csv_matrix(M: np.ndarray, row_labels=None, col_labels=None) -> str:
    backend = backend_of(M)
    if backend == COMPLEX:
        raise MatrixFormatError("CSV output does not support complex entries; use JSON")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if col_labels is not None:
        w.writerow([""] + list(col_labels))
    for i, row in enumerate(M):
        cells = [str(Fraction(x)) if backend == RATIONAL else repr(float(x)) for x in row]
        w.writerow(([row_labels[i]] if row_labels is not None else []) + cells)
    return buf.getvalue()


def load_matrix(path: str | Path, backend: str | None = None) -> np.ndarray:
    """Read a ``.json`` or CSV matrix file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc.strerror}") from None
    if path.suffix.lower() == ".json":
        try:
            return matrix_from_json(json.loads(text), backend)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"{path}: invalid JSON ({exc})") from None
    return parse_csv_matrix(text, backend or RATIONAL)


__all__ = [
    "MatrixFormatError", "DimensionError", "format_csv_matrix", "infer_backend",
    "load_matrix", "matrix_from_json", "matrix_to_json", "parse_csv_matrix",
    "scalar_from_json", "scalar_to_json",
]
