"""Scalar backends and dense matrix helpers.

Matrices are plain numpy arrays.  The backend is carried by the dtype:

* ``object``      -- exact rationals, every entry a :class:`fractions.Fraction`
* ``float64``     -- real doubles
* ``complex128``  -- complex doubles

Every operation that takes more than one matrix rejects mixed backends.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number
from typing import Iterable

import numpy as np

RATIONAL = "rational"
REAL = "real"
COMPLEX = "complex"
BACKENDS = (RATIONAL, REAL, COMPLEX)

_DTYPES = {RATIONAL: object, REAL: np.float64, COMPLEX: np.complex128}


class BackendError(TypeError):
    """Raised when operands live in different scalar backends."""


class DimensionError(ValueError):
    """Raised on shape or index-range violations."""


def backend_of(M: np.ndarray) -> str:
    dt = np.asarray(M).dtype
    if dt == object:
        return RATIONAL
    if dt == np.float64:
        return REAL
    if dt == np.complex128:
        return COMPLEX
    raise BackendError(f"unsupported dtype {dt}")


def require_same_backend(*mats: np.ndarray) -> str:
    backends = {backend_of(m) for m in mats}
    if len(backends) != 1:
        raise BackendError(f"mixed scalar backends: {sorted(backends)}")
    return backends.pop()


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    raise BackendError(f"cannot convert {x!r} to an exact rational")


def as_matrix(data, backend: str = RATIONAL) -> np.ndarray:
    """Build a 2-D matrix in ``backend`` from nested sequences or an array.

    Conversion into the rational backend is exact (floats are converted by
    their binary value); strings such as ``"-3/4"`` are accepted.
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if isinstance(data, np.ndarray):
        arr = data
    else:
        rows = [list(r) for r in data]
        if rows and len({len(r) for r in rows}) != 1:
            raise DimensionError("ragged matrix rows")
        ncols = len(rows[0]) if rows else 0
        arr = np.empty((len(rows), ncols), dtype=object)
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                arr[i, j] = x
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if backend == RATIONAL:
        out = np.empty(arr.shape, dtype=object)
        for idx, x in np.ndenumerate(arr):
            out[idx] = to_fraction(x)
        return out
    cast = complex if backend == COMPLEX else float
    out = np.empty(arr.shape, dtype=_DTYPES[backend])
    for idx, x in np.ndenumerate(arr):
        if isinstance(x, str):
            x = Fraction(x.strip())
        if backend == REAL and isinstance(x, (complex, np.complexfloating)):
            raise BackendError(f"complex entry {x!r} in a real matrix")
        out[idx] = cast(x)
    return out


def zeros(shape: tuple[int, int], backend: str) -> np.ndarray:
    if backend == RATIONAL:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=_DTYPES[backend])


def identity(n: int, backend: str = RATIONAL) -> np.ndarray:
    out = zeros((n, n), backend)
    for i in range(n):
        out[i, i] = one(backend)
    return out


def zero(backend: str):
    return {RATIONAL: Fraction(0), REAL: 0.0, COMPLEX: 0j}[backend]


def one(backend: str):
    return {RATIONAL: Fraction(1), REAL: 1.0, COMPLEX: 1 + 0j}[backend]


def matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix product with shape and backend checks."""
    backend = require_same_backend(A, B)
    if A.shape[1] != B.shape[0]:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    if backend != RATIONAL:
        return A @ B
    out = zeros((A.shape[0], B.shape[1]), RATIONAL)
    if A.shape[1] == 0:
        return out
    prod = A @ B
    for idx, x in np.ndenumerate(prod):
        out[idx] = to_fraction(x)
    return out


def transpose(M: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(M.T)


def add(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    require_same_backend(A, B)
    if A.shape != B.shape:
        raise DimensionError(f"cannot add {A.shape} and {B.shape}")
    return A + B


def max_abs_deviation(lhs, rhs):
    """Largest entrywise ``|lhs - rhs|``; exact for rationals."""
    L = np.atleast_2d(np.asarray(lhs, dtype=object if _is_exact(lhs) else None))
    R = np.atleast_2d(np.asarray(rhs, dtype=object if _is_exact(rhs) else None))
    if L.shape != R.shape:
        raise DimensionError(f"cannot compare {L.shape} with {R.shape}")
    if L.size == 0:
        return Fraction(0) if _is_exact(lhs) else 0.0
    if _is_exact(lhs) and _is_exact(rhs):
        return max(abs(to_fraction(a) - to_fraction(b)) for a, b in zip(L.flat, R.flat))
    return float(np.max(np.abs(L.astype(complex) - R.astype(complex))))


def relative_deviation(lhs, rhs) -> float:
    """Max-norm relative deviation ``max|lhs-rhs| / max(max|lhs|, max|rhs|)``.

    Two all-zero operands have deviation 0.
    """
    L = np.atleast_2d(np.asarray(lhs)).astype(complex)
    R = np.atleast_2d(np.asarray(rhs)).astype(complex)
    if L.size == 0:
        return 0.0
    diff = float(np.max(np.abs(L - R)))
    scale = max(float(np.max(np.abs(L))), float(np.max(np.abs(R))))
    if scale == 0.0:
        return 0.0 if diff == 0.0 else float("inf")
    return diff / scale


def _is_exact(x) -> bool:
    if isinstance(x, np.ndarray):
        return x.dtype == object
    return isinstance(x, (Fraction, int))


def scalar_backend(x) -> str:
    if isinstance(x, (Fraction, int)):
        return RATIONAL
    if isinstance(x, complex) or isinstance(x, np.complexfloating):
        return COMPLEX
    if isinstance(x, Number):
        return REAL
    raise BackendError(f"not a scalar: {x!r}")


def random_rational_matrix(rng: np.random.Generator, shape: tuple[int, int],
                           pmax: int = 9, qmax: int = 9) -> np.ndarray:
    """Entries p/q with p uniform in [-pmax, pmax] and q uniform in [1, qmax]."""
    p = rng.integers(-pmax, pmax + 1, size=shape)
    q = rng.integers(1, qmax + 1, size=shape)
    out = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape):
        out[idx] = Fraction(int(p[idx]), int(q[idx]))
    return out


def random_float_matrix(rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=shape)


def random_matrix(rng: np.random.Generator, shape: tuple[int, int], backend: str) -> np.ndarray:
    if backend == RATIONAL:
        return random_rational_matrix(rng, shape)
    if backend == REAL:
        return random_float_matrix(rng, shape)
    return rng.uniform(-1, 1, size=shape) + 1j * rng.uniform(-1, 1, size=shape)


def tree_sum(values: Iterable, start=None):
    """Pairwise (balanced binary tree) sum with a fixed shape for a given length."""
    vals = list(values)
    if not vals:
        return start
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0] if start is None else start + vals[0]
