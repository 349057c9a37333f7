"""Alternating tensors, wedge products, compound matrices and determinants.

Conventions
-----------
A level-n alternating tensor on an N-dimensional space is stored as sparse
coefficients on the basis ``e_s = e_{s1} ^ ... ^ e_{sn}`` indexed by
increasing tuples ``s``, where ``e_i`` is the i-th coordinate functional.
Thus ``e_s[x_1, ..., x_n] = det(X[:, s])`` with ``X`` the matrix whose rows
are the ``x_i``.

An ``r x c`` matrix ``M`` maps c-space to r-space.  Its compound at level n
holds all n x n minors, rows and columns in lexicographic rank order.  The
pullback ``M^*`` sends level-n tensors on r-space to level-n tensors on
c-space and its matrix in the induced bases is the transposed compound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Mapping, Sequence

import numpy as np

from . import scalars
from .scalars import RATIONAL, BackendError, DimensionError
from .subsets import IndexSet, check_index_set, enumerate_subsets, rank

__all__ = [
    "AlternatingTensor",
    "basis_tensor",
    "compound",
    "det_lu",
    "det_top_power",
    "evaluate",
    "pullback",
    "pullback_matrix",
    "wedge",
]


# -- determinants ----------------------------------------------------------

def _bareiss(a: list[list[int]]) -> int:
    """Fraction-free elimination on an integer matrix (modified in place)."""
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                # exact by Sylvester's identity
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def _det_exact(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    scale = 1
    ints = []
    for row in rows:
        m = lcm(*(x.denominator for x in row)) if len(row) else 1
        scale *= m
        ints.append([x.numerator * (m // x.denominator) for x in row])
    return Fraction(_bareiss(ints), scale)


def _check_square(M: np.ndarray) -> int:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"determinant of non-square matrix with shape {M.shape}")
    return M.shape[0]


def det_lu(M: np.ndarray):
    """Determinant by elimination.

    Exact rationals go through Bareiss elimination after clearing row
    denominators; float backends use LAPACK's partially pivoted LU.
    """
    d = _check_square(M)
    backend = scalars.backend_of(M)
    if backend == RATIONAL:
        return _det_exact([list(r) for r in M]) if d else Fraction(1)
    val = np.linalg.det(M) if d else 1.0
    return complex(val) if backend == scalars.COMPLEX else float(val)


def _laplace(m) -> object:
    d = len(m)
    if d == 1:
        return m[0][0]
    if d == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _minor_exact(M: np.ndarray, rows: IndexSet, cols: IndexSet) -> Fraction:
    sub = [[M[i, j] for j in cols] for i in rows]
    if not sub:
        return Fraction(1)
    if len(sub) <= 3:
        return _laplace(sub)
    return _det_exact(sub)


# -- alternating tensors ---------------------------------------------------

@dataclass(frozen=True)
class AlternatingTensor:
    """Level-``level`` alternating tensor on a ``dim``-dimensional space.

    ``coeffs`` maps increasing index tuples to scalars; missing keys are zero
    and explicit zeros are dropped on construction, so equality is
    coefficientwise.
    """

    level: int
    dim: int
    coeffs: Mapping[IndexSet, object] = field(default_factory=dict)
    backend: str = RATIONAL

    def __post_init__(self):
        if self.level < 0 or self.dim < 0:
            raise DimensionError(f"negative level/dim: {self.level}, {self.dim}")
        clean = {}
        for key, c in self.coeffs.items():
            key = check_index_set(key, self.dim)
            if len(key) != self.level:
                raise DimensionError(f"key {key} has wrong length for level {self.level}")
            c = _coerce_scalar(c, self.backend)
            if c != 0:
                clean[key] = c
        object.__setattr__(self, "coeffs", clean)

    def __getitem__(self, key) -> object:
        return self.coeffs.get(tuple(key), scalars.zero(self.backend))

    def __add__(self, other: "AlternatingTensor") -> "AlternatingTensor":
        self._check_compatible(other, same_level=True)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return AlternatingTensor(self.level, self.dim, out, self.backend)

    def __neg__(self) -> "AlternatingTensor":
        return self.scale(-1)

    def __sub__(self, other: "AlternatingTensor") -> "AlternatingTensor":
        return self + (-other)

    def scale(self, c) -> "AlternatingTensor":
        c = _coerce_scalar(c, self.backend)
        return AlternatingTensor(self.level, self.dim,
                                 {k: c * v for k, v in self.coeffs.items()}, self.backend)

    def __xor__(self, other: "AlternatingTensor") -> "AlternatingTensor":
        return wedge(self, other)

    def to_vector(self) -> np.ndarray:
        """Dense coefficient vector in lexicographic basis order."""
        out = scalars.zeros((comb(self.dim, self.level), 1), self.backend)[:, 0]
        for k, c in self.coeffs.items():
            out[rank(k, self.dim)] = c
        return out

    @classmethod
    def from_vector(cls, vec, level: int, dim: int, backend: str = RATIONAL) -> "AlternatingTensor":
        vec = list(vec)
        if len(vec) != comb(dim, level):
            raise DimensionError(f"vector of length {len(vec)} for C({dim},{level})")
        return cls(level, dim, dict(zip(enumerate_subsets(dim, level), vec)), backend)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check_compatible(self, other: "AlternatingTensor", same_level: bool = False):
        if self.backend != other.backend:
            raise BackendError(f"mixed backends {self.backend} / {other.backend}")
        if self.dim != other.dim:
            raise DimensionError(f"ambient dimensions differ: {self.dim} vs {other.dim}")
        if same_level and self.level != other.level:
            raise DimensionError(f"levels differ: {self.level} vs {other.level}")


def _coerce_scalar(c, backend: str):
    kind = scalars.scalar_backend(c)
    if isinstance(c, (int, np.integer)) and not isinstance(c, bool):
        kind = backend  # integers embed into every backend
    if kind != backend:
        raise BackendError(f"{kind} scalar {c!r} used with {backend} backend")
    if backend == RATIONAL:
        return scalars.to_fraction(c)
    return complex(c) if backend == scalars.COMPLEX else float(c)


def basis_tensor(indices: Sequence[int], dim: int, backend: str = RATIONAL) -> AlternatingTensor:
    """The wedge ``e_{i1} ^ ... ^ e_{in}`` for arbitrary (not necessarily sorted) indices."""
    out = AlternatingTensor(0, dim, {(): 1}, backend)
    for i in indices:
        out = wedge(out, AlternatingTensor(1, dim, {(int(i),): 1}, backend))
    return out


def _merge_sign(s: IndexSet, t: IndexSet) -> int:
    # parity of the shuffle that sorts s + t
    inversions = 0
    j = 0
    for a in s:
        while j < len(t) and t[j] < a:
            j += 1
        inversions += j
    return -1 if inversions % 2 else 1


def wedge(omega: AlternatingTensor, eta: AlternatingTensor) -> AlternatingTensor:
    """Antisymmetrized product of a level-p and a level-q tensor."""
    omega._check_compatible(eta)
    level = omega.level + eta.level
    out: dict[IndexSet, object] = {}
    if level <= omega.dim:
        for s, a in omega.coeffs.items():
            ss = set(s)
            for t, b in eta.coeffs.items():
                if ss.intersection(t):
                    continue
                key = tuple(sorted(s + t))
                term = a * b if _merge_sign(s, t) > 0 else -(a * b)
                out[key] = out.get(key, 0) + term
    return AlternatingTensor(level, omega.dim, out, omega.backend)


def _coerce_vectors(xs, dim: int, backend: str) -> np.ndarray:
    if isinstance(xs, np.ndarray) and xs.ndim == 2:
        if scalars.backend_of(xs) != backend:
            raise BackendError(f"{scalars.backend_of(xs)} vectors with {backend} tensor")
        X = xs
    else:
        rows = [list(x) for x in xs]
        for r in rows:
            for c in r:
                _coerce_scalar(c, backend)
        X = scalars.as_matrix(rows, backend) if rows else scalars.zeros((0, dim), backend)
    if X.shape[1] != dim and X.shape[0] > 0:
        raise DimensionError(f"vectors of length {X.shape[1]} for ambient dimension {dim}")
    return X


def evaluate(omega: AlternatingTensor, xs) -> object:
    """``omega[x_1, ..., x_n]`` for n coordinate vectors of length ``dim``."""
    X = _coerce_vectors(xs, omega.dim, omega.backend)
    if X.shape[0] != omega.level:
        raise DimensionError(f"level-{omega.level} tensor applied to {X.shape[0]} vectors")
    rows = tuple(range(omega.level))
    total = scalars.zero(omega.backend)
    for s, c in omega.coeffs.items():
        if omega.backend == RATIONAL:
            total += c * _minor_exact(X, rows, s)
        else:
            total += c * (det_lu(X[:, list(s)]) if s else 1.0)
    return total


# -- compound matrices and pullbacks ----------------------------------------

def _compound_minors(M: np.ndarray, n: int) -> np.ndarray:
    r, c = M.shape
    backend = scalars.backend_of(M)
    R, C = comb(r, n), comb(c, n)
    out = scalars.zeros((R, C), backend)
    if R == 0 or C == 0:
        return out
    rsets = list(enumerate_subsets(r, n))
    csets = list(enumerate_subsets(c, n))
    if backend == RATIONAL:
        for i, rho in enumerate(rsets):
            for j, sig in enumerate(csets):
                out[i, j] = _minor_exact(M, rho, sig)
        return out
    ri = np.array(rsets, dtype=np.intp)
    ci = np.array(csets, dtype=np.intp)
    stack = M[ri[:, None, :, None], ci[None, :, None, :]]
    return np.linalg.det(stack).astype(out.dtype)


def _compound_wedge(M: np.ndarray, n: int) -> np.ndarray:
    r, c = M.shape
    backend = scalars.backend_of(M)
    out = scalars.zeros((comb(r, n), comb(c, n)), backend)
    if out.size == 0:
        return out
    row_forms = [AlternatingTensor(1, c, {(j,): M[i, j] for j in range(c)}, backend)
                 for i in range(r)]
    # wedges of increasing prefixes, grown one row at a time; a prefix is
    # only extended while enough rows remain to reach length n
    layer = {(): AlternatingTensor(0, c, {(): 1}, backend)}
    for k in range(n):
        layer = {rho + (i,): wedge(w, row_forms[i])
                 for rho, w in layer.items()
                 for i in range(rho[-1] + 1 if rho else 0, r - n + k + 1)}
    csets = list(enumerate_subsets(c, n))
    for i, rho in enumerate(enumerate_subsets(r, n)):
        w = layer[rho]
        for j, sig in enumerate(csets):
            out[i, j] = w[sig]
    return out


def compound(M: np.ndarray, n: int, method: str = "minors") -> np.ndarray:
    """n-th compound matrix of ``M`` (shape ``C(r,n) x C(c,n)``).

    ``method="minors"`` computes each minor by elimination (Laplace for
    n <= 3 on rationals).  ``method="wedge"`` obtains row ``rho`` as the
    coefficients of the wedge of the rows of ``M`` indexed by ``rho``, each
    row read as a 1-form; it never calls a determinant routine.
    """
    if n < 0:
        raise DimensionError(f"negative level {n}")
    M = np.asarray(M)
    if M.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {M.shape}")
    backend = scalars.backend_of(M)
    if n == 0:
        return scalars.identity(1, backend)
    if method == "minors":
        return _compound_minors(M, n)
    if method == "wedge":
        return _compound_wedge(M, n)
    raise ValueError(f"unknown compound method {method!r}")


def pullback_matrix(M: np.ndarray, n: int, method: str = "minors") -> np.ndarray:
    """Matrix of the level-n pullback, ``C(c,n) x C(r,n)``; the transposed compound."""
    return scalars.transpose(compound(M, n, method))


def pullback(omega: AlternatingTensor, M: np.ndarray) -> AlternatingTensor:
    """``(M^* omega)[x_1..x_n] = omega[M x_1, ..., M x_n]``."""
    r, c = M.shape
    if scalars.backend_of(M) != omega.backend:
        raise BackendError(f"{scalars.backend_of(M)} matrix with {omega.backend} tensor")
    if omega.dim != r:
        raise DimensionError(f"tensor on dimension {omega.dim} pulled back by a {r}x{c} map")
    P = pullback_matrix(M, omega.level)
    vec = omega.to_vector()
    coeffs = [sum((P[i, j] * vec[j] for j in range(P.shape[1])), scalars.zero(omega.backend))
              for i in range(P.shape[0])]
    return AlternatingTensor.from_vector(coeffs, omega.level, c, omega.backend)


def det_top_power(M: np.ndarray):
    """Determinant as the scalar by which the pullback acts on the top power.

    The d-th level pullback of a d x d map acts on a one-dimensional space;
    that scalar is computed by wedging the rows of ``M`` as 1-forms.
    """
    d = _check_square(np.asarray(M))
    return compound(M, d, method="wedge")[0, 0]
