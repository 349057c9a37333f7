"""Minor summation and exact checks of the Cauchy-Binet family of identities.

All index sets are 0-based.  Every ``verify_*`` function returns an
:class:`~multilin.reports.IdentityReport`; on the rational backend a report
passes only on exact equality.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Callable, Iterable

import numpy as np

from . import scalars
from .exterior import compound, det_lu, det_top_power, pullback_matrix
from .reports import DEFAULT_TOLERANCE, IdentityReport, make_report
from .scalars import RATIONAL, DimensionError, matmul
from .subsets import IndexSet, check_index_set, enumerate_subsets, rank


def _reduce(term: Callable, sigmas: Iterable[IndexSet], start, workers: int = 1):
    """Sum ``term(sigma)`` sequentially, or with a fixed-shape pairwise tree
    when ``workers > 1`` (terms computed concurrently, order preserved)."""
    if workers <= 1:
        total = start
        for s in sigmas:
            total = total + term(s)
        return total
    with ThreadPoolExecutor(max_workers=workers) as pool:
        terms = list(pool.map(term, sigmas))
    return scalars.tree_sum(terms, start)


def minor(M: np.ndarray, rows, cols):
    """Determinant of the submatrix on ``rows`` x ``cols``."""
    r, c = M.shape
    rows = check_index_set(rows, r)
    cols = check_index_set(cols, c)
    if len(rows) != len(cols):
        raise DimensionError(f"minor needs |rows| == |cols|, got {len(rows)} and {len(cols)}")
    return det_lu(M[np.ix_(rows, cols)]) if rows else scalars.one(scalars.backend_of(M))


def _check_cb_shapes(A: np.ndarray, B: np.ndarray) -> tuple[int, int]:
    scalars.require_same_backend(A, B)
    n, N = A.shape
    if B.shape[0] != N:
        raise DimensionError(f"A has {N} columns but B has {B.shape[0]} rows")
    if B.shape[1] != n:
        raise DimensionError(f"A has {n} rows but B has {B.shape[1]} columns")
    return n, N


def cauchy_binet_sum(A: np.ndarray, B: np.ndarray, workers: int = 1):
    """Sum over n-subsets s of {0..N-1} of ``det(A[:, s]) * det(B[s, :])``.

    Empty when n > N, in which case the result is 0.
    """
    n, N = _check_cb_shapes(A, B)
    everything = tuple(range(n))

    def term(s):
        return minor(A, everything, s) * minor(B, s, everything)

    return _reduce(term, enumerate_subsets(N, n), scalars.zero(scalars.backend_of(A)), workers)


def verify_classical(A: np.ndarray, B: np.ndarray, seed: int | None = None,
                     tolerance: float = DEFAULT_TOLERANCE, workers: int = 1) -> IdentityReport:
    """det(A B) against the minor sum."""
    n, N = _check_cb_shapes(A, B)
    backend = scalars.backend_of(A)
    lhs = det_top_power(matmul(A, B))
    rhs = cauchy_binet_sum(A, B, workers)
    return make_report("classical", lhs, rhs, backend, {"n": n, "N": N}, seed, tolerance)


def verify_pythagorean(A: np.ndarray, seed: int | None = None,
                       tolerance: float = DEFAULT_TOLERANCE) -> IdentityReport:
    """det(A A^T) against the sum of squared maximal minors; also checks the sum is >= 0."""
    backend = scalars.backend_of(A)
    if backend == scalars.COMPLEX:
        raise scalars.BackendError("the Pythagorean identity is stated for real matrices")
    n, N = A.shape
    lhs = det_top_power(matmul(A, scalars.transpose(A)))
    everything = tuple(range(n))
    rhs = scalars.zero(backend)
    for s in enumerate_subsets(N, n):
        m = minor(A, everything, s)
        rhs += m * m
    return make_report("pythagorean", lhs, rhs, backend, {"n": n, "N": N}, seed, tolerance,
                       side_condition=rhs >= 0)


@dataclass(frozen=True)
class Decomposition:
    """Coordinate splitting V = V_s (+) V_rest of an N-dimensional space."""

    sigma: IndexSet
    N: int

    def __post_init__(self):
        object.__setattr__(self, "sigma", check_index_set(self.sigma, self.N))

    @property
    def n(self) -> int:
        return len(self.sigma)


def embedding_matrix(d: Decomposition, backend: str = RATIONAL) -> np.ndarray:
    """N x n; column r is the standard basis vector with index ``sigma[r]``."""
    E = scalars.zeros((d.N, d.n), backend)
    for r, i in enumerate(d.sigma):
        E[i, r] = scalars.one(backend)
    return E


def projection_matrix(d: Decomposition, backend: str = RATIONAL) -> np.ndarray:
    """n x N projection onto V_s along the complementary coordinates."""
    return scalars.transpose(embedding_matrix(d, backend))


def verify_abstract(A: np.ndarray, B: np.ndarray, n: int, seed: int | None = None,
                    tolerance: float = DEFAULT_TOLERANCE, workers: int = 1) -> IdentityReport:
    """Operator form at level n: (AB)^* == sum_s (P_s B)^* (A E_s)^*.

    ``A`` is w x N and ``B`` is N x u for arbitrary w, u.  The left side uses
    elimination minors and the right side uses wedge-built pullbacks, so the
    two sides share no determinant code.
    """
    backend = scalars.require_same_backend(A, B)
    w, N = A.shape
    if B.shape[0] != N:
        raise DimensionError(f"A has {N} columns but B has {B.shape[0]} rows")
    u = B.shape[1]
    if n < 0:
        raise DimensionError(f"negative level {n}")
    lhs = pullback_matrix(matmul(A, B), n)

    def term(s):
        d = Decomposition(s, N)
        PB = matmul(projection_matrix(d, backend), B)
        AE = matmul(A, embedding_matrix(d, backend))
        return matmul(pullback_matrix(PB, n, "wedge"), pullback_matrix(AE, n, "wedge"))

    rhs = _reduce(term, enumerate_subsets(N, n), scalars.zeros((comb(u, n), comb(w, n)), backend),
                  workers)
    return make_report("abstract", lhs, rhs, backend, {"w": w, "u": u, "N": N, "level": n},
                       seed, tolerance)


def wedge_projection(N: int, n: int, sigma, backend: str = RATIONAL) -> np.ndarray:
    """1 x C(N,n) coordinate projection of the n-th power onto the line of ``sigma``."""
    sigma = check_index_set(sigma, N)
    P = scalars.zeros((1, comb(N, n)), backend)
    P[0, rank(sigma, N)] = scalars.one(backend)
    return P


def wedge_embedding(N: int, n: int, sigma, backend: str = RATIONAL) -> np.ndarray:
    """C(N,n) x 1 embedding of the line of ``sigma`` into the n-th power."""
    return scalars.transpose(wedge_projection(N, n, sigma, backend))


def verify_lemma1(N: int, n: int, sigma, backend: str = RATIONAL) -> IdentityReport:
    """The direct-sum projection/embedding on the n-th power are the pullbacks
    of the subspace embedding/projection respectively."""
    sigma = check_index_set(sigma, N)
    if len(sigma) != n:
        raise DimensionError(f"index set {sigma} does not have size {n}")
    d = Decomposition(sigma, N)
    lhs = np.concatenate([wedge_projection(N, n, sigma, backend).ravel(),
                          wedge_embedding(N, n, sigma, backend).ravel()])[None, :]
    rhs = np.concatenate([pullback_matrix(embedding_matrix(d, backend), n).ravel(),
                          pullback_matrix(projection_matrix(d, backend), n).ravel()])[None, :]
    return make_report("lemma1", lhs, rhs, backend, {"N": N, "n": n, "sigma": list(sigma)})


def verify_partition_of_identity(N: int, n: int, backend: str = RATIONAL) -> IdentityReport:
    """sum_s E_s P_s over the n-th power equals the identity."""
    if n > N:
        raise DimensionError(f"level {n} exceeds dimension {N}")
    K = comb(N, n)
    # each E_s P_s is an outer product; multiply over nonzero entries only,
    # since dense K x K rational sums dominate the cost for N around 8
    acc = {}
    for s in enumerate_subsets(N, n):
        E, P = wedge_embedding(N, n, s, backend), wedge_projection(N, n, s, backend)
        for i in np.flatnonzero(E[:, 0]):
            for j in np.flatnonzero(P[0, :]):
                acc[i, j] = acc.get((i, j), scalars.zero(backend)) + E[i, 0] * P[0, j]
    rhs = scalars.zeros((K, K), backend)
    for (i, j), v in acc.items():
        rhs[i, j] = v
    return make_report("partition_of_identity", scalars.identity(K, backend), rhs, backend,
                       {"N": N, "n": n})


def phi_identify(sigma, backend: str = RATIONAL) -> np.ndarray:
    """Matrix of the canonical bijection V_s -> U sending the r-th basis vector
    of V_s to the r-th standard basis vector: the n x n identity in
    V_s coordinates."""
    return scalars.identity(len(check_index_set(sigma)), backend)


def verify_identified(A: np.ndarray, B: np.ndarray, seed: int | None = None,
                      tolerance: float = DEFAULT_TOLERANCE) -> IdentityReport:
    """det(AB) == sum_s det(phi P_s B) det(A E_s phi^-1), with explicit matrices.

    Any other choice of identification rescales the two factors inversely;
    only the canonical one is implemented.
    """
    n, N = _check_cb_shapes(A, B)
    backend = scalars.backend_of(A)
    lhs = det_top_power(matmul(A, B))
    rhs = scalars.zero(backend)
    for s in enumerate_subsets(N, n):
        d = Decomposition(s, N)
        phi = phi_identify(s, backend)
        # canonical phi is its own inverse
        left = matmul(phi, matmul(projection_matrix(d, backend), B))
        right = matmul(matmul(A, embedding_matrix(d, backend)), phi)
        rhs += det_top_power(left) * det_top_power(right)
    return make_report("identified", lhs, rhs, backend, {"n": n, "N": N}, seed, tolerance)


def verify_multiplicativity(M: np.ndarray, K: np.ndarray, n: int, seed: int | None = None,
                            tolerance: float = DEFAULT_TOLERANCE) -> IdentityReport:
    """pullback(MK) == pullback(K) pullback(M) at level n."""
    backend = scalars.require_same_backend(M, K)
    if M.shape[1] != K.shape[0]:
        raise DimensionError(f"cannot compose {M.shape} with {K.shape}")
    lhs = pullback_matrix(matmul(M, K), n)
    rhs = matmul(pullback_matrix(K, n, "wedge"), pullback_matrix(M, n, "wedge"))
    r, m = M.shape
    return make_report("multiplicativity", lhs, rhs, backend,
                       {"r": r, "m": m, "c": K.shape[1], "level": n}, seed, tolerance)


def verify_determinant(M: np.ndarray, seed: int | None = None,
                       tolerance: float = DEFAULT_TOLERANCE) -> IdentityReport:
    """Top-power determinant against elimination."""
    backend = scalars.backend_of(M)
    return make_report("determinant", det_top_power(M), det_lu(M), backend, {"d": M.shape[0]},
                       seed, tolerance)


def compound_product_entry(A: np.ndarray, B: np.ndarray):
    """The single entry of compound(AB, n) for n x N times N x n factors."""
    n = A.shape[0]
    return compound(matmul(A, B), n)[0, 0]
