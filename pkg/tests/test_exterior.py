from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multilin.exterior import (
    AlternatingTensor, basis_tensor, compound, det_lu, det_top_power, evaluate, pullback,
    pullback_matrix, wedge,
)
from multilin.scalars import BackendError, DimensionError, as_matrix, identity, matmul
from multilin.subsets import enumerate_subsets
from oracles import antisymmetrized_basis_value, brute_compound, leibniz_det, sympy_det, sympy_rank

small_fractions = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 9))


@st.composite
def rational_matrices(draw, rows=None, cols=None, max_dim=5):
    r = rows if rows is not None else draw(st.integers(1, max_dim))
    c = cols if cols is not None else draw(st.integers(1, max_dim))
    return as_matrix([[draw(small_fractions) for _ in range(c)] for _ in range(r)])


@st.composite
def tensors(draw, level, dim):
    keys = list(enumerate_subsets(dim, level))
    coeffs = draw(st.lists(small_fractions, min_size=len(keys), max_size=len(keys)))
    return AlternatingTensor(level, dim, dict(zip(keys, coeffs)))


def frac_vectors(n, dim):
    return st.lists(st.lists(small_fractions, min_size=dim, max_size=dim), min_size=n, max_size=n)


# -- evaluate ---------------------------------------------------------------

def test_evaluate_examples():
    e01 = basis_tensor([0, 1], 2)
    assert evaluate(e01, [[1, 0], [0, 1]]) == 1
    assert evaluate(e01, [[0, 1], [1, 0]]) == -1
    assert evaluate(basis_tensor([0, 1], 3), [[1, 2, 5], [3, 4, 6]]) == -2


def test_evaluate_level_zero_and_errors():
    c = AlternatingTensor(0, 3, {(): Fraction(5, 2)})
    assert evaluate(c, []) == Fraction(5, 2)
    e01 = basis_tensor([0, 1], 3)
    with pytest.raises(DimensionError):
        evaluate(e01, [[1, 2, 3]])
    with pytest.raises(DimensionError):
        evaluate(e01, [[1, 2], [3, 4]])
    with pytest.raises(BackendError):
        evaluate(e01, [[1.5, 2, 3], [3, 4, 5]])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(n, 5))).flatmap(lambda nd: st.tuples(
        tensors(*nd), frac_vectors(*nd))))
def test_evaluate_matches_antisymmetrized_expansion(args):
    omega, xs = args
    expected = sum((c * antisymmetrized_basis_value(s, xs) for s, c in omega.coeffs.items()), Fraction(0))
    assert evaluate(omega, xs) == expected


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.tuples(
    tensors(n, 5), frac_vectors(n, 5), st.integers(0, n - 1), st.integers(0, n - 1))))
def test_alternation(args):
    omega, xs, i, j = args
    if i == j:
        j = (i + 1) % len(xs)
    repeated = list(xs)
    repeated[j] = repeated[i]
    assert evaluate(omega, repeated) == 0
    swapped = list(xs)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    assert evaluate(omega, swapped) == -evaluate(omega, xs)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    tensors(n, 4), frac_vectors(n, 4), frac_vectors(1, 4), small_fractions, small_fractions,
    st.integers(0, n - 1))))
def test_multilinearity(args):
    omega, xs, (y,), alpha, beta, slot = args
    mixed = list(xs)
    mixed[slot] = [alpha * a + beta * b for a, b in zip(xs[slot], y)]
    with_y = list(xs)
    with_y[slot] = y
    assert evaluate(omega, mixed) == alpha * evaluate(omega, xs) + beta * evaluate(omega, with_y)


# -- wedge ------------------------------------------------------------------

def test_wedge_of_two_covectors():
    w = basis_tensor([0], 2) ^ basis_tensor([1], 2)
    x, y = [Fraction(3), Fraction(-2)], [Fraction(5), Fraction(7)]
    assert evaluate(w, [x, y]) == x[0] * y[1] - x[1] * y[0]


def test_wedge_alternation_and_antisymmetry():
    assert wedge(basis_tensor([0], 3), basis_tensor([0], 3)).is_zero()
    assert basis_tensor([1, 0], 2) == -basis_tensor([0, 1], 2)


def test_basis_merge_sign():
    # (0,3) ^ (1,2): sorting 0,3,1,2 needs two transpositions
    w = wedge(basis_tensor([0, 3], 4), basis_tensor([1, 2], 4))
    assert w.coeffs == {(0, 1, 2, 3): Fraction(1)}
    w = wedge(basis_tensor([2], 4), basis_tensor([0, 3], 4))
    assert w.coeffs == {(0, 2, 3): Fraction(-1)}


def test_wedge_level_beyond_dimension_is_zero():
    assert wedge(basis_tensor([0, 1], 2), basis_tensor([0], 2)).is_zero()


def test_wedge_rejects_mismatches():
    with pytest.raises(DimensionError):
        wedge(basis_tensor([0], 2), basis_tensor([0], 3))
    with pytest.raises(BackendError):
        wedge(basis_tensor([0], 2), basis_tensor([1], 2, backend="real"))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 6).flatmap(lambda N: st.tuples(
    st.integers(0, min(4, N)), st.integers(0, min(4, N)), st.just(N))).flatmap(
        lambda pqN: st.tuples(tensors(pqN[0], pqN[2]), tensors(pqN[1], pqN[2]))))
def test_wedge_graded_commutativity(args):
    omega, eta = args
    sign = -1 if (omega.level * eta.level) % 2 else 1
    assert wedge(eta, omega) == wedge(omega, eta).scale(sign)


@settings(max_examples=40, deadline=None)
@given(st.tuples(tensors(1, 5), tensors(2, 5), tensors(1, 5), small_fractions))
def test_wedge_associative_and_bilinear(args):
    a, b, c, k = args
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
    assert wedge(a.scale(k) + c, b) == wedge(a, b).scale(k) + wedge(c, b)


def test_tensor_vector_roundtrip():
    t = AlternatingTensor(2, 4, {(0, 3): Fraction(2), (1, 2): Fraction(-1, 3)})
    v = t.to_vector()
    assert len(v) == comb(4, 2)
    assert AlternatingTensor.from_vector(v, 2, 4) == t


def test_tensor_drops_zero_and_validates():
    assert AlternatingTensor(1, 2, {(0,): 0}).is_zero()
    with pytest.raises(DimensionError):
        AlternatingTensor(2, 3, {(1, 0): 1})
    with pytest.raises(DimensionError):
        AlternatingTensor(2, 3, {(0,): 1})


# -- compound and pullback --------------------------------------------------

M23 = as_matrix([[1, 2, 3], [4, 5, 6]])


@pytest.mark.parametrize("method", ["minors", "wedge"])
def test_compound_examples(method):
    for N in range(1, 6):
        for n in range(0, N + 1):
            assert np.array_equal(compound(identity(N), n, method), identity(comb(N, n)))
    assert compound(M23, 2, method).tolist() == [[-3, -6, -3]]
    assert np.array_equal(compound(M23, 1, method), M23)
    K = as_matrix([[2, -1, 0], [1, 3, 1], [0, 1, 4]])
    # frozen from sympy minors
    assert compound(K, 2, method).tolist() == [[7, 2, -1], [2, 8, -4], [1, 4, 11]]


@pytest.mark.parametrize("method", ["minors", "wedge"])
def test_compound_degenerate_levels(method):
    assert compound(M23, 0, method).tolist() == [[1]]
    assert compound(M23, 3, method).shape == (0, 1)
    with pytest.raises(DimensionError):
        compound(M23, -1, method)


@settings(max_examples=40, deadline=None)
@given(rational_matrices(max_dim=5), st.integers(0, 4))
def test_compound_methods_match_leibniz(M, n):
    expected = brute_compound(M.tolist(), n) if n else [[1]]
    if comb(M.shape[0], n) and comb(M.shape[1], n):
        assert compound(M, n).tolist() == expected
        assert compound(M, n, "wedge").tolist() == expected


def test_compound_float_matches_exact(rng):
    from multilin.scalars import random_rational_matrix
    M = random_rational_matrix(rng, (4, 5))
    exact = compound(M, 3).astype(float)
    approx = compound(M.astype(float), 3)
    assert np.allclose(approx, exact, rtol=1e-12, atol=1e-12)
    assert np.allclose(compound(M.astype(float), 3, "wedge"), exact, rtol=1e-12, atol=1e-12)


def test_pullback_examples():
    assert np.array_equal(pullback_matrix(identity(4), 2), identity(6))
    assert pullback_matrix(as_matrix([[7]]), 1).tolist() == [[7]]


def test_pullback_matrix_contravariance(rng):
    from multilin.scalars import random_rational_matrix
    A = random_rational_matrix(rng, (4, 3))
    B = random_rational_matrix(rng, (3, 5))
    lhs = pullback_matrix(matmul(A, B), 2)
    rhs = matmul(pullback_matrix(B, 2), pullback_matrix(A, 2))
    assert np.array_equal(lhs, rhs)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    tensors(n, 4), rational_matrices(rows=4, cols=3), frac_vectors(n, 3))))
def test_pullback_of_tensor_is_precomposition(args):
    omega, M, xs = args
    Mx = [list(matmul(M, as_matrix([[v] for v in x]))[:, 0]) for x in xs]
    assert evaluate(pullback(omega, M), xs) == evaluate(omega, Mx)


@settings(max_examples=60, deadline=None)
@given(rational_matrices(max_dim=4), st.data())
def test_compound_multiplicativity(M, data):
    K = data.draw(rational_matrices(rows=M.shape[1], max_dim=4))
    for n in range(0, min(M.shape[0], M.shape[1], K.shape[1]) + 1):
        assert np.array_equal(compound(matmul(M, K), n), matmul(compound(M, n), compound(K, n)))


@pytest.mark.parametrize("seed", range(6))
def test_compound_vanishes_iff_rank_below_level(seed):
    rng = np.random.default_rng(seed)
    for rank_target in range(0, 5):
        L = rng.integers(-3, 4, size=(4, rank_target))
        R = rng.integers(-3, 4, size=(rank_target, 5))
        M = as_matrix((L @ R).tolist()) if rank_target else as_matrix([[0] * 5] * 4)
        true_rank = sympy_rank(M)
        for n in range(1, 5):
            C = compound(M, n)
            assert (not any(C.flat)) == (true_rank < n)


# -- determinants -----------------------------------------------------------

def test_det_examples():
    for d in range(0, 5):
        assert det_top_power(identity(d)) == 1
        assert det_lu(identity(d)) == 1
    assert det_top_power(as_matrix([[Fraction(-7, 3)]])) == Fraction(-7, 3)
    assert det_top_power(as_matrix([[2, 1], [1, 1]])) == 1
    assert det_lu(as_matrix([[1, 2, 3], [2, 4, 6], [-1, -2, -3]])) == 0
    M = as_matrix([["1/2", 2, -3, "4/7"], [0, "-5/3", 1, 2], [3, 1, "1/9", -1], [2, -2, 2, "5/2"]])
    # frozen from sympy
    assert det_top_power(M) == Fraction(-563, 126)
    assert det_lu(M) == Fraction(-563, 126)


def test_det_rejects_non_square():
    with pytest.raises(DimensionError):
        det_lu(M23)
    with pytest.raises(DimensionError):
        det_top_power(M23)


def test_det_cross_oracle_200_rational(rng):
    from multilin.scalars import random_rational_matrix
    for _ in range(200):
        M = random_rational_matrix(rng, (4, 4))
        assert det_lu(M) == det_top_power(M)


def test_det_against_independent_oracles(rng):
    from multilin.scalars import random_rational_matrix
    for d in range(1, 6):
        M = random_rational_matrix(rng, (d, d))
        assert det_lu(M) == sympy_det(M) == leibniz_det(M.tolist())


def test_det_needs_pivoting():
    M = as_matrix([[0, 1, 2], [1, 0, 3], [4, -3, 8]])
    assert det_lu(M) == leibniz_det(M.tolist()) == det_top_power(M)


def test_float_det_agreement(rng):
    for d in range(1, 9):
        M = rng.uniform(-1, 1, size=(d, d))
        a, b = det_top_power(M), det_lu(M)
        assert abs(a - b) <= 1e-9 * max(abs(a), abs(b))
    Z = rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3))
    assert abs(det_top_power(Z) - det_lu(Z)) < 1e-12
