"""Independent reference computations used only by the tests.

Nothing here calls into the elimination or wedge code under test.
"""

from fractions import Fraction
from itertools import combinations, permutations
from math import prod

import sympy as sp


def perm_sign(p):
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def leibniz_det(rows):
    """Permutation-sum determinant of a list-of-lists."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    return sum(perm_sign(p) * prod(rows[i][p[i]] for i in range(n)) for p in permutations(range(n)))


def antisymmetrized_basis_value(sigma, xs):
    """(e_s1 ^ ... ^ e_sn)[x_1..x_n] as the antisymmetrized tensor product
    sum_pi sgn(pi) prod_i x_{pi(i)}[s_i]."""
    n = len(sigma)
    return sum(perm_sign(p) * prod(xs[p[i]][sigma[i]] for i in range(n)) for p in permutations(range(n)))


def sympy_matrix(M):
    return sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in row] for row in M])


def sympy_det(M) -> Fraction:
    d = sympy_matrix(M).det()
    return Fraction(int(d.p), int(d.q))


def sympy_rank(M) -> int:
    return sympy_matrix(M).rank()


def brute_compound(M, n):
    """Minors by Leibniz over every (row set, column set) pair."""
    r, c = len(M), len(M[0]) if len(M) else 0
    return [[leibniz_det([[M[i][j] for j in cs] for i in rs]) for cs in combinations(range(c), n)]
            for rs in combinations(range(r), n)]
