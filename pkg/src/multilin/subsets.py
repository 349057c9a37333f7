"""Index sets: strictly increasing tuples of integers, in lexicographic order.

An index set over ``{0, ..., N-1}`` is an ordinary ``tuple[int, ...]``.
The basis of the n-th exterior power is ordered lexicographically, so
``rank``/``unrank`` translate between an index set and its position.
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterator, Sequence

from .scalars import DimensionError

IndexSet = tuple[int, ...]


def check_index_set(sigma: Sequence[int], N: int | None = None, lo: int = 0) -> IndexSet:
    """Validate strict increase and (optionally) membership in ``{lo, ..., lo+N-1}``."""
    sigma = tuple(int(i) for i in sigma)
    for a, b in zip(sigma, sigma[1:]):
        if not a < b:
            raise DimensionError(f"index set {sigma} is not strictly increasing")
    if N is not None and sigma and (sigma[0] < lo or sigma[-1] >= lo + N):
        raise DimensionError(f"index set {sigma} leaves the universe {{{lo},...,{lo + N - 1}}}")
    return sigma


def enumerate_subsets(N: int, n: int) -> Iterator[IndexSet]:
    """All n-subsets of ``{0, ..., N-1}`` in lexicographic order.

    ``n > N`` gives an empty stream; ``n == 0`` gives the single empty set.
    """
    if N < 0 or n < 0:
        raise ValueError(f"negative sizes: N={N}, n={n}")
    return combinations(range(N), n)


def rank(sigma: Sequence[int], N: int) -> int:
    """Lexicographic position of ``sigma`` among the n-subsets of ``{0..N-1}``."""
    sigma = check_index_set(sigma, N)
    n = len(sigma)
    # complement trick: lex rank = C(N,n) - 1 - colex rank of the reversed set
    return comb(N, n) - 1 - sum(comb(N - 1 - s, n - i) for i, s in enumerate(sigma))


def unrank(N: int, n: int, r: int) -> IndexSet:
    """Inverse of :func:`rank`."""
    total = comb(N, n) if 0 <= n <= N else 0
    if not 0 <= r < total:
        raise DimensionError(f"rank {r} out of range for C({N},{n}) = {total}")
    out = []
    lo = 0
    for i in range(n):
        # skip blocks of subsets whose i-th element is smaller than the answer
        for s in range(lo, N):
            block = comb(N - 1 - s, n - 1 - i)
            if r < block:
                out.append(s)
                lo = s + 1
                break
            r -= block
    return tuple(out)


def complement(sigma: Sequence[int], N: int) -> IndexSet:
    s = set(sigma)
    return tuple(i for i in range(N) if i not in s)
