"""Fourier coefficients on [0, 1], Gram determinants and the truncated
multilinear Parseval sum.

For families ``a_1..a_n`` and ``b_1..b_n`` in L^2[0,1],

    det[ int conj(a_j) b_k ]  =  sum over s_1 < ... < s_n of
                                 det[conj(a^_j(s_k))] * det[b^_j(s_k)]

with ``x^(k) = int x(t) exp(-2 pi i k t) dt``.  Here the sum runs over the
window ``{-M, ..., M}`` and the truncation error is reported.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, islice, product
from typing import Iterator, Mapping, Sequence

import numpy as np

from .reports import IdentityReport, make_report
from .scalars import COMPLEX, tree_sum

_CHUNK = 1 << 14


class WindowError(ValueError):
    """Truncation window too small for the order of the identity."""


class AliasingError(ValueError):
    """Fourier coefficient requested outside the alias-safe range of a sampled function."""


def _monomial_coeff(p: int, k: int) -> complex:
    """Fourier coefficient of t**p at frequency k."""
    if k == 0:
        return 1.0 / (p + 1)
    w = 2 * math.pi * k
    # integration by parts: I_p = i/w + (p/(i w)) I_{p-1}, I_0 = 0
    val = 0j
    for q in range(1, p + 1):
        val = 1j / w + (q / (1j * w)) * val
    return val


def _monomial_decay(p: int) -> float:
    """c with |coefficient of t**p at k| <= c/|k| for all k != 0."""
    c = 0.0
    for q in range(1, p + 1):
        c = (1 + q * c) / (2 * math.pi)
    return c


@dataclass(frozen=True)
class AnalyticFunction:
    """``sum_p poly[p-1] t**p  +  sum_k trig[k] e_k(t)`` with closed-form coefficients.

    ``poly`` starts at degree 1; constants live in ``trig[0]``.
    """

    poly: tuple[complex, ...] = ()
    trig: Mapping[int, complex] = field(default_factory=dict)
    label: str = ""

    kind = "analytic"

    def __post_init__(self):
        poly = tuple(complex(c) for c in self.poly)
        while poly and poly[-1] == 0:
            poly = poly[:-1]
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "trig", {int(k): complex(c) for k, c in self.trig.items() if c != 0})

    # constructors -------------------------------------------------------
    @classmethod
    def basis(cls, m: int) -> "AnalyticFunction":
        return cls(trig={m: 1.0}, label=f"e_{m}")

    @classmethod
    def power(cls, degree: int) -> "AnalyticFunction":
        if degree < 1:
            raise ValueError(f"poly_t degree must be >= 1, got {degree}")
        return cls(poly=(0,) * (degree - 1) + (1,), label="t" if degree == 1 else f"t^{degree}")

    @classmethod
    def trig_poly(cls, coeffs: Mapping[int, complex], label: str = "trig") -> "AnalyticFunction":
        return cls(trig=dict(coeffs), label=label)

    # coefficients -------------------------------------------------------
    def coeff(self, k: int) -> complex:
        val = self.trig.get(k, 0j)
        for p, c in enumerate(self.poly, start=1):
            if c:
                val += c * _monomial_coeff(p, k)
        return complex(val)

    def coeffs(self, ks: Sequence[int]) -> np.ndarray:
        return np.array([self.coeff(int(k)) for k in ks], dtype=complex)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for p, c in enumerate(self.poly, start=1):
            out += c * t ** p
        for k, c in self.trig.items():
            out += c * np.exp(2j * np.pi * k * t)
        return out

    @property
    def finite_support(self) -> bool:
        return not self.poly

    @property
    def trig_radius(self) -> int:
        return max((abs(k) for k in self.trig), default=0)

    @property
    def decay_constant(self) -> float:
        """c with |coefficient at k| <= c/|k| for |k| beyond ``trig_radius``."""
        return sum(abs(c) * _monomial_decay(p) for p, c in enumerate(self.poly, start=1))

    def inner(self, other: "AnalyticFunction") -> complex:
        """Exact ``int conj(self) * other`` over [0, 1]."""
        total = 0j
        for p, a in enumerate(self.poly, start=1):
            for q, b in enumerate(other.poly, start=1):
                total += a.conjugate() * b / (p + q + 1)
            for k, b in other.trig.items():
                total += a.conjugate() * b * _monomial_coeff(p, k).conjugate()
        for k, a in self.trig.items():
            for q, b in enumerate(other.poly, start=1):
                total += a.conjugate() * b * _monomial_coeff(q, k)
            total += a.conjugate() * other.trig.get(k, 0j)
        return total

    def sampled(self, T: int) -> "SampledFunction":
        return SampledFunction(self(np.arange(T) / T), label=self.label)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """T uniform samples at t_j = j/T, T a power of two."""

    samples: np.ndarray
    label: str = ""

    kind = "sampled"

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        T = s.shape[0] if s.ndim == 1 else 0
        if T < 2 or T & (T - 1):
            raise ValueError(f"sample count must be a power of two >= 2, got {T}")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "_spectrum", np.fft.fft(s) / T)

    @property
    def T(self) -> int:
        return self.samples.shape[0]

    @property
    def max_frequency(self) -> int:
        return self.T // 2 - 1

    def coeff(self, k: int) -> complex:
        return complex(self.coeffs([k])[0])

    def coeffs(self, ks: Sequence[int]) -> np.ndarray:
        ks = np.asarray(ks, dtype=int)
        if ks.size and np.max(np.abs(ks)) > self.max_frequency:
            raise AliasingError(
                f"frequency {int(np.max(np.abs(ks)))} exceeds alias-safe limit "
                f"{self.max_frequency} for T={self.T}")
        return self._spectrum[ks % self.T]

    @property
    def finite_support(self) -> bool:
        return False


def fourier_coeff(x, k: int) -> complex:
    """``int_0^1 x(t) exp(-2 pi i k t) dt``; the rectangle rule (via FFT) for sampled inputs."""
    return x.coeff(k)


@dataclass(frozen=True)
class ParsevalInstance:
    a: tuple
    b: tuple
    M: int
    T: int = 1024

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        if len(self.a) != len(self.b) or not self.a:
            raise ValueError(f"need two nonempty families of equal size, got {len(self.a)} and {len(self.b)}")
        check_window(self.M, self.n)
        if self.T < 2 or self.T & (self.T - 1):
            raise ValueError(f"T must be a power of two >= 2, got {self.T}")

    @property
    def n(self) -> int:
        return len(self.a)

    def with_window(self, M: int) -> "ParsevalInstance":
        return ParsevalInstance(self.a, self.b, M, self.T)

    def swapped(self) -> "ParsevalInstance":
        return ParsevalInstance(self.b, self.a, self.M, self.T)

    @property
    def functions(self) -> tuple:
        return self.a + self.b


def check_window(M: int, n: int) -> None:
    if M < 0:
        raise WindowError(f"window radius must be >= 0, got M={M}")
    if 2 * M + 1 < n:
        raise WindowError(f"window {{-{M},...,{M}}} has {2 * M + 1} points, fewer than n={n}")


def window(M: int) -> np.ndarray:
    return np.arange(-M, M + 1)


def gram_matrix(inst: ParsevalInstance) -> np.ndarray:
    """n x n matrix with entry (j, k) = int conj(a_j) b_k.

    Exact when every function is analytic; otherwise the uniform-grid
    rectangle rule on the common sample grid.
    """
    funcs = inst.functions
    if all(f.kind == "analytic" for f in funcs):
        return np.array([[aj.inner(bk) for bk in inst.b] for aj in inst.a], dtype=complex)
    Ts = {f.T for f in funcs if f.kind == "sampled"}
    if len(Ts) > 1:
        raise ValueError(f"sampled functions with different sample counts {sorted(Ts)}")
    T = Ts.pop()
    t = np.arange(T) / T

    def values(f):
        return f.samples if f.kind == "sampled" else f(t)

    A = np.array([values(f) for f in inst.a])
    B = np.array([values(f) for f in inst.b])
    return A.conj() @ B.T / T


def coefficient_matrix(funcs: Sequence, M: int) -> np.ndarray:
    """Row j holds the coefficients of ``funcs[j]`` at k = -M..M."""
    ks = window(M)
    return np.array([f.coeffs(ks) for f in funcs], dtype=complex).reshape(len(funcs), len(ks))


def _chunks(it: Iterator, size: int = _CHUNK) -> Iterator[np.ndarray]:
    while True:
        block = list(islice(it, size))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def batched_det(X: np.ndarray) -> np.ndarray:
    """Determinants of a stack of n x n matrices.

    Cofactor expansion for n <= 3, so a repeated column gives exactly 0;
    LU beyond that.
    """
    n = X.shape[-1]
    if n == 1:
        return X[..., 0, 0]
    if n == 2:
        return X[..., 0, 0] * X[..., 1, 1] - X[..., 0, 1] * X[..., 1, 0]
    if n == 3:
        m = X
        return (m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
                - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
                + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0]))
    return np.linalg.det(X)


def _term_block(Ahat: np.ndarray, Bhat: np.ndarray, idx: np.ndarray) -> np.ndarray:
    # idx: (S, n) column positions; matrices [j, k] = coefficient of family j at s_k
    sa = np.conj(Ahat[:, idx]).transpose(1, 0, 2)
    sb = Bhat[:, idx].transpose(1, 0, 2)
    return batched_det(sa) * batched_det(sb)


def _sum_terms(Ahat, Bhat, index_stream, workers: int) -> complex:
    if workers <= 1:
        total = 0j
        for idx in _chunks(index_stream):
            for v in _term_block(Ahat, Bhat, idx).tolist():
                total += v
        return total
    blocks = list(_chunks(index_stream))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        terms = list(pool.map(lambda idx: _term_block(Ahat, Bhat, idx), blocks))
    return complex(tree_sum([complex(v) for block in terms for v in block.tolist()], 0j))


def truncated_parseval_sum(inst: ParsevalInstance, M: int | None = None,
                           workers: int = 1) -> complex:
    """Sum over increasing s in {-M..M}^n of det[conj(a^_j(s_k))] det[b^_j(s_k)].

    Summation is sequential in lexicographic order unless ``workers > 1``,
    which switches to a fixed-shape pairwise reduction.
    """
    M = inst.M if M is None else M
    check_window(M, inst.n)
    Ahat = coefficient_matrix(inst.a, M)
    Bhat = coefficient_matrix(inst.b, M)
    return _sum_terms(Ahat, Bhat, combinations(range(2 * M + 1), inst.n), workers)


def classical_parseval_sum(a, b, M: int) -> complex:
    """n = 1 form: sum_{|k| <= M} conj(a^(k)) b^(k)."""
    ks = window(M)
    return complex(np.sum(np.conj(a.coeffs(ks)) * b.coeffs(ks)))


def tuple_term(inst: ParsevalInstance, sigma: Sequence[int]) -> complex:
    """Determinant product for one (not necessarily increasing) frequency tuple."""
    n = inst.n
    if len(sigma) != n:
        raise ValueError(f"tuple of length {len(sigma)} for n={n}")
    A = np.array([[np.conj(aj.coeff(int(s))) for s in sigma] for aj in inst.a])
    B = np.array([[bj.coeff(int(s)) for s in sigma] for bj in inst.b])
    return complex(batched_det(A) * batched_det(B))


UNORDERED_MAX_N = 3
UNORDERED_MAX_M = 8


def unordered_sum(inst: ParsevalInstance, M: int | None = None) -> complex:
    """(1/n!) times the sum over all of {-M..M}^n, repeated indices included."""
    M = inst.M if M is None else M
    n = inst.n
    if n > UNORDERED_MAX_N or M > UNORDERED_MAX_M:
        raise ValueError(f"brute-force tuple sum limited to n <= {UNORDERED_MAX_N}, "
                         f"M <= {UNORDERED_MAX_M}; got n={n}, M={M}")
    check_window(M, n)
    Ahat = coefficient_matrix(inst.a, M)
    Bhat = coefficient_matrix(inst.b, M)
    total = _sum_terms(Ahat, Bhat, product(range(2 * M + 1), repeat=n), workers=1)
    return total / math.factorial(n)


def unordered_sum_check(inst: ParsevalInstance, tolerance: float = 1e-12) -> IdentityReport:
    lhs = unordered_sum(inst)
    rhs = truncated_parseval_sum(inst)
    return make_report("unordered_parseval", lhs, rhs, COMPLEX, {"n": inst.n, "M": inst.M},
                       tolerance=tolerance, metric="absolute")


def tail_bound(inst: ParsevalInstance, M: int) -> float | None:
    """Analytic bound on |det(gram) - truncated sum at M|, when one is known.

    * every function a trigonometric polynomial supported in {-M..M}: 0
    * n = 1, analytic inputs whose trig parts fit in the window: the
      coefficients beyond M are bounded by c/|k|, so the tail is at most
      c_a c_b sum_{|k|>M} 1/k^2 <= 2 c_a c_b / M.
    Otherwise ``None``.
    """
    funcs = inst.functions
    if any(f.kind != "analytic" for f in funcs):
        return None
    if M < max(f.trig_radius for f in funcs):
        return None
    if all(f.finite_support for f in funcs):
        return 0.0
    if inst.n == 1 and M >= 1:
        return 2.0 * inst.a[0].decay_constant * inst.b[0].decay_constant / M
    return None


@dataclass(eq=False)
class ConvergenceReport:
    schedule: list[int]
    gram_det: complex
    truncated_sums: list[complex]
    abs_errors: list[float]
    tail_bounds: list[float | None]
    n: int = 1
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "schedule": list(self.schedule),
            "gram_det": [self.gram_det.real, self.gram_det.imag],
            "truncated_sums": [[z.real, z.imag] for z in self.truncated_sums],
            "abs_errors": list(self.abs_errors),
            "tail_bounds": list(self.tail_bounds),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ConvergenceReport":
        return cls(schedule=list(d["schedule"]), gram_det=complex(*d["gram_det"]),
                   truncated_sums=[complex(*z) for z in d["truncated_sums"]],
                   abs_errors=list(d["abs_errors"]), tail_bounds=list(d["tail_bounds"]),
                   n=d["n"], label=d.get("label", ""))

    def __eq__(self, other):
        if not isinstance(other, ConvergenceReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["M", "re_sum", "im_sum", "abs_error", "tail_bound"])
        for M, z, e, tb in zip(self.schedule, self.truncated_sums, self.abs_errors, self.tail_bounds):
            w.writerow([M, repr(z.real), repr(z.imag), repr(e), "" if tb is None else repr(tb)])
        return buf.getvalue()

    @property
    def within_bounds(self) -> bool:
        """Every error with a known bound respects it (plus 1e-8 slack)."""
        return all(tb is None or e <= tb + 1e-8 for e, tb in zip(self.abs_errors, self.tail_bounds))


def convergence_study(inst: ParsevalInstance, schedule: Sequence[int],
                      workers: int = 1) -> ConvergenceReport:
    schedule = [int(M) for M in schedule]
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError(f"schedule must be strictly increasing: {schedule}")
    for M in schedule:
        check_window(M, inst.n)
    g = complex(np.linalg.det(gram_matrix(inst)))
    sums = [truncated_parseval_sum(inst, M, workers) for M in schedule]
    label = " ".join(f.label for f in inst.a) + " | " + " ".join(f.label for f in inst.b)
    return ConvergenceReport(schedule, g, sums, [abs(g - s) for s in sums],
                             [tail_bound(inst, M) for M in schedule], inst.n, label)


# -- JSON instance files ----------------------------------------------------

def function_from_dict(desc: dict) -> AnalyticFunction:
    kind = desc.get("kind")
    if kind == "basis":
        return AnalyticFunction.basis(int(desc["m"]))
    if kind == "poly_t":
        return AnalyticFunction.power(int(desc["degree"]))
    if kind == "trig":
        coeffs: dict[int, complex] = {}
        for k, re, im in desc["coeffs"]:
            coeffs[int(k)] = coeffs.get(int(k), 0j) + complex(re, im)
        return AnalyticFunction.trig_poly(coeffs, label=desc.get("label", "trig"))
    raise ValueError(f"unknown function kind {kind!r}")


def function_to_dict(f: AnalyticFunction) -> dict:
    if f.poly:
        if len(f.poly) and not f.trig and f.poly[-1] == 1 and not any(f.poly[:-1]):
            return {"kind": "poly_t", "degree": len(f.poly)}
        raise ValueError(f"{f.label} has no JSON description")
    if len(f.trig) == 1 and f.trig.get(next(iter(f.trig))) == 1:
        return {"kind": "basis", "m": next(iter(f.trig))}
    return {"kind": "trig", "coeffs": [[k, c.real, c.imag] for k, c in sorted(f.trig.items())]}


def instance_from_dict(d: dict, sampled: bool = False) -> ParsevalInstance:
    a = [function_from_dict(s) for s in d["a"]]
    b = [function_from_dict(s) for s in d["b"]]
    if "n" in d and not (int(d["n"]) == len(a) == len(b)):
        raise ValueError(f"n={d['n']} but the families have sizes {len(a)} and {len(b)}")
    T = int(d.get("T", 1024))
    if sampled:
        a = [f.sampled(T) for f in a]
        b = [f.sampled(T) for f in b]
    return ParsevalInstance(a, b, int(d.get("M", max(1, len(a)))), T)


def instance_to_dict(inst: ParsevalInstance) -> dict:
    return {"n": inst.n, "M": inst.M, "T": inst.T,
            "a": [function_to_dict(f) for f in inst.a],
            "b": [function_to_dict(f) for f in inst.b]}


def random_trig_family(rng: np.random.Generator, n: int, degree: int) -> list[AnalyticFunction]:
    """n random trigonometric polynomials with complex coefficients on {-degree..degree}."""
    out = []
    for j in range(n):
        c = rng.normal(size=2 * degree + 1) + 1j * rng.normal(size=2 * degree + 1)
        out.append(AnalyticFunction.trig_poly(dict(zip(range(-degree, degree + 1), c)),
                                              label=f"p{j}"))
    return out
