"""Command-line entry point.

Exit codes: 0 every check passed, 1 an identity was violated, 2 usage or
input error.  Index sets are printed 1-based; everything internal is 0-based.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import cauchy_binet as cb
from . import parseval as pv
from .exterior import compound, det_lu, pullback_matrix
from .matrix_io import MatrixFormatError, format_csv_matrix, load_matrix, matrix_to_json
from .reports import DEFAULT_TOLERANCE, IdentityReport
from .scalars import RATIONAL, REAL, BackendError, DimensionError, matmul, random_matrix
from .subsets import enumerate_subsets

REPORT_DIR_ENV = "MULTILIN_REPORT_DIR"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

IDENTITIES = ("classical", "abstract", "pythagorean", "identified", "multiplicativity",
              "determinant", "lemma1", "partition")

# ranges used when a dimension flag is omitted
_DEFAULT_RANGES = {
    RATIONAL: {"n": (1, 4), "N": (1, 8), "w": (1, 5), "u": (1, 5), "Nab": (1, 7), "d": (1, 6)},
    REAL: {"n": (1, 5), "N": (1, 10), "w": (1, 5), "u": (1, 5), "Nab": (1, 7), "d": (1, 8)},
}


class UsageError(Exception):
    pass


def index_label(sigma) -> str:
    return "{" + ",".join(str(i + 1) for i in sigma) + "}"


def _backend(name: str) -> str:
    return RATIONAL if name == "rational" else REAL


# -- verify -------------------------------------------------------------------

def _pick(rng, value, key, backend, lo=None):
    if value is not None:
        return value
    lo0, hi = _DEFAULT_RANGES[backend][key]
    lo = lo0 if lo is None else max(lo0, min(lo, hi))
    return int(rng.integers(lo, hi + 1))


def _levels(level, *bounds):
    return [level] if level is not None else list(range(0, min(bounds) + 1))


def run_generated(identity: str, backend: str, seed: int, index: int, dims: dict,
                  tolerance: float) -> list[dict]:
    """Reports (as dicts) for one generated instance; a pure function of its arguments."""
    out = _generated(identity, backend, seed, np.random.default_rng([seed, index]), dims, tolerance)
    for d in out:
        d["dims"]["instance"] = index
    return out


def _generated(identity, backend, seed, rng, dims, tolerance) -> list[dict]:
    g = dims.get

    def pick(key, lo=None):
        return _pick(rng, g(key if key != "Nab" else "N"), key, backend, lo)

    if identity in ("classical", "identified", "pythagorean"):
        n = pick("n")
        # in floating point, n > N compares rounding noise with an exact empty sum
        N = pick("N", lo=None if backend == RATIONAL else n)
        A = random_matrix(rng, (n, N), backend)
        if identity == "pythagorean":
            return [cb.verify_pythagorean(A, seed, tolerance).to_dict()]
        B = random_matrix(rng, (N, n), backend)
        fn = cb.verify_classical if identity == "classical" else cb.verify_identified
        return [fn(A, B, seed, tolerance).to_dict()]
    if identity == "abstract":
        w, u, N = pick("w"), pick("u"), pick("Nab")
        A = random_matrix(rng, (w, N), backend)
        B = random_matrix(rng, (N, u), backend)
        return [cb.verify_abstract(A, B, lv, seed, tolerance).to_dict()
                for lv in _levels(g("level"), w, u, N)]
    if identity == "multiplicativity":
        r, m, c = (_pick(rng, g(k), "w", backend) for k in ("w", "N", "u"))
        M = random_matrix(rng, (r, m), backend)
        K = random_matrix(rng, (m, c), backend)
        return [cb.verify_multiplicativity(M, K, lv, seed, tolerance).to_dict()
                for lv in _levels(g("level"), r, m, c)]
    if identity == "determinant":
        d = pick("d")
        return [cb.verify_determinant(random_matrix(rng, (d, d), backend), seed, tolerance).to_dict()]
    raise UsageError(f"identity {identity!r} is not instance-generated")


def _exhaustive(identity: str, backend: str, Nmax: int, nmax: int) -> list[dict]:
    out = []
    for N in range(1, Nmax + 1):
        for n in range(0, min(nmax, N) + 1):
            if identity == "partition":
                out.append(cb.verify_partition_of_identity(N, n, backend).to_dict())
            else:
                out.extend(cb.verify_lemma1(N, n, s, backend).to_dict() for s in enumerate_subsets(N, n))
    return out


def _file_reports(args, backend: str) -> list[dict]:
    A = load_matrix(args.a, backend)
    B = load_matrix(args.b, backend) if args.b else None
    identity = args.identity
    rows, cols = A.shape
    for flag, got, name in (("n", rows, "rows"), ("N", cols, "columns")):
        want = getattr(args, flag if flag != "N" else "N_")
        if identity in ("classical", "identified", "pythagorean") and want is not None and want != got:
            raise DimensionError(f"A has {got} {name} but --{flag} {want}")
    if identity == "pythagorean":
        return [cb.verify_pythagorean(A, None, args.tolerance).to_dict()]
    if identity == "determinant":
        return [cb.verify_determinant(A, None, args.tolerance).to_dict()]
    if B is None:
        rng = np.random.default_rng([args.seed, 0])
        shape = (cols, rows) if identity in ("classical", "identified") else (cols, args.u or rows)
        B = random_matrix(rng, shape, backend)
    if identity in ("classical", "identified"):
        fn = cb.verify_classical if identity == "classical" else cb.verify_identified
        return [fn(A, B, None, args.tolerance).to_dict()]
    if B.shape[0] != cols:
        raise DimensionError(f"A has {cols} columns but B has {B.shape[0]} rows")
    w, N, u = rows, cols, B.shape[1]
    if identity == "abstract":
        return [cb.verify_abstract(A, B, lv, None, args.tolerance).to_dict()
                for lv in _levels(args.level, w, u, N)]
    if identity == "multiplicativity":
        return [cb.verify_multiplicativity(A, B, lv, None, args.tolerance).to_dict()
                for lv in _levels(args.level, w, u, N)]
    raise UsageError(f"--a/--b are not used by identity {identity!r}")


def _job(args_tuple):
    return run_generated(*args_tuple)


def cmd_verify(args) -> int:
    backend = _backend(args.backend)
    if args.identity not in IDENTITIES:
        raise UsageError(f"unknown identity {args.identity!r}")
    dims = {"n": args.n, "N": args.N_, "w": args.w, "u": args.u, "level": args.level, "d": args.d}
    for k, v in dims.items():
        if v is not None and v < 0:
            raise UsageError(f"--{k} must be nonnegative")
    if args.a:
        reports = _file_reports(args, backend)
    elif args.identity in ("lemma1", "partition"):
        reports = _exhaustive(args.identity, backend, args.N_ or 8, 4 if args.n is None else args.n)
    else:
        jobs = [(args.identity, backend, args.seed, i, dims, args.tolerance) for i in range(args.count)]
        if args.workers > 1:
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                chunks = list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * args.workers))))
        else:
            chunks = [_job(j) for j in jobs]
        reports = [r for chunk in chunks for r in chunk]
    failed = sum(1 for r in reports if not r["passed"])
    doc = {
        "command": "verify",
        "identity": args.identity,
        "backend": backend,
        "seed": args.seed,
        "tolerance": None if backend == RATIONAL else args.tolerance,
        "dims": {k: v for k, v in dims.items() if v is not None},
        "count": len(reports),
        "failed": failed,
        "reports": reports,
    }
    _emit(args, doc, f"verify-{args.identity}-seed{args.seed}",
          lambda: "\n".join(IdentityReport.from_dict(r).summary() for r in reports)
          + f"\n{len(reports) - failed}/{len(reports)} passed")
    return EXIT_FAIL if failed else EXIT_OK


def _emit(args, doc: dict, stem: str, text_fn) -> None:
    doc = dict(doc, timestamp=datetime.now(timezone.utc).isoformat())
    payload = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    out = args.out
    if out is None and os.environ.get(REPORT_DIR_ENV):
        out = Path(os.environ[REPORT_DIR_ENV]) / f"{stem}.json"
    if out is not None:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(payload)
    if args.format == "json" and args.out is None:
        sys.stdout.write(payload)
    else:
        print(text_fn())


# -- compound -----------------------------------------------------------------

def cmd_compound(args) -> int:
    backend = _backend(args.backend)
    M = load_matrix(args.matrix, backend)
    r, c = M.shape
    if not 0 <= args.level <= min(r, c):
        raise UsageError(f"level {args.level} out of range 0..{min(r, c)} for a {r}x{c} matrix")
    rows = [index_label(s) for s in enumerate_subsets(r, args.level)]
    cols = [index_label(s) for s in enumerate_subsets(c, args.level)]
    if args.pullback:
        out = pullback_matrix(M, args.level)
        rows, cols = cols, rows
    else:
        out = compound(M, args.level)
    if args.format == "json":
        text = json.dumps({"kind": "pullback" if args.pullback else "compound", "level": args.level,
                           "rows": rows, "cols": cols, "entries": matrix_to_json(out)},
                          sort_keys=True, indent=2) + "\n"
    else:
        text = format_csv_matrix(out, rows, cols)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parseval -----------------------------------------------------------------

def cmd_parseval(args) -> int:
    try:
        desc = json.loads(Path(args.instance).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read instance {args.instance}: {exc}") from None
    schedule = [int(x) for x in args.schedule.split(",")] if args.schedule else None
    if schedule:
        desc = dict(desc, M=max(schedule))
    try:
        inst = pv.instance_from_dict(desc, sampled=args.sampled)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed instance: {exc}") from None
    report = pv.convergence_study(inst, schedule or [inst.M], args.workers)
    finite = all(getattr(f, "finite_support", False) for f in inst.functions)
    if finite and report.tail_bounds[-1] == 0.0:
        ok = report.abs_errors[-1] <= args.tolerance
    else:
        ok = report.within_bounds
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    doc = {"command": "parseval", "instance": desc, "sampled": args.sampled,
           "tolerance": args.tolerance, "passed": ok, "report": report.to_dict()}

    def text():
        lines = [f"det(gram) = {report.gram_det:.15g}"]
        for M, e, tb in zip(report.schedule, report.abs_errors, report.tail_bounds):
            lines.append(f"M={M:<5d} abs_error={e:.3e} tail_bound={'-' if tb is None else f'{tb:.3e}'}")
        lines.append("PASS" if ok else "FAIL")
        return "\n".join(lines)

    _emit(args, doc, f"parseval-{Path(args.instance).stem}", text)
    return EXIT_OK if ok else EXIT_FAIL


# -- bench --------------------------------------------------------------------

def _timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cmd_bench(args) -> int:
    backend = _backend(args.backend)
    ns = [int(x) for x in args.n_values.split(",")]
    Ns = [int(x) for x in args.N_values.split(",")]
    rows = []
    for i, (n, N) in enumerate((n, N) for n in ns for N in Ns if n <= N):
        rng = np.random.default_rng([args.seed, i])
        A = random_matrix(rng, (n, N), backend)
        B = random_matrix(rng, (N, n), backend)
        report = cb.verify_classical(A, B, tolerance=args.tolerance)
        if not report.passed:
            print(f"disagreement at n={n} N={N}: {report.summary()}", file=sys.stderr)
            return EXIT_FAIL
        t_sum = _timeit(lambda: cb.cauchy_binet_sum(A, B), args.repeat)
        t_dir = _timeit(lambda: det_lu(matmul(A, B)), args.repeat)
        fmt = (lambda x: str(Fraction(x))) if backend == RATIONAL else (lambda x: repr(float(x)))
        rows.append([n, N, fmt(report.rhs), fmt(report.lhs),
                     repr(report.max_rel_deviation) if report.max_rel_deviation is not None else "0",
                     f"{t_sum:.6e}", f"{t_dir:.6e}"])
    header = ["n", "N", "minor_sum", "direct_det", "rel_deviation", "minor_sum_seconds", "direct_seconds"]
    text = "\n".join(",".join(map(str, r)) for r in [header] + rows) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multilin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def output_flags(sp, default_format="text"):
        sp.add_argument("--out", help="write the JSON report here")
        sp.add_argument("--format", choices=("json", "text"), default=default_format)

    v = sub.add_parser("verify", help="check an identity on generated or file-loaded matrices")
    v.add_argument("--identity", choices=IDENTITIES, default="classical")
    v.add_argument("--backend", choices=("rational", "float"), default="rational")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int, default=1)
    v.add_argument("--n", type=int)
    v.add_argument("--N", dest="N_", type=int)
    v.add_argument("--w", type=int)
    v.add_argument("--u", type=int)
    v.add_argument("--level", type=int)
    v.add_argument("--d", type=int)
    v.add_argument("--a", help="matrix file for A (CSV or .json)")
    v.add_argument("--b", help="matrix file for B (CSV or .json)")
    v.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    v.add_argument("--workers", type=int, default=1)
    output_flags(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compound", help="compound or pullback matrix of a matrix file")
    c.add_argument("--matrix", required=True)
    c.add_argument("--level", type=int, required=True)
    c.add_argument("--pullback", action="store_true", help="emit the transposed compound")
    c.add_argument("--backend", choices=("rational", "float"), default="rational")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compound)

    q = sub.add_parser("parseval", help="truncated multilinear Parseval study")
    q.add_argument("--instance", required=True, help="instance JSON")
    q.add_argument("--schedule", help="comma-separated increasing window radii M")
    q.add_argument("--tolerance", type=float, default=1e-10)
    q.add_argument("--sampled", action="store_true", help="use T uniform samples instead of closed forms")
    q.add_argument("--csv", help="also write the convergence table as CSV")
    q.add_argument("--workers", type=int, default=1)
    output_flags(q)
    q.set_defaults(func=cmd_parseval)

    b = sub.add_parser("bench", help="minor summation versus multiply-then-determinant")
    b.add_argument("--n-values", default="1,2,3,4")
    b.add_argument("--N-values", default="4,8,12")
    b.add_argument("--backend", choices=("rational", "float"), default="float")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeat", type=int, default=3)
    b.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, MatrixFormatError, DimensionError, BackendError,
            pv.WindowError, pv.AliasingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
