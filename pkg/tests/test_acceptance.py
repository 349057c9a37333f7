"""Acceptance suite: one check per headline property, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
"""
import itertools
import json
import math
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from multilin import cauchy_binet as cb
from multilin import parseval as pv
from multilin.cli import main
from multilin.exterior import det_lu, det_top_power
from multilin.scalars import RATIONAL, REAL, random_matrix, relative_deviation

SEED = 20130501


@contextmanager
def criterion(name, budget, capsys=None):
    """Times the block, prints one status line, then fails if the block failed or ran long."""
    state = {"ok": True, "detail": ""}
    t0 = time.perf_counter()
    try:
        yield state
    except AssertionError as exc:
        state["ok"], state["detail"] = False, str(exc).splitlines()[0] if str(exc) else "assertion"
    elapsed = time.perf_counter() - t0
    ok = state["ok"] and elapsed <= budget
    if state["ok"] and not ok:
        state["detail"] = "over time budget"
    line = f"{'PASS' if ok else 'FAIL'}  {name:<48} {elapsed:7.2f}s / {budget:g}s  {state['detail']}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def rng_for(tag):
    return np.random.default_rng([SEED, sum(map(ord, tag))])


def test_classical_exact(capsys):
    rng = rng_for("classical")
    with criterion("classical Cauchy-Binet, 500 exact", 10, capsys) as st:
        bad = 0
        for _ in range(500):
            n, N = int(rng.integers(1, 5)), int(rng.integers(1, 9))
            A, B = random_matrix(rng, (n, N), RATIONAL), random_matrix(rng, (N, n), RATIONAL)
            bad += cb.cauchy_binet_sum(A, B) != det_top_power(A @ B)
        st["detail"] = f"{bad} mismatches"
        assert bad == 0, st["detail"]


def test_abstract_exact(capsys):
    rng = rng_for("abstract")
    with criterion("abstract identity, 100 exact, all levels", 30, capsys) as st:
        bad = levels = 0
        for _ in range(100):
            w, u, N = (int(x) for x in rng.integers(1, [6, 6, 8]))
            A, B = random_matrix(rng, (w, N), RATIONAL), random_matrix(rng, (N, u), RATIONAL)
            for n in range(min(w, u, N) + 1):
                levels += 1
                bad += not cb.verify_abstract(A, B, n).passed
        st["detail"] = f"{levels} levels, {bad} mismatches"
        assert bad == 0, st["detail"]


def test_multiplicativity_exact(capsys):
    rng = rng_for("multiplicativity")
    with criterion("compound multiplicativity, 100 pairs", 10, capsys) as st:
        bad = 0
        for _ in range(100):
            r, m, c = (int(x) for x in rng.integers(1, 6, size=3))
            M, K = random_matrix(rng, (r, m), RATIONAL), random_matrix(rng, (m, c), RATIONAL)
            for n in range(min(r, m, c) + 1):
                bad += not cb.verify_multiplicativity(M, K, n).passed
        st["detail"] = f"{bad} mismatches"
        assert bad == 0, st["detail"]


def test_lemma1_and_partition_exhaustive(capsys):
    with criterion("projection lemma + partition, N<=8 n<=4", 5, capsys) as st:
        bad = count = 0
        for N in range(1, 9):
            for n in range(min(4, N) + 1):
                bad += not cb.verify_partition_of_identity(N, n).passed
                for s in itertools.combinations(range(N), n):
                    count += 1
                    bad += not cb.verify_lemma1(N, n, s).passed
        st["detail"] = f"{count} subsets, {bad} mismatches"
        assert bad == 0, st["detail"]


def test_pythagorean_exact(capsys):
    rng = rng_for("pythagorean")
    with criterion("Pythagorean corollary, 200 exact", 5, capsys) as st:
        bad = 0
        for _ in range(200):
            n, N = int(rng.integers(1, 5)), int(rng.integers(1, 9))
            rep = cb.verify_pythagorean(random_matrix(rng, (n, N), RATIONAL))
            bad += not (rep.passed and rep.rhs >= 0)
        st["detail"] = f"{bad} mismatches"
        assert bad == 0, st["detail"]


def test_top_power_vs_lu(capsys):
    rng = rng_for("determinant")
    with criterion("det_top_power vs det_lu, 200 exact + 200 float", 5, capsys) as st:
        bad, worst = 0, 0.0
        for _ in range(200):
            M = random_matrix(rng, (int(rng.integers(1, 7)),) * 2, RATIONAL)
            bad += det_top_power(M) != det_lu(M)
        for _ in range(200):
            M = random_matrix(rng, (int(rng.integers(1, 9)),) * 2, REAL)
            worst = max(worst, relative_deviation(det_top_power(M), det_lu(M)))
        st["detail"] = f"{bad} exact mismatches, worst rel {worst:.1e}"
        assert bad == 0 and worst <= 1e-9, st["detail"]


def test_float_cauchy_binet(capsys):
    rng = rng_for("float")
    with criterion("float Cauchy-Binet, 200 at 1e-9 relative", 5, capsys) as st:
        worst = 0.0
        for _ in range(200):
            n = int(rng.integers(1, 6))
            N = int(rng.integers(n, 11))
            A, B = random_matrix(rng, (n, N), REAL), random_matrix(rng, (N, n), REAL)
            worst = max(worst, relative_deviation(cb.cauchy_binet_sum(A, B), det_lu(A @ B)))
        st["detail"] = f"worst rel {worst:.1e}"
        assert worst <= 1e-9, st["detail"]


def test_parseval_finite_support(capsys):
    rng = rng_for("finite")
    with criterion("Parseval finite support, M=8 at 1e-10", 5, capsys) as st:
        worst, count = 0.0, 0
        for n in (1, 2, 3):
            for degree in range(5):
                for _ in range(4):
                    inst = pv.ParsevalInstance(pv.random_trig_family(rng, n, degree),
                                               pv.random_trig_family(rng, n, degree), M=8)
                    exact = np.linalg.det(pv.gram_matrix(inst))
                    worst = max(worst, abs(pv.truncated_parseval_sum(inst) - exact))
                    count += 1
        st["detail"] = f"{count} instances, worst abs {worst:.1e}"
        assert worst <= 1e-10, st["detail"]


def test_parseval_t_family(capsys):
    t = pv.AnalyticFunction.power(1)
    inst = pv.ParsevalInstance([t], [t], M=50)
    with criterion("Parseval t-family, M=200 within tail bound", 2, capsys) as st:
        rep = pv.convergence_study(inst, [50, 100, 200])
        errs = rep.abs_errors
        bound = 1 / (2 * math.pi ** 2 * 200) + 1e-8
        st["detail"] = f"errors {', '.join(f'{e:.2e}' for e in errs)}; bound {bound:.2e}"
        assert abs(rep.gram_det - 1 / 3) <= 1e-15, "exact value is not 1/3"
        assert errs[-1] <= bound, st["detail"]
        assert errs[0] > errs[1] > errs[2], "error not decreasing"


def test_unordered_matches_ordered(capsys):
    rng = rng_for("unordered")
    with criterion("unordered 1/n! form, 20 instances at 1e-12", 20, capsys) as st:
        worst = 0.0
        for i in range(20):
            n = 1 + i % 3
            M = int(rng.integers(max(1, n // 2), 9))
            degree = int(rng.integers(0, 5))
            inst = pv.ParsevalInstance(pv.random_trig_family(rng, n, degree),
                                       pv.random_trig_family(rng, n, degree), M=M)
            rep = pv.unordered_sum_check(inst)
            worst = max(worst, float(rep.max_abs_deviation))
        st["detail"] = f"worst abs {worst:.1e}"
        assert worst <= 1e-12, st["detail"]


def _silent(argv):
    # keep the CLI's own output out of the acceptance listing
    import io
    from contextlib import redirect_stdout
    with redirect_stdout(io.StringIO()):
        return main(argv)


def _stripped(path):
    d = json.loads(path.read_text())
    d.pop("timestamp")
    return json.dumps(d, sort_keys=True)


def test_cli_determinism(tmp_path, capsys):
    with criterion("CLI determinism across runs and workers", 60, capsys) as st:
        docs = {}
        for backend in ("rational", "float"):
            for run, workers in enumerate((1, 1, 4)):
                out = tmp_path / f"{backend}-{run}.json"
                code = _silent(["verify", "--identity", "abstract", "--backend", backend,
                                "--count", "20", "--seed", "3", "--workers", str(workers),
                                "--out", str(out)])
                assert code == 0, f"verify exited {code}"
                docs.setdefault(backend, []).append(_stripped(out))
        same = all(len(set(v)) == 1 for v in docs.values())
        # opt-in pairwise reduction must stay close to the sequential one
        rng = rng_for("parallel")
        inst = pv.ParsevalInstance(pv.random_trig_family(rng, 3, 4), pv.random_trig_family(rng, 3, 4), M=8)
        drift = abs(pv.truncated_parseval_sum(inst, workers=4) - pv.truncated_parseval_sum(inst))
        st["detail"] = f"byte-identical: {same}; parallel drift {drift:.1e}"
        assert same, st["detail"]
        assert drift <= 1e-12, st["detail"]


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    failures = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                if name == "test_cli_determinism":
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d), None)
                else:
                    fn(None)
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
