"""Compare the compiled kernels against the pure-Python fallback.

Run:  python3 bench/bench_kernels.py [--repeat N]

Times the three kernels on random matrices of a few sizes, then one
end-to-end workload (the two-loop example pipeline) under each backend.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from dgendo import backend
from dgendo.linalg import QQ, FieldSpec


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def kernel_cases(rng):
    Fp = FieldSpec("Fp", 32003)
    for n in (16, 32, 64):
        a = QQ.random_matrix(rng, n, n, density=0.4)
        b = QQ.random_matrix(rng, n, n, density=0.4)
        m = np.array([[rng.randint(0, 32002) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        yield f"rref_q {n}x{n}", lambda a=a: backend.rref_q(a)
        yield f"matmul_q {n}x{n}", lambda a=a, b=b: backend.matmul_q(a, b)
        yield f"rref_modp {n}x{n}", lambda m=m: backend.rref_modp(m, Fp.p)


def pipeline():
    from dgendo.equivalence import theorem41_pipeline
    from dgendo.examples import example_dugas

    ex = example_dugas(2, 2)
    theorem41_pipeline(ex.T2, ex.T1, (-3, 3))


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-pipeline", action="store_true")
    ns = ap.parse_args(argv)
    if not backend.has_compiled():
        print("compiled kernels not built; only the Python fallback is available")
        return 1
    rng = random.Random(0)
    cases = list(kernel_cases(rng))
    print(f"{'case':<22}{'python s':>12}{'compiled s':>12}{'speedup':>10}")
    for name, fn in cases:
        times = {}
        for b in ("python", "compiled"):
            backend.use(b)
            times[b] = _best(fn, ns.repeat)
        print(f"{name:<22}{times['python']:>12.5f}{times['compiled']:>12.5f}{times['python'] / times['compiled']:>9.1f}x")
    if not ns.skip_pipeline:
        times = {}
        for b in ("python", "compiled"):
            backend.use(b)
            times[b] = _best(pipeline, 1)
        print(f"{'two-loop pipeline':<22}{times['python']:>12.3f}{times['compiled']:>12.3f}"
              f"{times['python'] / times['compiled']:>9.1f}x")
    backend.use("compiled")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
