#!/usr/bin/env python3
"""Benchmark the compiled row-reduction kernel against the pure fallback.

The workload is the dominant one in practice: exact RREF of the integer
matrices arising while computing perverse weight page cohomology. Run:

    python3 benchmarks/bench_kernel.py
"""

import random
import time

from pwss import _kernel_py
from pwss import kernel as K


def workloads():
    rng = random.Random(20260811)
    out = []
    # small dense blocks (datum validation scale)
    for _ in range(200):
        m, n = rng.randint(6, 12), rng.randint(6, 12)
        out.append([[rng.randint(-2, 2) for _ in range(n)] for _ in range(m)])
    # page-sized sparse blocks (pullback cohomology scale)
    for _ in range(16):
        m, n = rng.randint(120, 180), rng.randint(120, 200)
        rows = []
        for _ in range(m):
            row = [0] * n
            for _ in range(rng.randint(1, 6)):
                row[rng.randrange(n)] = rng.randint(-3, 3)
            rows.append(row)
        out.append(rows)
    return out


def run(fn, mats):
    t0 = time.perf_counter()
    acc = 0
    for m in mats:
        pivots, _, _ = fn([row[:] for row in m], len(m[0]))
        acc += len(pivots)
    return time.perf_counter() - t0, acc


def main():
    mats = workloads()
    if not K.HAVE_SPEEDUPS:
        print("compiled kernel unavailable; only the pure path will run")
    t_pure, rank_pure = run(_kernel_py.rref_int, mats)
    print(f"pure python : {t_pure:8.3f}s  (total rank {rank_pure})")
    if K.HAVE_SPEEDUPS:
        t_fast, rank_fast = run(K.rref_int, mats)
        assert rank_fast == rank_pure
        print(f"compiled    : {t_fast:8.3f}s  (total rank {rank_fast}, "
              f"int64 fast path with arbitrary-precision bailout)")
        print(f"speedup     : {t_pure / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
