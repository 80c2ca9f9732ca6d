"""Timing comparison of the compiled and pure-Python GF(2) rank kernels.

Runs identical workloads through both backends and prints a table: a
packed-word microbenchmark on random bit matrices, then the rank calls
of real boundary matrices from random flag complexes (the hot loop of
every Betti computation in the package).

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import sys
import time

import numpy as np

from toposon.complexes import rips_from_neighbors
from toposon.homology import boundary_matrix
from toposon.kernels import BACKEND, py_gf2

if BACKEND != "cython":
    print("compiled kernel unavailable; nothing to compare", file=sys.stderr)
    sys.exit(1)

from toposon.kernels import _gf2


def random_bitmatrix(rng, rows, cols, density):
    words = (cols + 63) // 64
    m = np.zeros((rows, words), dtype=np.uint64)
    flat = rng.random((rows, cols)) < density
    for i in range(rows):
        for j in np.flatnonzero(flat[i]):
            m[i, j // 64] |= np.uint64(1) << np.uint64(j % 64)
    return m


def random_complex(rng, n, p):
    close = rng.random((n, n)) < p
    close |= close.T
    np.fill_diagonal(close, False)
    nl = {i: {int(j) for j in np.flatnonzero(close[i])} for i in range(n)}
    return rips_from_neighbors(nl, max_dim=2)


def timed(fn, repeats):
    samples = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        samples.append(time.perf_counter() - t0)
    return out, min(samples)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    print(f"{'workload':<40}{'cython':>11}{'python':>11}{'speedup':>9}")

    for rows, cols, density in ((200, 200, 0.05), (600, 600, 0.02),
                                (1500, 1500, 0.01)):
        base = random_bitmatrix(rng, rows, cols, density)
        r1, t1 = timed(lambda: _gf2.rank_u64(base.copy()), args.repeats)
        r2, t2 = timed(lambda: py_gf2.rank_u64(base.copy()), args.repeats)
        assert r1 == r2, (r1, r2)
        label = f"rank {rows}x{cols} density {density}"
        print(f"{label:<40}{t1 * 1e3:>9.2f}ms{t2 * 1e3:>9.2f}ms"
              f"{t2 / t1:>8.1f}x")

    # Boundary-matrix ranks of random flag complexes: the per-call shapes
    # Betti computations actually produce.
    mats = []
    for _ in range(20):
        x = random_complex(rng, 40, 0.2)
        for k in (1, 2):
            m = boundary_matrix(x, k)
            if m.rows and m.cols:
                mats.append(m.words)

    def rank_all(rank_fn):
        return [int(rank_fn(w.copy())) for w in mats]

    r1, t1 = timed(lambda: rank_all(_gf2.rank_u64), args.repeats)
    r2, t2 = timed(lambda: rank_all(py_gf2.rank_u64), args.repeats)
    assert r1 == r2
    label = f"{len(mats)} boundary matrices (flag, n=40)"
    print(f"{label:<40}{t1 * 1e3:>9.2f}ms{t2 * 1e3:>9.2f}ms"
          f"{t2 / t1:>8.1f}x")


if __name__ == "__main__":
    main()
