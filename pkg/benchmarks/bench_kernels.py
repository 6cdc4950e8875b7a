#!/usr/bin/env python3
"""Benchmark the eigenbasis phase-sum kernel: numba vs pure numpy.

The kernel evaluates f(t) = sum_jk M_jk exp(-i(w_j - w_k) t) over a time
grid, the hot inner loop of density-matrix singlet traces.  Run with

    python benchmarks/bench_kernels.py [--sizes 64,128,256] [--times 1001]

QBEATS_DISABLE_NUMBA=1 switches the package-level dispatch to numpy; this
script always times both paths explicitly.
"""

import argparse
import time

import numpy as np

from qbeats.kernels import kernel_backend, phase_sum_numpy

try:
    from qbeats.kernels import phase_sum_numba

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def timeit(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="64,128,256,512,1024")
    parser.add_argument("--times", type=int, default=1001)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    grid = np.linspace(0.0, 100.0, args.times)
    rng = np.random.default_rng(0)

    print(f"phase_sum benchmark: T={args.times} grid points, "
          f"package dispatch = {kernel_backend()}")
    header = f"{'dim':>6} {'numpy (ms)':>12}"
    if HAVE_NUMBA:
        header += f" {'numba (ms)':>12} {'speedup':>9} {'max |diff|':>11}"
    print(header)

    for n in sizes:
        M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        w = rng.normal(size=n)
        t_np = timeit(phase_sum_numpy, M, w, grid, repeat=args.repeat)
        row = f"{n:>6} {1e3 * t_np:>12.2f}"
        if HAVE_NUMBA:
            phase_sum_numba(M, w, grid)  # JIT warm-up outside the timer
            t_nb = timeit(phase_sum_numba, M, w, grid, repeat=args.repeat)
            diff = np.abs(phase_sum_numba(M, w, grid)
                          - phase_sum_numpy(M, w, grid)).max()
            row += f" {1e3 * t_nb:>12.2f} {t_np / t_nb:>8.2f}x {diff:>11.2e}"
        print(row)


if __name__ == "__main__":
    main()
