#!/usr/bin/env python3
"""Benchmark the compiled BFS kernel against the pure-Python twin.

Runs the same closure workloads through both backends, verifies the
outputs are byte-identical, and prints a timing table.  The default
set stays small enough for the Python kernel; --full adds the
1.875M-element closure mod 5^3 (compiled backend only there, the pure
kernel would take minutes).

Usage: python3 benchmarks/bench_bfs.py [--full] [--repeat N]
"""

import argparse
import time

import numpy as np

from noridim.kernel import _pycore

try:
    from noridim.kernel import _core
except ImportError:
    _core = None

SL2 = [[1, 1, 0, 1], [1, 0, 1, 1]]
HEIS = [[1, 1, 0, 0, 1, 0, 0, 0, 1], [1, 0, 0, 0, 1, 1, 0, 0, 1]]
SL3 = [[1, 1, 0, 0, 1, 0, 0, 0, 1], [0, 0, 1, 1, 0, 0, 0, 1, 0]]

WORKLOADS = [
    ("SL2 mod 5 (120)", SL2, 5, 2, True),
    ("SL2 mod 25 (15,000)", SL2, 25, 2, True),
    ("Heisenberg mod 7 (343)", HEIS, 7, 3, True),
    ("Heisenberg mod 49 (117,649)", HEIS, 49, 3, True),
    ("SL3 mod 5 (372,000)", SL3, 5, 3, False),
]

FULL_WORKLOADS = [
    ("SL2 mod 125 (1,875,000)", SL2, 125, 2, False),
]


def run(fn, rows, modulus, n, repeat):
    arr = np.array(rows, dtype=np.int64)
    best = None
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(arr, modulus, n, 10**7)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return out, best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--full", action="store_true",
                    help="include the 1.875M-element closure")
    ap.add_argument("--repeat", type=int, default=3,
                    help="timing repetitions per case (default 3)")
    args = ap.parse_args()

    cases = WORKLOADS + (FULL_WORKLOADS if args.full else [])
    if _core is None:
        print("compiled kernel not built: timing the pure-Python kernel only\n")

    header = f"{'workload':<30} {'python':>10} {'compiled':>10} {'speedup':>8}  agree"
    print(header)
    print("-" * len(header))
    for label, rows, modulus, n, run_py in cases:
        c_out, c_best = (None, None)
        if _core is not None:
            c_out, c_best = run(_core.bfs_closure, rows, modulus, n, args.repeat)
        p_out, p_best = (None, None)
        if run_py:
            p_out, p_best = run(_pycore.bfs_closure, rows, modulus, n,
                                1 if modulus > 25 else args.repeat)

        if p_out is not None and c_out is not None:
            agree = (p_out[0].tobytes() == c_out[0].tobytes()
                     and np.array_equal(p_out[1], c_out[1]))
            agree_s = "yes" if agree else "NO"
            speedup = f"{p_best / c_best:7.1f}x"
        else:
            agree_s = "-"
            speedup = "-"
        p_s = f"{p_best:9.3f}s" if p_best is not None else "-"
        c_s = f"{c_best:9.3f}s" if c_best is not None else "-"
        print(f"{label:<30} {p_s:>10} {c_s:>10} {speedup:>8}  {agree_s}")

        if p_out is not None and c_out is not None and not agree:
            raise SystemExit(f"backend mismatch on {label}")


if __name__ == "__main__":
    main()
