"""Compare the compiled and pure-Python subset-search kernels.

Usage: python3 benchmarks/bench_oracle.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from treecube.families import gen_d_regular, gen_dimension_n, gen_spider
from treecube.oracle import GraphDistances, _kernel_py

try:
    from treecube.oracle import _kernel
except ImportError:  # extension not built
    _kernel = None

CASES = {
    "spider(2,2,2)": gen_spider([2, 2, 2]),
    "dreg(3,2)": gen_d_regular(3, 2),
    "dimn(7)": gen_dimension_n(7),
    "dimn(8)": gen_dimension_n(8),
}
BUDGET = 10**9


def search(kernel, codes: np.ndarray) -> tuple[int, int]:
    """Run the size-ascending search; return (dimension, subset checks)."""
    spent = 0
    for k in range(1, codes.shape[0]):
        witness, checks, _ = kernel.first_resolving_subset(codes, k, BUDGET - spent)
        spent += checks
        if witness is not None:
            return k, spent
    raise AssertionError("no resolving set")


def timed(kernel, codes, repeat: int) -> tuple[float, int, int]:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        k, checks = search(kernel, codes)
        best = min(best, time.perf_counter() - t0)
    return best, k, checks


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'case':<15} {'n':>3} {'beta':>4} {'checks':>9} {'python s':>9} "
          f"{'compiled s':>10} {'speedup':>8}")
    for name, t in CASES.items():
        codes = np.ascontiguousarray(GraphDistances.of_tree(t, 3).d, dtype=np.int32)
        tp, k, checks = timed(_kernel_py, codes, args.repeat)
        if _kernel is None:
            print(f"{name:<15} {t.n:>3} {k:>4} {checks:>9} {tp:>9.4f} {'n/a':>10} {'n/a':>8}")
            continue
        tc, kc, _ = timed(_kernel, codes, args.repeat)
        assert kc == k
        print(f"{name:<15} {t.n:>3} {k:>4} {checks:>9} {tp:>9.4f} {tc:>10.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
