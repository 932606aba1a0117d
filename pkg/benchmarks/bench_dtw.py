"""Compare the compiled and pure-Python warping-distance kernels.

Usage:
    python3 benchmarks/bench_dtw.py [--lengths 100,400,1000] [--repeat 3]

Prints a table of per-pair runtimes for both kernels plus the speedup,
and verifies that both return bit-identical results on every input.
"""

import argparse
import time

import numpy as np

from dualq.stats import _dtw_py
from dualq.stats.dtw import IMPLEMENTATION

try:
    from dualq.stats import _dtwc
except ImportError:
    _dtwc = None


def time_kernel(fn, pairs, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for x, y in pairs:
            fn(x, y)
        best = min(best, (time.perf_counter() - t0) / len(pairs))
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lengths", default="100,400,1000",
                        help="comma-separated series lengths")
    parser.add_argument("--pairs", type=int, default=8,
                        help="random pairs per length")
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repetitions, best is kept")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    lengths = [int(s) for s in args.lengths.split(",") if s.strip()]
    rng = np.random.default_rng(args.seed)

    print(f"active kernel: {IMPLEMENTATION}")
    if _dtwc is None:
        print("compiled kernel unavailable; timing the fallback only")
    print(f"{'length':>8} {'python (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")

    for n in lengths:
        pairs = [
            (rng.poisson(3.0, n).astype(np.float64),
             rng.poisson(3.0, n).astype(np.float64))
            for _ in range(args.pairs)
        ]
        t_py = time_kernel(_dtw_py.dtw_pair, pairs, args.repeat)
        if _dtwc is None:
            print(f"{n:>8} {t_py * 1e3:>12.3f} {'-':>14} {'-':>8}")
            continue
        for x, y in pairs:
            a = _dtw_py.dtw_pair(x, y)
            b = _dtwc.dtw_pair(x, y)
            if a != b:
                raise SystemExit(f"kernel mismatch at n={n}: {a} != {b}")
        t_c = time_kernel(_dtwc.dtw_pair, pairs, args.repeat)
        print(f"{n:>8} {t_py * 1e3:>12.3f} {t_c * 1e3:>14.3f} {t_py / t_c:>8.1f}")


if __name__ == "__main__":
    main()
