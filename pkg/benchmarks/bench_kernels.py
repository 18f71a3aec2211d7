"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--paths N] [--repeat K]
"""

import argparse
import timeit

import numpy as np

from cascade_budget import _fallback

try:
    from cascade_budget import _kernels
except ImportError:
    _kernels = None

A_IRR = 1.2772490025  # roughly a(0.7, 0.8)


def cases(paths):
    return {
        "series_sum (G, irrational a)": ("series_sum", (0.3, 0.7, A_IRR, 0, 0, 1e-12, 10**7)),
        "series_sum (B, p2 = 1 - 1e-6)": ("series_sum", (1 - 1e-6, 1e-6, 20.5, 0, 0, 1e-12, 10**7)),
        "finite_sum (r = 1000)": ("finite_sum", (0.4, 0.6, 1000 / 617, 1000, 617, 1000)),
        f"simulate_batch ({paths} paths, irrational)": (
            "simulate_batch", (0.7, A_IRR, 0, 0, 42, 0, paths, 10**6)),
        f"simulate_batch ({paths} paths, a = 3/2)": (
            "simulate_batch", (0.6, 1.5, 3, 2, 42, 0, paths, 10**6)),
    }


def best_time(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--paths", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if _kernels is None:
        print("compiled kernels not built; nothing to compare")
        return
    print(f"{'kernel':46s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}")
    for label, (name, call) in cases(args.paths).items():
        slow = best_time(getattr(_fallback, name), call, args.repeat)
        fast = best_time(getattr(_kernels, name), call, args.repeat)
        same = all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in
                   zip(np.atleast_1d(getattr(_fallback, name)(*call)), np.atleast_1d(getattr(_kernels, name)(*call))))
        print(f"{label:46s} {slow * 1e3:10.3f}ms {fast * 1e3:10.3f}ms {slow / fast:8.1f}x"
              + ("" if same else "  MISMATCH"))


if __name__ == "__main__":
    main()
