"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import timeit

import numpy as np

from spectral_uncertainty import _fallback

try:
    from spectral_uncertainty import _kernels as compiled
except ImportError:
    compiled = None


def jacobi_case(n):
    rng = np.random.default_rng(n)
    a = rng.standard_normal((n, n))
    a = a + a.T
    tol = 1e-12 * np.linalg.norm(a)

    def run(mod):
        mod.jacobi_sweeps(np.array(a, order="C"), np.eye(n), tol, 100)

    return f"jacobi n={n}", run


def inf_to_one_case(n):
    at = np.ascontiguousarray(np.random.default_rng(n).standard_normal((n, n)))
    return f"inf->1 exact n={n}", lambda mod: mod.inf_to_one_exact(at)


def sublevel_case(dims, res):
    x = (np.arange(res) + 0.5) / res - 0.5
    g = np.ascontiguousarray(np.sort(1 - np.cos(2 * np.pi * x)))
    return f"sublevel n={dims} res={res}", lambda mod: mod.sublevel_count(g, 0.5 * dims, dims)


CASES = [
    jacobi_case(32),
    jacobi_case(96),
    inf_to_one_case(12),
    inf_to_one_case(18),
    sublevel_case(2, 4096),
    sublevel_case(3, 512),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; timing the fallback only")
    print(f"{'case':28s} {'fallback s':>12s} {'compiled s':>12s} {'speedup':>9s}")
    for name, fn in CASES:
        slow = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{name:28s} {slow:12.4f}")
            continue
        fast = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        print(f"{name:28s} {slow:12.4f} {fast:12.4f} {slow / fast:8.1f}x")


if __name__ == "__main__":
    main()
