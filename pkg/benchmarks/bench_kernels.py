"""Time the numba kernels against the numpy fallback on dyadic martingales.

    python3 benchmarks/bench_kernels.py [--depths 6 8 10] [--repeat 3]

The first numba call per signature compiles (or loads from cache) and is
excluded from the timings.
"""
import argparse
import time

import numpy as np

from mpp.generators import random_dyadic
from mpp.kernels import numba_impl, numpy_impl
from mpp.variation import ParaproductKernel


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(depth, repeat, brute_depth):
    f, g = random_dyadic(depth, 0), random_dyadic(depth, 1)
    kern = ParaproductKernel(f, g)
    absinc = np.ascontiguousarray(kern.abs_matrix())
    fp = np.ascontiguousarray(f.paths.T)
    gp = np.ascontiguousarray(g.paths.T)
    pi = np.ascontiguousarray(kern.pi.paths.T)
    cases = {
        "variation_dp": lambda m: m.variation_dp(absinc, 1.5),
        "jump_dp": lambda m: m.jump_dp(absinc, 0.5),
        "jump_stopping": lambda m: m.jump_stopping(fp, gp, pi, 0.5),
    }
    if depth <= brute_depth:
        cases["brute_variation"] = lambda m: m.brute_variation(absinc, 1.5)
    rows = []
    for name, call in cases.items():
        call(numba_impl)  # warm-up / compile
        a = np.asarray(call(numba_impl))
        b = np.asarray(call(numpy_impl))
        if not np.allclose(a, b, rtol=1e-12, atol=0):
            raise SystemExit(f"{name}: backends disagree at depth {depth}")
        t_nb = best_of(lambda: call(numba_impl), repeat)
        t_np = best_of(lambda: call(numpy_impl), repeat)
        rows.append((depth, name, t_nb, t_np, t_np / t_nb))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--depths", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--brute-depth", type=int, default=8)
    args = ap.parse_args()
    print(f"{'depth':>5}  {'kernel':<16}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>9}")
    for d in args.depths:
        for depth, name, t_nb, t_np, ratio in bench(d, args.repeat, args.brute_depth):
            print(f"{depth:>5}  {name:<16}{t_nb:>12.5f}{t_np:>12.5f}{ratio:>9.1f}")


if __name__ == "__main__":
    main()
