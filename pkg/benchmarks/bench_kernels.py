"""Numba vs pure-numpy timings for the cocycle kernels.

    python benchmarks/bench_kernels.py [--iterates N] [--phases P] [--repeats R]

The first numba call compiles (or loads the on-disk cache); it is timed
separately and excluded from the steady-state figures.
"""
import argparse
import time

import numpy as np

from cocycle_lab import _kernels
from cocycle_lab.cocycle import GOLDEN, phase_grid, schrodinger_coeffs
from cocycle_lab.trigpoly import TrigPoly


def best_of(fn, repeats):
    best, out = float("inf"), None
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--iterates", type=int, default=100_000)
    ap.add_argument("--phases", type=int, default=32)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    v = TrigPoly([9.0, 0.8], [0.0, 0.0])
    g, u, l, K = schrodinger_coeffs(v, 0.0)
    x0 = phase_grid(args.phases)
    rng = np.random.default_rng(0)
    a = rng.normal(size=20_000) + 1j * rng.normal(size=20_000)
    V = 2 * np.cos(2 * np.pi * GOLDEN * np.arange(300))

    impls = [("numpy", _kernels.numpy_impl)]
    if _kernels.numba_impl is None:
        print("numba not importable; numpy only")
    else:
        t = time.perf_counter()
        _kernels.numba_impl.orbit_log_norms(g, u, l, K, -2.0, GOLDEN, x0[:1], 4)
        _kernels.numba_impl.growth_log_norms(a[:4])
        _kernels.numba_impl.transfer_trace(V[:4], 0.3)
        print(f"numba warm-up (compile or cache load): {time.perf_counter() - t:.2f} s")
        impls.insert(0, ("numba", _kernels.numba_impl))

    cases = {
        f"orbit_log_norms n={args.iterates} phases={args.phases}":
            lambda m: m.orbit_log_norms(g, u, l, K, -2.0, GOLDEN, x0, args.iterates).mean(),
        f"growth_log_norms len={a.size}": lambda m: m.growth_log_norms(a)[-1],
        f"transfer_trace q={V.size} x200": lambda m: sum(m.transfer_trace(V, 0.3 + 1e-3 * k) for k in range(200)),
    }
    print(f"{'kernel':48s} {'impl':6s} {'best s':>9s} {'value':>16s}")
    for label, fn in cases.items():
        times = {}
        for name, m in impls:
            times[name], val = best_of(lambda: fn(m), args.repeats)
            print(f"{label:48s} {name:6s} {times[name]:9.4f} {val:16.10g}")
        if len(times) == 2:
            print(f"{'':48s} speedup {times['numpy'] / times['numba']:.1f}x")


if __name__ == "__main__":
    main()
