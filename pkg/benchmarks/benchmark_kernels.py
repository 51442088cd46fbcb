#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the three propagation loops on representative workloads and prints a
comparison table.  The compiled variants are warmed first so JIT
compilation is not billed.  Run:

    python benchmarks/benchmark_kernels.py [--steps N] [--dim N]
"""

import argparse
import time

import numpy as np

from zenodark import kernels


def _random_problem(rng, dim, steps):
    def unit():
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return v / np.linalg.norm(v)

    H = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    H = 0.5 * (H + H.conj().T)
    psi0 = unit()
    f_grid = np.stack([unit() for _ in range(steps + 1)])
    f_mid = np.stack([unit() for _ in range(steps)])
    fdot_mid = np.stack(
        [rng.standard_normal(dim) + 1j * rng.standard_normal(dim) for _ in range(steps)]
    )
    U = np.linalg.qr(H)[0]
    return H, U, psi0, f_grid, f_mid, fdot_mid


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(42)
    H, U, psi0, f_grid, f_mid, fdot_mid = _random_problem(rng, args.dim, args.steps)
    dt = 1e-3

    cases = {
        "discrete": (
            lambda: kernels.discrete_loop(U, f_grid[1:], psi0),
            lambda: kernels.discrete_loop_numpy(U, f_grid[1:], psi0),
        ),
        "continuous": (
            lambda: kernels.continuous_loop(H, f_grid, f_mid, fdot_mid, psi0, dt),
            lambda: kernels.continuous_loop_numpy(H, f_grid, f_mid, fdot_mid, psi0, dt),
        ),
        "embedded": (
            lambda: kernels.embedded_loop(f_mid, psi0, 100.0, dt),
            lambda: kernels.embedded_loop_numpy(f_mid, psi0, 100.0, dt),
        ),
    }

    print(f"active backend: {kernels.backend()}")
    print(f"dim={args.dim}, steps={args.steps}, best of {args.repeats}")
    print(f"{'kernel':<12} {'compiled [s]':>14} {'numpy [s]':>14} {'speedup':>9}")
    for name, (fast, slow) in cases.items():
        fast()  # warm the JIT
        t_fast = _time(fast, args.repeats)
        t_slow = _time(slow, args.repeats)
        print(f"{name:<12} {t_fast:>14.4f} {t_slow:>14.4f} {t_slow / t_fast:>8.1f}x")
    if not kernels.USING_NUMBA:
        print("note: numba inactive (missing or disabled); both columns interpreted")


if __name__ == "__main__":
    main()
