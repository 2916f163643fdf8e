"""Benchmark: compiled bicubic kernel vs the NumPy fallback.

Run:  python benchmarks/bench_interp.py
"""

import time

import numpy as np

from bouslp.interp import (
    HAVE_COMPILED_KERNEL,
    _bicubic_numpy,
    bicubic_periodic,
)
from bouslp.flowmap import inverse_flow_map
from bouslp.initdata import taylor_green, zero
from bouslp.solver import SolverConfig, simulate
from bouslp.spectral import TWO_PI, Grid


def time_call(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pointwise():
    print(f"compiled kernel available: {HAVE_COMPILED_KERNEL}")
    print(f"{'n':>6} {'points':>10} {'compiled (ms)':>14} {'numpy (ms)':>12} {'speedup':>8}")
    rng = np.random.default_rng(0)
    for n in (64, 128, 256):
        grid = Grid(n)
        f = np.sin(grid.arrays.x1) * np.cos(grid.arrays.x2)
        pts = rng.uniform(0, TWO_PI, size=(2, n * n))
        t_np = time_call(_bicubic_numpy, f, pts[0], pts[1], TWO_PI)
        if HAVE_COMPILED_KERNEL:
            t_c = time_call(bicubic_periodic, f, pts[0], pts[1], TWO_PI)
            print(f"{n:>6} {n*n:>10} {t_c*1e3:>14.3f} {t_np*1e3:>12.3f} {t_np/t_c:>8.1f}x")
        else:
            print(f"{n:>6} {n*n:>10} {'-':>14} {t_np*1e3:>12.3f} {'-':>8}")


def bench_flow_map():
    grid = Grid(128)
    cfg = SolverConfig(kappa=0.0, dt=2e-3, t_end=0.25)
    traj = simulate(taylor_green(grid), zero(grid), cfg, stride=25)
    t = time_call(lambda: inverse_flow_map(traj, 0.0, 0.25), repeats=3)
    print(f"\ninverse flow map, 128^2 grid, span 0.25: {t*1e3:.1f} ms "
          f"({'compiled' if HAVE_COMPILED_KERNEL else 'numpy fallback'})")


if __name__ == "__main__":
    bench_pointwise()
    bench_flow_map()
