"""Benchmark the loop-bound kernels: numba path vs the numpy fallback.

Both implementations live in gbdd._accel and are importable regardless of
which one the package selected at import time, so this script times them
side by side in one process. Run with GBDD_DISABLE_NUMBA=1 to confirm the
fallback is the one the package would pick.

Usage: python3 benchmarks/bench_accel.py [--n 256] [--repeats 5]
"""

import argparse
import time

import numpy as np

from gbdd import _accel
from gbdd.diagnostics import default_displacements
from gbdd.grid import make_grid


def _workload(n):
    g = make_grid(n, n, 8 * np.pi, 8 * np.pi)
    X1, X2 = g.mesh()
    rng = np.random.default_rng(99)
    per = np.exp(-((X1 - 4 * np.pi) ** 2 + (X2 - 4 * np.pi) ** 2) / 4.0)
    per += 0.05 * rng.standard_normal(g.shape)
    per -= per.mean(axis=0, keepdims=True)  # periodic part is row-mean-free
    row_mass = 1.0 + 0.3 * np.sin(g.x2)
    shifts = default_displacements(g)
    dx = np.array([g.L1 / n, g.L2 / n])
    hlens = np.hypot(shifts[:, 0] * dx[0], shifts[:, 1] * dx[1])
    omega_vals = 0.1 + hlens  # any positive modulus works for timing
    return g, per, row_mass, shifts, hlens, omega_vals


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_scan(n, repeats):
    g, per, row_mass, shifts, hlens, omega_vals = _workload(n)
    dx1 = g.L1 / g.n1

    def run(kernel):
        worst = 0.0
        for m in range(shifts.shape[0]):
            s1, s2 = int(shifts[m, 0]), int(shifts[m, 1])
            val = kernel(per, row_mass, g.x1, g.L1, s1, s2, s1 * dx1)
            worst = max(worst, val / omega_vals[m])
        return worst

    if _accel.HAS_NUMBA:
        run(_accel._shift_diff_max_jit)  # compile outside the timed region
    t_np, v_np = _time(lambda: run(_accel._shift_diff_max_numpy), repeats)
    t_jit, v_jit = _time(lambda: run(_accel._shift_diff_max_jit), repeats)
    return t_np, t_jit, abs(v_np - v_jit) / abs(v_np)


def bench_stats(n, repeats):
    _, per, _, _, _, _ = _workload(n)
    dx1 = 8 * np.pi / n
    if _accel.HAS_NUMBA:
        _accel._field_stats_jit(per, dx1)
    loops = 200  # single reduction is too fast to time on its own

    def run(kernel):
        out = None
        for _ in range(loops):
            out = kernel(per, dx1)
        return out

    t_np, v_np = _time(lambda: run(_accel._field_stats_numpy), repeats)
    t_jit, v_jit = _time(lambda: run(_accel._field_stats_jit), repeats)
    rel = max(
        abs(a - b) / max(abs(a), 1e-300) for a, b in zip(v_np, v_jit)
    )
    return t_np / loops, t_jit / loops, rel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256, help="grid points per axis")
    ap.add_argument("--repeats", type=int, default=5, help="timing repeats (best kept)")
    args = ap.parse_args()

    print(f"grid {args.n}x{args.n}, repeats={args.repeats}")
    print(f"numba available: {_accel.HAS_NUMBA}, package selected numba: {_accel.USING_NUMBA}")
    if not _accel.HAS_NUMBA:
        print("numba missing or disabled: the 'jit' column is plain python loops")
    print()
    print(f"{'kernel':<18}{'numpy':>12}{'numba':>12}{'speedup':>10}{'rel diff':>12}")
    for name, fn in (("compliance_scan", bench_scan), ("field_stats", bench_stats)):
        t_np, t_jit, rel = fn(args.n, args.repeats)
        spd = t_np / t_jit if t_jit > 0 else float("inf")
        print(f"{name:<18}{t_np * 1e3:>10.3f}ms{t_jit * 1e3:>10.3f}ms{spd:>9.1f}x{rel:>12.2e}")


if __name__ == "__main__":
    main()
