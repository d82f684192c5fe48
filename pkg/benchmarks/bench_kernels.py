"""Time the compiled kernels against the pure-Python (NumPy) fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--height 6e5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from zetaprime import _pykernels, kernels, rscore


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(height):
    ser, dser = rscore._series(3)
    ts_rs = np.linspace(height, height + 50.0, 2000)
    ts_em = np.linspace(200.0, 1500.0, 200)
    cuts = rscore._em_cut(ts_em)
    ts_theta = np.linspace(1e3, 1e8, 200_000)
    rng = np.random.default_rng(0)
    coeffs = rng.standard_normal(20_000) + 1j * rng.standard_normal(20_000)
    weights = np.arange(1, 20_001, dtype=np.float64)
    vals = rng.standard_normal(1_000_000)
    return [
        ("theta_mod (2e5 points)", lambda m: m.theta_mod(ts_theta)),
        (f"rs_batch Z, Z' (2000 points at t={height:.0e})", lambda m: m.rs_batch(ts_rs, ser, dser, True)),
        ("em_batch (200 points, t <= 1500)", lambda m: m.em_batch(ts_em, cuts, 14, True)),
        ("exp_sum_grid (2e4 terms x 512 grid)", lambda m: m.exp_sum_grid(coeffs, weights, 0.0, 1e-4, 512)),
        ("neumaier_sum (1e6 values)", lambda m: m.neumaier_sum(vals)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--height", type=float, default=6e5)
    args = ap.parse_args(argv)
    comp = kernels.compiled()
    if comp is None:
        print("compiled extension not built; only the python backend is timed")
    print(f"{'kernel':48s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    for name, fn in cases(args.height):
        tp = _best(lambda: fn(_pykernels), args.repeat)
        if comp is None:
            print(f"{name:48s} {tp:10.4f} {'-':>11s} {'-':>8s}")
            continue
        tc = _best(lambda: fn(comp), args.repeat)
        print(f"{name:48s} {tp:10.4f} {tc:11.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
