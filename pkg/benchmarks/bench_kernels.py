"""Numba vs numpy timings for the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Run with SHIFTCHAOS_DISABLE_NUMBA=1 to confirm the numpy path alone.
"""
import argparse
import time

import numpy as np

from shiftchaos import _kernels
from shiftchaos.norms import _NODES, _WEIGHTS
from shiftchaos.piecewise import pack
from shiftchaos.sampling import random_finite, rng_for


def best_of(fn, repeat):
    fn()  # warm-up (jit compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = rng_for(7)
    f = random_finite(rng, span=8, q=8, max_pieces=12, max_degree=4, complex_values=True)
    packed = pack(f.segments)
    t = np.linspace(0, 8, 200_000)
    lo = np.linspace(0, 8, 20_001)[:-1]
    hi = lo + 8 / 20_000
    axis = np.linspace(-3, 3, 801)
    lo_small, hi_small = lo[:8], hi[:8]

    cases = {
        "eval_segments (200k points)": (
            lambda k: k(t, *packed),
            _kernels.eval_segments_numpy,
            _kernels.eval_segments_numba,
        ),
        "panel_abs_p (20k panels, p=1.5)": (
            lambda k: k(lo, hi, _NODES, _WEIGHTS, *packed, 1.5),
            _kernels.panel_abs_p_numpy,
            _kernels.panel_abs_p_numba,
        ),
        "panel_abs_p x200 calls (8 panels)": (
            lambda k: [k(lo_small, hi_small, _NODES, _WEIGHTS, *packed, 2.0) for _ in range(200)][-1],
            _kernels.panel_abs_p_numpy,
            _kernels.panel_abs_p_numba,
        ),
        "classify_disk (801x801)": (
            lambda k: k(axis, axis, 2.0, 1e-12),
            _kernels.classify_disk_numpy,
            _kernels.classify_disk_numba,
        ),
    }
    print(f"active backend: {_kernels.BACKEND}")
    print(f"{'kernel':36s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}")
    for name, (call, k_np, k_nb) in cases.items():
        t_np = best_of(lambda: call(k_np), args.repeat)
        if k_nb is None:
            print(f"{name:36s} {t_np * 1e3:12.2f} {'-':>12s} {'-':>8s}")
            continue
        t_nb = best_of(lambda: call(k_nb), args.repeat)
        a, b = call(k_np), call(k_nb)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12), name
        print(f"{name:36s} {t_np * 1e3:12.2f} {t_nb * 1e3:12.2f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
