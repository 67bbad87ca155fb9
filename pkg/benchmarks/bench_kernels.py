"""Benchmark the compiled kernels against their pure-numpy fallbacks.

Runs the modal RK4 marcher and the Volterra product-trapezoid march on a
representative workload through both implementations and prints a timing
table.  The numba path must be available for the comparison; the same
numbers can be reproduced with the fallback only by setting
``WAVESOURCE_DISABLE_NUMBA=1`` (then only the numpy column is filled).

Usage::

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from wavesource import _kernels
from wavesource._kernels import rk4_modal_numpy, volterra_march_numpy


def timed(fn, *args, repeat: int = 3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_rk4():
    rng = np.random.default_rng(1)
    n_modes, steps_per_cell, n_samples = 32, 8, 2000
    g = rng.standard_normal((2 * steps_per_cell * n_samples + 1, n_modes))
    n_sq = np.arange(1.0, n_modes + 1.0) ** 2
    dt = 1.0 / (steps_per_cell * n_samples)
    args = (g, n_sq, dt, steps_per_cell, n_samples)

    t_numpy, (y_np, _) = timed(rk4_modal_numpy, *args)
    if _kernels.HAVE_NUMBA:
        _kernels.rk4_modal(*args)  # compile outside the timing
        t_numba, (y_nb, _) = timed(_kernels.rk4_modal, *args)
        gap = float(np.max(np.abs(y_np - y_nb)))
    else:
        t_numba, gap = float("nan"), 0.0
    return "rk4_modal", t_numpy, t_numba, gap


def bench_volterra():
    rng = np.random.default_rng(2)
    m = 2000
    ts = np.linspace(0.0, 1.0, m + 1)
    mat = rng.standard_normal((m + 1, m + 1)) * 0.1
    np.fill_diagonal(mat, 0.0)
    g = rng.standard_normal(m + 1)
    h = float(ts[1] - ts[0])

    t_numpy, u_np = timed(volterra_march_numpy, mat, g, h)
    if _kernels.HAVE_NUMBA:
        _kernels.volterra_march(mat, g, h)
        t_numba, u_nb = timed(_kernels.volterra_march, mat, g, h)
        gap = float(np.max(np.abs(u_np - u_nb)))
    else:
        t_numba, gap = float("nan"), 0.0
    return "volterra_march", t_numpy, t_numba, gap


def main() -> None:
    print(f"numba available: {_kernels.HAVE_NUMBA}")
    print(f"{'kernel':<16}{'numpy [s]':>12}{'numba [s]':>12}"
          f"{'speedup':>10}{'max gap':>12}")
    for bench in (bench_rk4, bench_volterra):
        name, t_np, t_nb, gap = bench()
        speedup = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
        print(f"{name:<16}{t_np:>12.4f}{t_nb:>12.4f}"
              f"{speedup:>10.1f}{gap:>12.2e}")


if __name__ == "__main__":
    main()
