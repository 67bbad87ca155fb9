"""Hot numerical kernels: numba-compiled with a pure-numpy fallback.

The classical 4th-order modal marcher and the Volterra product-trapezoid
march dominate runtime.  Both exist in two functionally identical variants:
an njit-compiled loop version and a vectorised numpy version.  Selection
happens once at import time: setting the environment variable
``WAVESOURCE_DISABLE_NUMBA`` to a truthy value (or a missing/broken numba
install) picks the numpy path.  ``benchmarks/bench_kernels.py`` times the
two against each other.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("WAVESOURCE_DISABLE_NUMBA", "").lower() in (
    "1", "true", "yes", "on")

try:  # pragma: no cover - depends on environment
    if _DISABLE:
        raise ImportError("numba disabled by WAVESOURCE_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    njit = None
    HAVE_NUMBA = False


def rk4_modal_numpy(g_table, n_sq, dt, steps_per_sample, n_samples,
                    y0=None, v0=None):
    """Integrate ``y_n'' + n^2 y_n = g_n(t)`` for all modes at once.

    ``g_table`` holds the forcing on the half-step lattice: row ``2*i + s``
    is the forcing at time ``i*dt + s*dt/2``, so one RK4 step consumes three
    consecutive rows.  Samples (every ``steps_per_sample`` steps) of ``y``
    and ``y'`` are returned, including the initial state.
    """
    n_modes = g_table.shape[1]
    y = np.zeros(n_modes) if y0 is None else y0.astype(np.float64).copy()
    v = np.zeros(n_modes) if v0 is None else v0.astype(np.float64).copy()
    ys = np.empty((n_samples + 1, n_modes))
    vs = np.empty((n_samples + 1, n_modes))
    ys[0] = y
    vs[0] = v
    half = 0.5 * dt
    sixth = dt / 6.0
    idx = 0
    for j in range(n_samples):
        for _ in range(steps_per_sample):
            g0 = g_table[idx]
            gh = g_table[idx + 1]
            g1 = g_table[idx + 2]
            k1y = v
            k1v = g0 - n_sq * y
            k2y = v + half * k1v
            k2v = gh - n_sq * (y + half * k1y)
            k3y = v + half * k2v
            k3v = gh - n_sq * (y + half * k2y)
            k4y = v + dt * k3v
            k4v = g1 - n_sq * (y + dt * k3y)
            y = y + sixth * (k1y + 2.0 * (k2y + k3y) + k4y)
            v = v + sixth * (k1v + 2.0 * (k2v + k3v) + k4v)
            idx += 2
        ys[j + 1] = y
        vs[j + 1] = v
    return ys, vs


def volterra_march_numpy(kernel_matrix, g, h):
    """Product-trapezoid marching for u + int_0^t K u = g on a uniform grid.

    ``kernel_matrix[j, i] = K(t_j, t_i)``.  Row ``j`` uses trapezoid weights
    on ``[t_0, t_j]``; the diagonal entry sits inside the solve factor
    ``1 + (h/2) K(t_j, t_j)``.
    """
    m = len(g)
    u = np.empty(m)
    u[0] = g[0]
    for j in range(1, m):
        acc = 0.5 * kernel_matrix[j, 0] * u[0]
        if j > 1:
            acc += kernel_matrix[j, 1:j] @ u[1:j]
        denom = 1.0 + 0.5 * h * kernel_matrix[j, j]
        u[j] = (g[j] - h * acc) / denom
    return u


if HAVE_NUMBA:

    @njit(cache=True)
    def _rk4_modal_njit(g_table, n_sq, dt, steps_per_sample, n_samples,
                        y, v):  # pragma: no cover - exercised via wrapper
        n_modes = g_table.shape[1]
        ys = np.empty((n_samples + 1, n_modes))
        vs = np.empty((n_samples + 1, n_modes))
        for n in range(n_modes):
            ys[0, n] = y[n]
            vs[0, n] = v[n]
        half = 0.5 * dt
        sixth = dt / 6.0
        idx = 0
        for j in range(n_samples):
            for _ in range(steps_per_sample):
                for n in range(n_modes):
                    g0 = g_table[idx, n]
                    gh = g_table[idx + 1, n]
                    g1 = g_table[idx + 2, n]
                    yn = y[n]
                    vn = v[n]
                    k1y = vn
                    k1v = g0 - n_sq[n] * yn
                    k2y = vn + half * k1v
                    k2v = gh - n_sq[n] * (yn + half * k1y)
                    k3y = vn + half * k2v
                    k3v = gh - n_sq[n] * (yn + half * k2y)
                    k4y = vn + dt * k3v
                    k4v = g1 - n_sq[n] * (yn + dt * k3y)
                    y[n] = yn + sixth * (k1y + 2.0 * (k2y + k3y) + k4y)
                    v[n] = vn + sixth * (k1v + 2.0 * (k2v + k3v) + k4v)
                idx += 2
            for n in range(n_modes):
                ys[j + 1, n] = y[n]
                vs[j + 1, n] = v[n]
        return ys, vs

    def rk4_modal_numba(g_table, n_sq, dt, steps_per_sample, n_samples,
                        y0=None, v0=None):
        n_modes = g_table.shape[1]
        y = np.zeros(n_modes) if y0 is None else y0.astype(np.float64).copy()
        v = np.zeros(n_modes) if v0 is None else v0.astype(np.float64).copy()
        return _rk4_modal_njit(
            np.ascontiguousarray(g_table, dtype=np.float64),
            np.ascontiguousarray(n_sq, dtype=np.float64),
            float(dt), int(steps_per_sample), int(n_samples), y, v)

    @njit(cache=True)
    def volterra_march_numba(kernel_matrix, g, h):  # pragma: no cover
        m = len(g)
        u = np.empty(m)
        u[0] = g[0]
        for j in range(1, m):
            acc = 0.5 * kernel_matrix[j, 0] * u[0]
            for i in range(1, j):
                acc += kernel_matrix[j, i] * u[i]
            denom = 1.0 + 0.5 * h * kernel_matrix[j, j]
            u[j] = (g[j] - h * acc) / denom
        return u

    rk4_modal = rk4_modal_numba
    volterra_march = volterra_march_numba
else:
    rk4_modal = rk4_modal_numpy
    volterra_march = volterra_march_numpy
