"""Linear Volterra integral equations of the second kind.

Solves ``u(t) + int_0^t K(t, s) u(s) ds = g(t)`` on a uniform grid by
product-trapezoid marching: with ``h`` the grid step and ``K_ji = K(t_j,
t_i)``,

    u_0 = g_0,
    u_j = [g_j - h (K_j0 u_0 / 2 + sum_{i=1}^{j-1} K_ji u_i)]
          / (1 + (h/2) K_jj),     j >= 1,

which is globally O(h^2) for smooth data.  The kernel may be supplied as a
callable (evaluated lazily row by row) or precomputed into a dense matrix,
trading memory for the compiled marching kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import _kernels
from .errors import SingularDiagonalError

Kernel = Union[Callable[[float, np.ndarray], np.ndarray], np.ndarray]

DIAGONAL_TOL = 1e-12


@dataclass(frozen=True)
class VolterraProblem:
    """Second-kind problem: kernel on the causal triangle, right-hand side
    sampled on the uniform grid ``ts``."""

    kernel: Kernel
    g: np.ndarray
    ts: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=np.float64)
        ts = np.asarray(self.ts, dtype=np.float64)
        if g.shape != ts.shape:
            raise ValueError("g and ts must have matching shapes")
        if len(ts) < 2:
            raise ValueError("need at least two grid points")
        if not np.all(np.isfinite(g)):
            raise ValueError("right-hand side must be finite")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "ts", ts)

    @property
    def h(self) -> float:
        return float(self.ts[1] - self.ts[0])


def _kernel_matrix(problem: VolterraProblem) -> np.ndarray:
    if isinstance(problem.kernel, np.ndarray):
        mat = np.asarray(problem.kernel, dtype=np.float64)
        if mat.shape != (len(problem.ts), len(problem.ts)):
            raise ValueError("kernel matrix shape does not match the grid")
        return mat
    ts = problem.ts
    mat = np.zeros((len(ts), len(ts)))
    for j in range(len(ts)):
        mat[j, :j + 1] = problem.kernel(float(ts[j]), ts[:j + 1])
    return mat


def solve_second_kind(problem: VolterraProblem,
                      precompute: bool = True) -> np.ndarray:
    """March the second-kind equation forward; returns ``u`` on the grid.

    ``precompute=True`` materialises the dense kernel table and runs the
    compiled march; ``precompute=False`` keeps the kernel lazy and
    accumulates rows with numpy dots (lower memory, more kernel calls).
    """
    h = problem.h
    if precompute or isinstance(problem.kernel, np.ndarray):
        mat = _kernel_matrix(problem)
        diag = 1.0 + 0.5 * h * np.diagonal(mat)
        if float(np.min(np.abs(diag))) < DIAGONAL_TOL:
            raise SingularDiagonalError(
                "marching factor 1 + (h/2) K(t,t) is numerically zero")
        return _kernels.volterra_march(mat, problem.g, h)

    g = problem.g
    ts = problem.ts
    u = np.empty(len(ts))
    u[0] = g[0]
    for j in range(1, len(ts)):
        row = np.asarray(problem.kernel(float(ts[j]), ts[:j + 1]),
                         dtype=np.float64)
        denom = 1.0 + 0.5 * h * row[j]
        if abs(denom) < DIAGONAL_TOL:
            raise SingularDiagonalError(
                "marching factor 1 + (h/2) K(t,t) is numerically zero")
        acc = 0.5 * row[0] * u[0]
        if j > 1:
            acc += row[1:j] @ u[1:j]
        u[j] = (g[j] - h * acc) / denom
    return u


def residual(problem: VolterraProblem, u: np.ndarray) -> float:
    """Sup-norm residual of ``u + int K u - g`` under trapezoid quadrature."""
    mat = _kernel_matrix(problem)
    h = problem.h
    res = np.empty(len(u))
    for j in range(len(u)):
        w = np.full(j + 1, h)
        w[0] = w[-1] = 0.5 * h
        res[j] = u[j] + float(mat[j, :j + 1] @ (w * u[:j + 1])) - problem.g[j]
    res[0] = u[0] - problem.g[0]
    return float(np.max(np.abs(res)))
