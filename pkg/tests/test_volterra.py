"""Second-kind Volterra solver tests: exactness, order, causality."""

import numpy as np
import pytest

from oracles import simpson
from wavesource._kernels import volterra_march_numpy
from wavesource.errors import SingularDiagonalError
from wavesource.volterra import VolterraProblem, residual, solve_second_kind


def test_zero_kernel_returns_rhs_exactly():
    ts = np.linspace(0.0, 1.0, 33)
    g = np.sin(3 * ts) + 0.5
    problem = VolterraProblem(kernel=np.zeros((33, 33)), g=g, ts=ts)
    assert np.array_equal(solve_second_kind(problem), g)


def exp_decay_error(m: int) -> float:
    # u + int_0^t u = 1 has the solution e^{-t}
    ts = np.linspace(0.0, 1.0, m + 1)
    problem = VolterraProblem(
        kernel=lambda t, s: np.ones_like(s), g=np.ones(m + 1), ts=ts)
    u = solve_second_kind(problem)
    return float(np.max(np.abs(u - np.exp(-ts))))


def test_exponential_decay_second_order():
    e_coarse, e_fine = exp_decay_error(200), exp_decay_error(400)
    assert e_coarse < 5e-6
    assert e_coarse / e_fine == pytest.approx(4.0, abs=0.5)


def manufactured_error(m: int) -> float:
    # choose u* = 1 + t^2, K = -sin(t-s); build g = u* + int K u* by
    # high-resolution Simpson quadrature, then ask the solver for u*
    ts = np.linspace(0.0, 1.0, m + 1)
    u_star = 1.0 + ts ** 2
    g = np.empty_like(ts)
    g[0] = u_star[0]
    for j in range(1, m + 1):
        s = np.linspace(0.0, ts[j], 801)
        vals = -np.sin(ts[j] - s) * (1.0 + s ** 2)
        g[j] = u_star[j] + simpson(vals, s[1] - s[0])
    problem = VolterraProblem(
        kernel=lambda t, s: -np.sin(t - s), g=g, ts=ts)
    return float(np.max(np.abs(solve_second_kind(problem) - u_star)))


def test_manufactured_solution_order():
    ratio = manufactured_error(250) / manufactured_error(500)
    assert 3.5 <= ratio <= 4.5


def test_causality_of_marching():
    ts = np.linspace(0.0, 1.0, 65)
    g = np.cos(ts)
    problem = VolterraProblem(kernel=lambda t, s: t * s + 0.3, g=g, ts=ts)
    u_full = solve_second_kind(problem)
    g_perturbed = g.copy()
    g_perturbed[33:] += 100.0
    perturbed = VolterraProblem(
        kernel=lambda t, s: t * s + 0.3, g=g_perturbed, ts=ts)
    u_perturbed = solve_second_kind(perturbed)
    assert np.array_equal(u_full[:33], u_perturbed[:33])
    assert not np.array_equal(u_full[33:], u_perturbed[33:])


def test_lazy_and_precomputed_paths_agree():
    ts = np.linspace(0.0, 2.0, 101)
    g = np.exp(-ts) * np.sin(2 * ts)
    problem = VolterraProblem(
        kernel=lambda t, s: -np.sin(t - s) * (1 + s), g=g, ts=ts)
    dense = solve_second_kind(problem, precompute=True)
    lazy = solve_second_kind(problem, precompute=False)
    assert np.max(np.abs(dense - lazy)) < 1e-14


def test_compiled_and_numpy_marchers_agree():
    from wavesource import _kernels
    ts = np.linspace(0.0, 1.0, 201)
    rng = np.random.default_rng(7)
    mat = rng.normal(size=(201, 201))
    g = rng.normal(size=201)
    h = float(ts[1] - ts[0])
    a = volterra_march_numpy(mat, g, h)
    b = _kernels.volterra_march(mat, g, h)
    assert np.max(np.abs(a - b)) < 1e-12


def test_singular_diagonal_detected():
    ts = np.linspace(0.0, 1.0, 11)
    h = ts[1] - ts[0]
    mat = np.zeros((11, 11))
    np.fill_diagonal(mat, -2.0 / h)  # forces 1 + (h/2) K(t,t) = 0
    problem = VolterraProblem(kernel=mat, g=np.ones(11), ts=ts)
    with pytest.raises(SingularDiagonalError):
        solve_second_kind(problem)


def test_residual_diagnostic_small_for_solution():
    ts = np.linspace(0.0, 1.0, 201)
    problem = VolterraProblem(
        kernel=lambda t, s: np.ones_like(s), g=np.ones(201), ts=ts)
    u = solve_second_kind(problem)
    assert residual(problem, u) < 1e-12


def test_rejects_mismatched_shapes():
    with pytest.raises(ValueError):
        VolterraProblem(kernel=np.zeros((3, 3)), g=np.ones(4),
                        ts=np.linspace(0, 1, 3))
