"""Sine-series and kernel tests."""

import math

import numpy as np
import pytest

from conftest import BC_ENVELOPES
from oracles import second_difference
from wavesource.averaging import split
from wavesource.expr import parse
from wavesource.forward import Grid, duhamel_modal
from wavesource.spectral import (
    SineCoeffs,
    a_constants,
    kernel_R,
    reconstruction_residual,
    sine_coeffs,
    time_sine_coeffs,
    volterra_kernel,
)


def test_sine_coeffs_orthogonality_single_mode():
    vals = sine_coeffs(parse("sin(x)"), 3)
    assert vals == pytest.approx([1.0, 0.0, 0.0], abs=1e-12)


def test_sine_coeffs_two_modes():
    vals = sine_coeffs(parse("sin(x)+0.3*sin(2*x)"), 4)
    assert vals == pytest.approx([1.0, 0.3, 0.0, 0.0], abs=1e-12)


def test_sine_coeffs_parabola_leading_coefficient():
    # analytic: (2/pi) * int x (pi - x) sin x dx = 8/pi
    vals = sine_coeffs(parse("x*(pi-x)"), 3)
    assert vals[0] == pytest.approx(8.0 / math.pi, abs=1e-10)
    assert vals[1] == pytest.approx(0.0, abs=1e-12)
    assert vals[2] == pytest.approx(8.0 / (27.0 * math.pi), abs=1e-10)


@pytest.mark.parametrize("mode", [1, 2, 5])
def test_pure_mode_returns_kronecker_delta(mode):
    vals = sine_coeffs(parse(f"sin({mode}*x)"), 6)
    expected = np.zeros(6)
    expected[mode - 1] = 1.0
    assert np.max(np.abs(vals - expected)) < 1e-12


def test_sine_coeffs_time_slice():
    vals = sine_coeffs(parse("sin(x)*(1+t/2)"), 2, t=1.0)
    assert vals == pytest.approx([1.5, 0.0], abs=1e-12)


def test_time_sine_coeffs_matches_per_time_calls():
    ts = np.linspace(0.0, 1.0, 9)
    table = time_sine_coeffs(parse("(1+t)*sin(2*x)"), 3, ts)
    for j in (0, 4, 8):
        assert np.allclose(table.row(j),
                           sine_coeffs(parse("(1+t)*sin(2*x)"), 3, ts[j]),
                           atol=1e-12)


def test_reconstruction_residual_reports_truncation():
    good = reconstruction_residual(
        parse("sin(x)"), sine_coeffs(parse("sin(x)"), 2), 0.0)
    assert good < 1e-12
    rough = reconstruction_residual(
        parse("x*(pi-x)"), sine_coeffs(parse("x*(pi-x)"), 2), 0.0)
    assert rough > 1e-3


def test_a_constants_time_independent_envelope():
    a1, a2 = a_constants(parse("sin(x)"), 2)
    assert a1 == pytest.approx([-1.0, 0.0], abs=1e-12)
    assert a2 == pytest.approx([0.0, 0.0], abs=1e-12)


def test_a_constants_linear_time_envelope():
    a1, a2 = a_constants(parse("(1+t)*sin(2*x)"), 3)
    assert a1[1] == pytest.approx(-4.0, abs=1e-11)
    assert a2[1] == pytest.approx(-4.0, abs=1e-11)


def test_a_constants_zero_envelope():
    a1, a2 = a_constants(parse("0"), 3)
    assert np.max(np.abs(a1)) < 1e-13
    assert np.max(np.abs(a2)) < 1e-13


@pytest.mark.parametrize("n", [1, 2, 7])
def test_resolvent_factors_vanish_at_zero(n):
    assert kernel_R(0, n, 0.0) == 0.0
    assert kernel_R(1, n, 0.0) == 0.0


def test_resolvent_factor_values():
    assert kernel_R(1, 1, math.pi) == pytest.approx(math.pi)
    assert kernel_R(0, 2, math.pi / 2) == pytest.approx(1.0)


def test_resolvent_factor_rejects_bad_arguments():
    with pytest.raises(ValueError):
        kernel_R(0, 0, 1.0)
    with pytest.raises(ValueError):
        kernel_R(2, 1, 1.0)


@pytest.mark.parametrize("source", BC_ENVELOPES)
def test_boundary_respecting_envelopes_satisfy_mode_identity(source):
    # integrating by parts twice: coefficients of f_xx are -n^2 times those
    # of f whenever f and f_xx vanish at both endpoints
    f = parse(source)
    n = np.arange(1, 9)
    for t in (0.0, 0.7):
        base = sine_coeffs(f, 8, t)
        from wavesource.expr import diff
        second = sine_coeffs(diff(diff(f, "x"), "x"), 8, t)
        assert np.max(np.abs(second + n ** 2 * base)) < 1e-8


def test_volterra_kernel_single_mode_closed_form():
    kern = volterra_kernel(SineCoeffs([1.0]), math.pi / 2)
    ts = np.linspace(0.0, 1.0, 11)
    for t in (0.3, 0.9):
        assert np.allclose(kern(t, ts[ts <= t]),
                           -np.sin(t - ts[ts <= t]), atol=1e-14)


def test_volterra_kernel_vanishes_on_diagonal():
    kern = volterra_kernel(SineCoeffs([1.0, -0.4, 0.2]), 1.1)
    for t in np.linspace(0.0, 2.0, 9):
        assert kern(float(t), float(t)) == pytest.approx(0.0, abs=1e-15)


def test_volterra_kernel_zero_envelope():
    kern = volterra_kernel(SineCoeffs([0.0, 0.0]), 1.0)
    assert np.max(np.abs(kern.matrix(np.linspace(0, 1, 8)))) == 0.0


def test_volterra_kernel_matrix_matches_callable():
    ts = np.linspace(0.0, 1.0, 12)
    fc = time_sine_coeffs(parse("(1+t)*sin(x)"), 3, ts)
    kern = volterra_kernel(fc, 0.8)
    mat = kern.matrix(ts)
    for j in (3, 7, 11):
        assert np.allclose(mat[j, :j + 1], kern(float(ts[j]), ts[:j + 1]),
                           atol=1e-13)


def test_volterra_kernel_rejects_bad_observation_point():
    with pytest.raises(ValueError):
        volterra_kernel(SineCoeffs([1.0]), 0.0)


def test_kernel_reproduces_second_time_derivative_of_leading_field():
    # d^2/dt^2 u0(x0, .) = f(x0,t) r0(t) + int_0^t K(t,s) r0(s) ds
    f = parse("sin(x)+0.3*sin(2*x)")
    x0 = 1.0
    grid = Grid(1.0, 400, 8)
    r0, _ = split(parse("1+t+cos(tau)"), grid.ts, 4)
    fc = time_sine_coeffs(f, 4, grid.ts)
    modal = duhamel_modal(fc, r0)
    n = np.arange(1, 5)
    u0_at = modal @ np.sin(n * x0)

    kern = volterra_kernel(fc, x0)
    mat = kern.matrix(grid.ts)
    h = grid.ht
    fx0 = fc.values @ np.sin(n * x0)
    for j in (40, 200, 360):
        w = np.full(j + 1, h)
        w[0] = w[-1] = h / 2
        rhs = fx0[j] * r0[j] + float(mat[j, :j + 1] @ (w * r0[:j + 1]))

        def u_of_t(tv, modal=modal, ts=grid.ts):
            out = np.empty(4)
            for k in range(4):
                out[k] = np.interp(tv, ts, modal[:, k])
            return float(out @ np.sin(n * x0))

        lhs = second_difference(u_of_t, float(grid.ts[j]), step=h)
        assert abs(lhs - rhs) < 1e-4
