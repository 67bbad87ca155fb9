"""Assembly of the slow/fast expansion of the driven wave field.

The approximation carries three slow fields plus one two-scale corrector:

* ``u0`` - leading order, the response to the mean forcing, built per mode
  by a Duhamel convolution (composite trapezoid on the time grid);
* ``u1`` - first-order correction, proportional to the tau-slope constant
  ``b1`` of the oscillation shape;
* ``v2`` - oscillating corrector, envelope times oscillation shape;
* ``u2`` - second-order slow field solving the free wave equation with
  matching data ``u2(x,0) = -b0 f(x,0)`` and
  ``du2/dt(x,0) = b0 f_t(x,0) + b3 f(x,0)``.

The combination ``u0 + u1/w + (u2 + v2)/w**2`` approximates the reference
solution to better than second order in ``1/w``; a diagnostic third-order
two-scale term ``v3`` is available when the source is symbolic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import averaging
from .averaging import BConstants, PeriodicProfile, b_constants, rho0, rho1, split
from .errors import DomainError
from .expr import Bin, Expr, Num, diff, evaluate_array
from .spectral import TimeSineCoeffs, a_constants, time_sine_coeffs

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Grid:
    """Uniform space-time grid on [0, pi] x [0, T]."""

    T: float
    M: int  # time intervals; M+1 nodes
    P: int  # space intervals; P+1 nodes

    def __post_init__(self):
        if not (self.T > 0 and self.M >= 2 and self.P >= 2):
            raise ValueError("need T > 0, M >= 2, P >= 2")
        object.__setattr__(self, "ts", np.linspace(0.0, self.T, self.M + 1))
        object.__setattr__(self, "xs", np.linspace(0.0, np.pi, self.P + 1))

    ts: np.ndarray = field(init=False, repr=False, compare=False, default=None)
    xs: np.ndarray = field(init=False, repr=False, compare=False, default=None)

    @property
    def ht(self) -> float:
        return self.T / self.M

    def refine(self, factor: int) -> "Grid":
        """Same domain with ``factor`` times more time intervals."""
        return Grid(self.T, self.M * factor, self.P)


def fast_phase(omega: float, t) -> Union[float, np.ndarray]:
    """Fast variable ``omega * t`` reduced modulo the period to keep
    trigonometric arguments small."""
    return np.mod(np.asarray(t, dtype=np.float64) * omega, TWO_PI)


@dataclass(frozen=True)
class TwoScaleField:
    """Sum of (slow envelope) x (periodic profile) products."""

    terms: Sequence[tuple[Expr, PeriodicProfile]]

    def eval(self, x, t, tau):
        total = 0.0
        for coef, profile in self.terms:
            total = total + evaluate_array(coef, x=x, t=t) \
                * profile.eval(t, tau)
        if np.ndim(x) == 0 and np.ndim(t) == 0 and np.ndim(tau) == 0:
            return float(total)
        return np.asarray(total)


def _cumtrapz(values: np.ndarray, h: float) -> np.ndarray:
    """Cumulative trapezoid along axis 0, starting at 0."""
    inner = 0.5 * h * (values[1:] + values[:-1])
    out = np.empty_like(values)
    out[0] = 0.0
    np.cumsum(inner, axis=0, out=out[1:])
    return out


def _sine_matrix(n_modes: int, xs: np.ndarray) -> np.ndarray:
    n = np.arange(1, n_modes + 1)
    return np.sin(np.multiply.outer(n, xs))  # (N, P+1)


def duhamel_modal(fc: TimeSineCoeffs, r0: np.ndarray) -> np.ndarray:
    """Mode amplitudes ``y_n(t) = (1/n) int_0^t sin n(t-s) f_n(s) r0(s) ds``.

    Expanding ``sin n(t-s)`` reduces the convolution to two cumulative
    trapezoid integrals per mode, so the whole table costs O(M N).
    """
    ts = fc.ts
    h = float(ts[1] - ts[0])
    n = np.arange(1, fc.n_modes + 1)
    g = fc.values * np.asarray(r0, dtype=np.float64)[:, None]  # (M+1, N)
    cos_nt = np.cos(np.multiply.outer(ts, n))
    sin_nt = np.sin(np.multiply.outer(ts, n))
    int_cos = _cumtrapz(cos_nt * g, h)
    int_sin = _cumtrapz(sin_nt * g, h)
    return (sin_nt * int_cos - cos_nt * int_sin) / n


def _r_factors(n_modes: int, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(1, n_modes + 1, dtype=np.float64)
    nt = np.multiply.outer(ts, n)
    r0f = (1.0 - np.cos(nt)) / n
    r1f = ts[:, None] / n - np.sin(nt) / n ** 2
    return r0f, r1f


def u1_modal(b: BConstants, a1: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Oscillatory part of the first-order field (its secular part
    ``-b1 t f(x,0)`` is carried separately as an envelope)."""
    n = np.arange(1, len(a1) + 1, dtype=np.float64)
    _, r1f = _r_factors(len(a1), ts)
    return -b.b1 * a1[None, :] * r1f / n


def u2_modal(b: BConstants, a1: np.ndarray, a2: np.ndarray,
             ts: np.ndarray) -> np.ndarray:
    """Oscillatory part of the second-order slow field.

    Solves the free wave equation with the matching initial data; written
    through the resolvent factors this is
    ``-(1/n) [b0 a1_n R0_n(t) - (b0 a2_n + b3 a1_n) R1_n(t)]`` per mode,
    with secular envelope ``-b0 f(x,0) + t (b0 f_t(x,0) + b3 f(x,0))``
    carried separately.
    """
    n = np.arange(1, len(a1) + 1, dtype=np.float64)
    r0f, r1f = _r_factors(len(a1), ts)
    combo = b.b0 * a1[None, :] * r0f \
        - (b.b0 * a2 + b.b3 * a1)[None, :] * r1f
    return -combo / n


@dataclass(frozen=True)
class AsymptoticSolution:
    """All terms of the expansion on a grid, plus assembly helpers."""

    grid: Grid
    n_modes: int
    n_harmonics: int
    f: Expr
    bconst: BConstants
    a1: np.ndarray
    a2: np.ndarray
    r0_samples: np.ndarray
    r1: PeriodicProfile
    rho0: PeriodicProfile
    rho1: PeriodicProfile
    rho0_t: Optional[PeriodicProfile]
    rho1_t: Optional[PeriodicProfile]
    fc: TimeSineCoeffs
    u0_coeffs: np.ndarray  # (M+1, N)
    u1_coeffs: np.ndarray
    u2_coeffs: np.ndarray
    v2: TwoScaleField
    v3: Optional[TwoScaleField]

    # ---- envelope rows (exact evaluations of the symbolic envelope) ----

    def _env_rows(self, xs) -> tuple[np.ndarray, np.ndarray]:
        f0 = evaluate_array(self.f, x=xs, t=0.0)
        ft0 = evaluate_array(diff(self.f, "t"), x=xs, t=0.0)
        return f0, ft0

    # ---- fields on the grid -------------------------------------------

    def u0_field(self) -> np.ndarray:
        return self.u0_coeffs @ _sine_matrix(self.n_modes, self.grid.xs)

    def u1_field(self) -> np.ndarray:
        s = _sine_matrix(self.n_modes, self.grid.xs)
        f0, _ = self._env_rows(self.grid.xs)
        secular = -self.bconst.b1 * np.multiply.outer(self.grid.ts, f0)
        return self.u1_coeffs @ s + secular

    def u2_field(self) -> np.ndarray:
        s = _sine_matrix(self.n_modes, self.grid.xs)
        f0, ft0 = self._env_rows(self.grid.xs)
        b = self.bconst
        secular = -b.b0 * f0[None, :] \
            + np.multiply.outer(self.grid.ts, b.b0 * ft0 + b.b3 * f0)
        return self.u2_coeffs @ s + secular

    def v2_field(self, omega: float) -> np.ndarray:
        ts, xs = self.grid.ts, self.grid.xs
        osc = self.rho0.eval(ts, fast_phase(omega, ts))  # (M+1,)
        env = evaluate_array(self.f, x=xs[None, :], t=ts[:, None])
        return env * np.asarray(osc)[:, None]

    def sample_u(self, omega: float) -> np.ndarray:
        """Full approximation ``u0 + u1/w + (u2 + v2)/w^2`` on the grid."""
        if omega <= 0:
            raise ValueError("omega must be positive")
        return (self.u0_field()
                + self.u1_field() / omega
                + (self.u2_field() + self.v2_field(omega)) / omega ** 2)

    # ---- point evaluations --------------------------------------------

    def _modal_at(self, coeffs: np.ndarray, x: float) -> np.ndarray:
        n = np.arange(1, self.n_modes + 1)
        return coeffs @ np.sin(n * x)

    def u0_at(self, x: float) -> np.ndarray:
        return self._modal_at(self.u0_coeffs, x)

    def u1_at(self, x: float) -> np.ndarray:
        f0 = evaluate_array(self.f, x=float(x), t=0.0)
        return self._modal_at(self.u1_coeffs, x) \
            - self.bconst.b1 * self.grid.ts * float(f0)

    def u2_at(self, x: float) -> np.ndarray:
        b = self.bconst
        f0 = float(evaluate_array(self.f, x=float(x), t=0.0))
        ft0 = float(evaluate_array(diff(self.f, "t"), x=float(x), t=0.0))
        return self._modal_at(self.u2_coeffs, x) - b.b0 * f0 \
            + self.grid.ts * (b.b0 * ft0 + b.b3 * f0)

    def subsample(self, stride: int) -> dict:
        """Grid-node fields restricted to every ``stride``-th time node."""
        return {
            "ts": self.grid.ts[::stride],
            "u0": self.u0_field()[::stride],
            "u1": self.u1_field()[::stride],
            "u2": self.u2_field()[::stride],
        }


def assemble(solution: AsymptoticSolution, omega: float, x, t):
    """Point evaluation of the full approximation.

    Modal coefficient tables interpolate linearly in time; the x dependence
    and the fast oscillation are evaluated exactly (sine sums and the
    periodic profile at ``tau = omega t`` reduced mod 2 pi).
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    grid = solution.grid
    x_arr = np.asarray(x, dtype=np.float64)
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(x_arr < -1e-12) or np.any(x_arr > np.pi + 1e-12):
        raise DomainError("x outside [0, pi]")
    if np.any(t_arr < -1e-12) or np.any(t_arr > grid.T + 1e-12):
        raise DomainError("t outside [0, T]")
    shape = np.broadcast_shapes(x_arr.shape, t_arr.shape)
    xb = np.broadcast_to(x_arr, shape)
    tb = np.broadcast_to(t_arr, shape)

    n = np.arange(1, solution.n_modes + 1)
    sin_nx = np.sin(np.multiply.outer(xb, n))  # shape + (N,)

    def interp_modal(coeffs):
        out = np.zeros(shape + (solution.n_modes,))
        for k in range(solution.n_modes):
            out[..., k] = np.interp(tb, grid.ts, coeffs[:, k])
        return out

    b = solution.bconst
    f0 = evaluate_array(solution.f, x=xb, t=0.0)
    ft0 = evaluate_array(diff(solution.f, "t"), x=xb, t=0.0)
    u0 = np.sum(interp_modal(solution.u0_coeffs) * sin_nx, axis=-1)
    u1 = np.sum(interp_modal(solution.u1_coeffs) * sin_nx, axis=-1) \
        - b.b1 * tb * f0
    u2 = np.sum(interp_modal(solution.u2_coeffs) * sin_nx, axis=-1) \
        - b.b0 * f0 + tb * (b.b0 * ft0 + b.b3 * f0)
    v2 = solution.v2.eval(xb, tb, fast_phase(omega, tb))
    val = u0 + u1 / omega + (u2 + v2) / omega ** 2
    if np.ndim(x) == 0 and np.ndim(t) == 0:
        return float(val)
    return val


# --------------------------------------------------------- field builders

def build_u0(f: Expr, r0_samples: np.ndarray, grid: Grid,
             n_modes: int) -> np.ndarray:
    """Leading-order field on the grid from the sampled mean factor."""
    fc = time_sine_coeffs(f, n_modes, grid.ts)
    return duhamel_modal(fc, r0_samples) @ _sine_matrix(n_modes, grid.xs)


def build_u1(f: Expr, b: BConstants, a1: np.ndarray, grid: Grid,
             n_modes: int) -> np.ndarray:
    """First-order field on the grid (zero whenever ``b1`` vanishes)."""
    a1 = np.asarray(a1, dtype=np.float64)[:n_modes]
    s = _sine_matrix(len(a1), grid.xs)
    f0 = evaluate_array(f, x=grid.xs, t=0.0)
    return u1_modal(b, a1, grid.ts) @ s \
        - b.b1 * np.multiply.outer(grid.ts, f0)


def build_v2(f: Expr, rho0_profile: PeriodicProfile) -> TwoScaleField:
    """Oscillating corrector: envelope times oscillation shape."""
    return TwoScaleField(terms=((f, rho0_profile),))


def build_u2(f: Expr, b: BConstants, a1: np.ndarray, a2: np.ndarray,
             grid: Grid, n_modes: int) -> np.ndarray:
    """Second-order slow field on the grid."""
    a1 = np.asarray(a1, dtype=np.float64)[:n_modes]
    a2 = np.asarray(a2, dtype=np.float64)[:n_modes]
    s = _sine_matrix(len(a1), grid.xs)
    f0 = evaluate_array(f, x=grid.xs, t=0.0)
    ft0 = evaluate_array(diff(f, "t"), x=grid.xs, t=0.0)
    secular = -b.b0 * f0[None, :] \
        + np.multiply.outer(grid.ts, b.b0 * ft0 + b.b3 * f0)
    return u2_modal(b, a1, a2, grid.ts) @ s + secular


def build_v3(f: Expr, rho1_profile: PeriodicProfile,
             rho1_t: PeriodicProfile) -> TwoScaleField:
    """Diagnostic third-order two-scale term (not part of the assembled
    approximation)."""
    two_ft = Bin("*", Num(2.0), diff(f, "t"))
    two_f = Bin("*", Num(2.0), f)
    return TwoScaleField(terms=((two_ft, rho1_profile), (two_f, rho1_t)))


# ------------------------------------------------------------- full pipeline

def asymptotic_solution(f: Expr, r: Expr, grid: Grid, n_modes: int,
                        n_harmonics: int = averaging.DEFAULT_HARMONICS
                        ) -> AsymptoticSolution:
    """Run the whole expansion pipeline for a symbolic problem."""
    r0_samples, r1 = split(r, grid.ts, n_harmonics)
    shape = rho0(r1)
    _, r1_t = split(diff(r, "t"), grid.ts, n_harmonics)
    shape_t = rho0(r1_t)  # exact d/dt of the shape: the map commutes with d/dt
    osc1 = rho1(shape)
    osc1_t = rho1(shape_t)
    b = b_constants(shape, f, rho0_t=shape_t)
    fc = time_sine_coeffs(f, n_modes, grid.ts)
    a1, a2 = a_constants(f, n_modes)
    return AsymptoticSolution(
        grid=grid,
        n_modes=n_modes,
        n_harmonics=n_harmonics,
        f=f,
        bconst=b,
        a1=a1,
        a2=a2,
        r0_samples=r0_samples,
        r1=r1,
        rho0=shape,
        rho1=osc1,
        rho0_t=shape_t,
        rho1_t=osc1_t,
        fc=fc,
        u0_coeffs=duhamel_modal(fc, r0_samples),
        u1_coeffs=u1_modal(b, a1, grid.ts),
        u2_coeffs=u2_modal(b, a1, a2, grid.ts),
        v2=build_v2(f, shape),
        v3=build_v3(f, osc1, osc1_t),
    )
