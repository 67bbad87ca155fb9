"""Fast-variable machinery.

Everything that acts in the ``tau`` direction lives here: period means, the
split of the oscillating factor into its mean and zero-mean parts, the two
repeated zero-mean antiderivatives of the zero-mean part, and the scalar
constants those antiderivatives generate at the time origin.

Periodic objects are represented by finite Fourier coefficient vectors
computed with the uniform trapezoid rule, which is exact for band-limited
integrands.  The nested mean-subtracted antiderivatives then become exact
algebraic maps on the coefficients (``c_k -> -c_k / k**2`` for the double
antiderivative), so no cumulative quadrature error is incurred.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, HarmonicTailError, PeriodicityError
from .expr import Expr, diff, evaluate_array

DEFAULT_HARMONICS = 32
TWO_PI = 2.0 * np.pi

PERIODICITY_TOL = 1e-9
TAIL_TOL = 1e-10


def tau_nodes(n_harmonics: int) -> np.ndarray:
    """Uniform quadrature nodes on [0, 2*pi).

    ``2*n_harmonics + 2`` nodes make the rectangle (= periodic trapezoid)
    rule alias-free for integrands band-limited to ``n_harmonics``.
    """
    q = 2 * n_harmonics + 2
    return np.arange(q) * (TWO_PI / q)


@dataclass(frozen=True)
class PeriodicProfile:
    """2*pi-periodic, zero-mean function of tau with time-dependent
    coefficients.

    ``coeffs[j, k-1]`` is the complex Fourier coefficient of harmonic
    ``e^{i k tau}`` at time ``ts[j]`` for ``k = 1..K``; negative harmonics
    are the conjugates (the profile is real) and the mean is zero by
    construction.  Between grid times coefficients interpolate linearly.
    """

    ts: np.ndarray        # (M+1,) time grid, ts[0] == 0
    coeffs: np.ndarray    # (M+1, K) complex

    @property
    def n_harmonics(self) -> int:
        return self.coeffs.shape[1]

    @classmethod
    def zero(cls, ts: np.ndarray, n_harmonics: int) -> "PeriodicProfile":
        return cls(np.asarray(ts, float),
                   np.zeros((len(ts), n_harmonics), complex))

    def coeffs_at(self, t) -> np.ndarray:
        """Coefficients linearly interpolated in time; shape (..., K)."""
        t_arr = np.asarray(t, dtype=np.float64)
        lo, hi = self.ts[0], self.ts[-1]
        if np.any(t_arr < lo - 1e-12) or np.any(t_arr > hi + 1e-12):
            raise DomainError(
                f"time {t} outside profile range [{lo}, {hi}]")
        out = np.empty(t_arr.shape + (self.n_harmonics,), dtype=complex)
        for k in range(self.n_harmonics):
            out[..., k] = (
                np.interp(t_arr, self.ts, self.coeffs[:, k].real)
                + 1j * np.interp(t_arr, self.ts, self.coeffs[:, k].imag))
        return out

    def eval(self, t, tau):
        """Profile value(s) at ``(t, tau)``; broadcasts over arrays."""
        t_arr = np.asarray(t, dtype=np.float64)
        tau_arr = np.asarray(tau, dtype=np.float64)
        shape = np.broadcast_shapes(t_arr.shape, tau_arr.shape)
        c = self.coeffs_at(np.broadcast_to(t_arr, shape))
        k = np.arange(1, self.n_harmonics + 1)
        phase = np.exp(1j * np.multiply.outer(
            np.broadcast_to(tau_arr, shape), k))
        # summing c_k e^{ik tau} + conj pairs: imaginary parts cancel exactly
        val = 2.0 * np.real(np.sum(c * phase, axis=-1))
        if np.ndim(t) == 0 and np.ndim(tau) == 0:
            return float(val)
        return val

    def map_coeffs(self, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
                   ) -> "PeriodicProfile":
        """New profile with coefficients ``fn(k, c_k)`` (k is 1..K)."""
        k = np.arange(1, self.n_harmonics + 1)
        return replace(self, coeffs=fn(k, self.coeffs.copy()))

    def tau_derivative(self, order: int = 1) -> "PeriodicProfile":
        return self.map_coeffs(lambda k, c: c * (1j * k) ** order)

    def time_derivative(self) -> "PeriodicProfile":
        """Coefficient-wise d/dt by O(h^2) finite differences."""
        c = self.coeffs
        ts = self.ts
        if len(ts) < 3:
            raise DomainError("time grid too short to differentiate")
        h = ts[1] - ts[0]
        out = np.empty_like(c)
        out[1:-1] = (c[2:] - c[:-2]) / (2.0 * h)
        out[0] = (-3.0 * c[0] + 4.0 * c[1] - c[2]) / (2.0 * h)
        out[-1] = (3.0 * c[-1] - 4.0 * c[-2] + c[-3]) / (2.0 * h)
        return replace(self, coeffs=out)

    def scale_by(self, samples: np.ndarray) -> "PeriodicProfile":
        """Multiply by a real function of t sampled on the profile grid."""
        s = np.asarray(samples, dtype=np.float64)
        if s.shape != self.ts.shape:
            raise DomainError("envelope samples do not match the time grid")
        return replace(self, coeffs=self.coeffs * s[:, None])

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0


def _check_periodicity(r: Expr, ts: np.ndarray) -> None:
    at_zero = evaluate_array(r, t=ts, tau=0.0)
    at_period = evaluate_array(r, t=ts, tau=TWO_PI)
    gap = float(np.max(np.abs(at_zero - at_period)))
    if gap > PERIODICITY_TOL:
        raise PeriodicityError(
            f"|r(t,0) - r(t,2pi)| = {gap:.3e} exceeds {PERIODICITY_TOL:.0e}")


def tau_mean(r: Expr, t: float, n_harmonics: int = DEFAULT_HARMONICS) -> float:
    """Average of ``r(t, .)`` over one period of the fast variable."""
    _check_periodicity(r, np.asarray([t], dtype=float))
    nodes = tau_nodes(n_harmonics)
    vals = evaluate_array(r, t=float(t), tau=nodes)
    return float(np.mean(vals))


def split(r: Expr, ts: np.ndarray,
          n_harmonics: int = DEFAULT_HARMONICS
          ) -> tuple[np.ndarray, PeriodicProfile]:
    """Split ``r`` into its tau-mean (sampled on ``ts``) and zero-mean part.

    The zero-mean part comes back as a :class:`PeriodicProfile`; its
    harmonic-``K`` coefficient must be negligible relative to the largest
    one, otherwise the harmonic bound is too small and
    :class:`HarmonicTailError` is raised.
    """
    ts = np.asarray(ts, dtype=np.float64)
    _check_periodicity(r, ts)
    nodes = tau_nodes(n_harmonics)
    vals = evaluate_array(r, t=ts[:, None], tau=nodes[None, :])
    spectrum = np.fft.rfft(vals, axis=1) / len(nodes)
    r0 = spectrum[:, 0].real.copy()
    coeffs = spectrum[:, 1:n_harmonics + 1].copy()
    top = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
    # a profile that is pure roundoff relative to the sampled values has no
    # meaningful tail to check
    scale = max(1.0, float(np.max(np.abs(vals))))
    if top > 1e-13 * scale:
        tail = float(np.max(np.abs(coeffs[:, -1])))
        if tail > TAIL_TOL * top:
            raise HarmonicTailError(
                f"harmonic bound K={n_harmonics} too small: "
                f"|c_K| = {tail:.3e} vs max |c_k| = {top:.3e}")
    return r0, PeriodicProfile(ts, coeffs)


def rho0(r1: PeriodicProfile) -> PeriodicProfile:
    """Double zero-mean antiderivative in tau of a zero-mean profile.

    Closed form on coefficients: ``c_k -> -c_k / k**2``.  The result is the
    oscillation shape whose second tau-derivative reproduces ``r1``.
    """
    return r1.map_coeffs(lambda k, c: -c / k.astype(float) ** 2)


def rho1(p: PeriodicProfile) -> PeriodicProfile:
    """Zero-mean antiderivative in tau with the mean-first sign convention
    (mean of the running integral minus the running integral):
    ``d_k -> -d_k / (i k)``."""
    return p.map_coeffs(lambda k, c: -c / (1j * k.astype(float)))


def eval_profile(p: PeriodicProfile, t, tau):
    """Evaluate a profile at ``(t, tau)``; thin wrapper over ``p.eval``."""
    return p.eval(t, tau)


@dataclass(frozen=True)
class BConstants:
    """Origin values of the oscillation shape and derived envelope factor.

    ``b0``/``b1`` are the shape and its tau-slope at ``t = tau = 0``; ``b3``
    is its time-slope there.  ``b2`` combines ``b0`` and ``b1`` with the
    envelope: ``b2(x) = b0 f_t(x,0) + b1 f(x,0)``.
    """

    b0: float
    b1: float
    b2: Callable[[np.ndarray], np.ndarray]
    b3: float
    rho0: PeriodicProfile


def b_constants(rho0_profile: PeriodicProfile, f: Expr,
                rho0_t: Optional[PeriodicProfile] = None) -> BConstants:
    """Constants generated by the oscillation shape at the origin.

    ``rho0_t`` may supply the exact time derivative of the shape (available
    when the source was symbolic); otherwise a finite-difference fallback on
    the coefficient grid is used.
    """
    b0 = rho0_profile.eval(0.0, 0.0)
    b1 = rho0_profile.tau_derivative().eval(0.0, 0.0)
    if rho0_t is None:
        rho0_t = rho0_profile.time_derivative()
    b3 = rho0_t.eval(0.0, 0.0)
    f_t = diff(f, "t")

    def b2(xs):
        return b0 * evaluate_array(f_t, x=xs, t=0.0) \
            + b1 * evaluate_array(f, x=xs, t=0.0)

    return BConstants(b0=b0, b1=b1, b2=b2, b3=b3, rho0=rho0_profile)
