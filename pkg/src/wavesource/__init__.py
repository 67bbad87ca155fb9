"""Two-scale asymptotics and source recovery for the driven 1-D wave
equation.

The package solves ``u_tt = u_xx + f(x,t) r(t, w t)`` with homogeneous
initial and boundary data for large ``w``, builds the second-order
slow/fast approximation of the solution, verifies it against a brute-force
reference solver, and recovers unknown source factors from asymptotic
observation data.
"""

from .averaging import (
    BConstants,
    PeriodicProfile,
    b_constants,
    eval_profile,
    rho0,
    rho1,
    split,
    tau_mean,
)
from .errors import (
    CompatibilityError,
    ConfigError,
    DegenerateModeError,
    DiffError,
    DomainError,
    EnvelopeVanishesError,
    EvalError,
    GridMismatchError,
    HarmonicTailError,
    MathPreconditionError,
    NumericalError,
    ParseError,
    PeriodicityError,
    QuadratureError,
    SelfCheckError,
    SingularDiagonalError,
    TruncationError,
    UnsolvableError,
    WaveSourceError,
)
from .expr import Expr, diff, evaluate, evaluate_array, parse, to_source
from .forward import (
    AsymptoticSolution,
    Grid,
    TwoScaleField,
    assemble,
    asymptotic_solution,
    build_u0,
    build_u1,
    build_u2,
    build_v2,
    build_v3,
    fast_phase,
)
from .inverse import (
    ConsistencyPack,
    Observations,
    RecoveredSource,
    make_observations,
    mode_response,
    recover_f,
    recover_joint,
    recover_r,
    source_callable,
)
from .oracle import ReferenceSolution, solve_reference, sup_error
from .spectral import (
    SineCoeffs,
    TimeSineCoeffs,
    a_constants,
    kernel_R,
    sine_coeffs,
    time_sine_coeffs,
    volterra_kernel,
)
from .volterra import VolterraProblem, solve_second_kind

__version__ = "0.1.0"

__all__ = [
    "AsymptoticSolution",
    "BConstants",
    "CompatibilityError",
    "ConfigError",
    "ConsistencyPack",
    "DegenerateModeError",
    "DiffError",
    "DomainError",
    "EnvelopeVanishesError",
    "EvalError",
    "Expr",
    "Grid",
    "GridMismatchError",
    "HarmonicTailError",
    "MathPreconditionError",
    "NumericalError",
    "Observations",
    "ParseError",
    "PeriodicProfile",
    "PeriodicityError",
    "QuadratureError",
    "RecoveredSource",
    "ReferenceSolution",
    "SelfCheckError",
    "SineCoeffs",
    "SingularDiagonalError",
    "TimeSineCoeffs",
    "TruncationError",
    "TwoScaleField",
    "UnsolvableError",
    "VolterraProblem",
    "WaveSourceError",
    "a_constants",
    "assemble",
    "asymptotic_solution",
    "b_constants",
    "build_u0",
    "build_u1",
    "build_u2",
    "build_v2",
    "build_v3",
    "diff",
    "eval_profile",
    "evaluate",
    "evaluate_array",
    "fast_phase",
    "kernel_R",
    "make_observations",
    "mode_response",
    "parse",
    "recover_f",
    "recover_joint",
    "recover_r",
    "rho0",
    "rho1",
    "sine_coeffs",
    "solve_reference",
    "solve_second_kind",
    "source_callable",
    "split",
    "sup_error",
    "tau_mean",
    "time_sine_coeffs",
    "to_source",
    "volterra_kernel",
]
