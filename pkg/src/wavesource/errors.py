"""Exception taxonomy.

Three broad families map onto the CLI exit codes: configuration problems
(exit 2), violated mathematical preconditions of the solvers (exit 3) and
numerical self-check failures (exit 4).
"""


class WaveSourceError(Exception):
    """Base class for all package errors."""


class ConfigError(WaveSourceError):
    """Invalid or incomplete run configuration."""

    exit_code = 2


class ParseError(ConfigError):
    """Expression syntax error; carries the character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvalError(WaveSourceError):
    """Expression evaluation hit division by zero or a non-finite value."""


class DiffError(WaveSourceError):
    """Derivative not representable in the expression language."""


class MathPreconditionError(WaveSourceError):
    """A hypothesis required by the underlying theory does not hold."""

    exit_code = 3


class PeriodicityError(MathPreconditionError):
    """Supplied oscillating factor is not 2*pi-periodic in tau."""


class EnvelopeVanishesError(MathPreconditionError):
    """Envelope vanishes at the observation point / time."""


class DegenerateModeError(MathPreconditionError):
    """A mode response factor is zero where the solver requires it nonzero."""


class UnsolvableError(MathPreconditionError):
    """Spatial inverse problem inconsistent: data nonzero on a dead mode."""

    def __init__(self, mode: int, value: float):
        super().__init__(
            f"mode {mode} has zero response but psi_{mode} = {value:.3e} != 0"
        )
        self.mode = mode
        self.value = value


class CompatibilityError(MathPreconditionError):
    """Observed data violate the zero initial conditions."""


class SingularDiagonalError(MathPreconditionError):
    """Volterra marching factor 1 + (h/2) K(t,t) is numerically zero."""


class NumericalError(WaveSourceError):
    """A numerical self-check failed."""

    exit_code = 4


class SelfCheckError(NumericalError):
    """Step-halving check of the reference solver exceeded tolerance."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge to the requested tolerance."""


class HarmonicTailError(NumericalError):
    """Harmonic bound K too small: spectral tail is not negligible."""


class TruncationError(NumericalError):
    """Sine-mode truncation of the envelope leaves a visible residual."""


class GridMismatchError(WaveSourceError):
    """Fields to compare were sampled on different grids."""


class DomainError(WaveSourceError):
    """Evaluation requested outside the computational domain."""
