"""Exception types shared across the package.

Every failure mode a caller may want to branch on gets its own class; the
CLI maps these onto exit codes.  Exceptions carry structured context
(positions, abscissae, partial results) rather than encoding it only in
the message, and may be stamped with the pipeline ``phase`` that raised
them.
"""

from __future__ import annotations


class TrapcorrError(Exception):
    """Base class for all package errors."""

    #: pipeline phase that raised the error ("init", "ode", ...), if known
    phase: str | None = None


class ExpressionError(TrapcorrError):
    """Problem with the integrand expression text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class SyntaxError_(ExpressionError):
    """Malformed expression text."""


class UnknownIdentifierError(ExpressionError):
    """Identifier that is not a supported function or constant."""

    def __init__(self, name: str, position: int):
        super().__init__(f"unknown identifier '{name}'", position)
        self.name = name


class DomainError(TrapcorrError):
    """Evaluation outside the mathematical domain (log of a non-positive
    number, division by zero, sqrt of a negative, and the like)."""

    def __init__(self, message: str, x: float | None = None):
        if x is not None:
            message = f"{message} at x={x!r}"
        super().__init__(message)
        self.x = x


class ConfigError(TrapcorrError):
    """Invalid configuration: bad intervals, tolerances, tableau files,
    violated call preconditions."""


class IoError(TrapcorrError):
    """Reading or writing a file failed."""


class ToleranceError(TrapcorrError):
    """Requested quadrature tolerance not reached within the evaluation
    budget."""

    def __init__(self, message: str, best_estimate: float, achieved: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.achieved = achieved


class SingularDenominatorError(TrapcorrError):
    """The ODE denominator dropped below the guard threshold.

    Carries the location and, once the pipeline has examined the
    integrand, a suggested shift constant that bounds the third
    derivative away from zero.
    """

    def __init__(self, x: float, xi: float, denominator: float,
                 suggested_shift: float | None = None):
        self.x = x
        self.xi = xi
        self.denominator = denominator
        self.suggested_shift = suggested_shift
        super().__init__(self._format())

    def _format(self) -> str:
        msg = (f"denominator {self.denominator!r} below guard "
               f"at x={self.x!r}, xi={self.xi!r}")
        if self.suggested_shift is not None:
            msg += f"; rerun with --shift-D {self.suggested_shift:g}"
        return msg

    def with_suggestion(self, shift: float | None) -> "SingularDenominatorError":
        err = SingularDenominatorError(self.x, self.xi, self.denominator, shift)
        err.phase = self.phase
        return err


class NoRootError(TrapcorrError):
    """Initialization could not bracket a root of the residual."""

    def __init__(self, message: str, min_abs_residual: float, at: float):
        super().__init__(
            f"{message}: min |R| = {min_abs_residual!r} at xi={at!r}")
        self.min_abs_residual = min_abs_residual
        self.at = at


class IntegrationAbort(TrapcorrError):
    """An RK stage evaluation failed mid-trajectory.

    ``stage_x`` is the abscissa of the failing stage, ``partial`` the
    trajectory accumulated before the failure (filled by ``integrate``),
    ``cause`` the underlying error.
    """

    def __init__(self, stage_x: float, cause: TrapcorrError, partial=None):
        super().__init__(f"rhs evaluation failed at stage x={stage_x!r}: {cause}")
        self.stage_x = stage_x
        self.cause = cause
        self.partial = partial


def root_cause(err: TrapcorrError) -> TrapcorrError:
    """Innermost package error behind possibly-wrapped ``err``."""
    while isinstance(err, IntegrationAbort):
        err = err.cause
    return err
