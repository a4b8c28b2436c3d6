"""Trapezium quadrature with a variable upper limit, plus a high-accuracy
reference integral used to bootstrap and audit the corrected pipeline.

The reference oracle is Richardson extrapolation over composite-trapezium
rows at doubling panel counts (a Romberg table), terminating when two
successive diagonal entries agree within the requested tolerance.  An
evaluation budget distinguishes "tolerance unreachable in double
precision" from an unbounded loop.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, ToleranceError
from .expr import ExprAST, eval_value

__all__ = ["ReferenceResult", "trapezium", "composite_trapezium", "reference_integral"]

DEFAULT_MAX_EVALS = 2 ** 22


@dataclass(frozen=True)
class ReferenceResult:
    """Reference integral with its internal error estimate.

    ``panels`` counts integrand evaluations spent on the estimate.
    """

    value: float
    est_error: float
    panels: int


def trapezium(f: ExprAST, a: float, x: float) -> float:
    """One-panel trapezium value (x-a)/2 * (f(a) + f(x))."""
    return 0.5 * (x - a) * (eval_value(f, a) + eval_value(f, x))


def composite_trapezium(f: ExprAST, a: float, b: float, n: int) -> float:
    """Composite trapezium sum on ``n`` uniform panels over [a, b]."""
    if n < 1:
        raise ConfigError(f"panel count must be >= 1, got {n}")
    if b < a:
        raise ConfigError(f"reversed limits: a={a!r} > b={b!r}")
    if b == a:
        return 0.0
    h = (b - a) / n
    total = 0.5 * (eval_value(f, a) + eval_value(f, b))
    for i in range(1, n):
        total += eval_value(f, a + i * h)
    return h * total


def reference_integral(f: ExprAST, a: float, x: float, tol: float,
                       max_evals: int = DEFAULT_MAX_EVALS) -> ReferenceResult:
    """Integral of ``f`` over [a, x] to absolute tolerance ``tol``.

    Deterministic for fixed inputs.  Raises :class:`ToleranceError` when
    the diagonal entries stop improving before reaching ``tol`` within
    the evaluation budget, and :class:`ConfigError` for a non-positive
    tolerance or reversed limits.
    """
    if tol <= 0.0:
        raise ConfigError(f"tolerance must be positive, got {tol!r}")
    if x < a:
        raise ConfigError(f"reversed limits: a={a!r} > x={x!r}")
    if x == a:
        return ReferenceResult(0.0, 0.0, 0)

    h = x - a
    prev_row = [0.5 * h * (eval_value(f, a) + eval_value(f, x))]
    evals = 2
    n = 1
    best = prev_row[0]
    best_est = float("inf")
    k = 0
    while evals + n <= max_evals:  # next refinement adds n midpoints
        k += 1
        n *= 2
        h *= 0.5
        mid_sum = 0.0
        for i in range(1, n // 2 + 1):
            mid_sum += eval_value(f, a + (2 * i - 1) * h)
        evals += n // 2
        row = [0.5 * prev_row[0] + h * mid_sum]
        for j in range(1, k + 1):
            row.append(row[j - 1] + (row[j - 1] - prev_row[j - 1]) / (4.0 ** j - 1.0))
        # first diagonal agreement can be accidental; require two levels
        if k >= 2:
            est = abs(row[k] - prev_row[k - 1])
            if est <= tol:
                return ReferenceResult(row[k], est, evals)
            if est < best_est:
                best, best_est = row[k], est
        prev_row = row
    raise ToleranceError(
        f"tolerance {tol!r} not reached within {max_evals} evaluations",
        best_estimate=best, achieved=best_est)
