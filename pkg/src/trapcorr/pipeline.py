"""End-to-end orchestration: bootstrap the mean-value point at x0 by
root-finding against a reference integral, integrate its ODE away from
x0 in both directions, and assemble the corrected-integral error curve.

Phases stamp any error they raise ("init", "ode", "curve", "output") so
the front end can report where a run died in one line.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

from . import rk
from .errors import (ConfigError, IoError, NoRootError,
                     SingularDenominatorError, TrapcorrError, root_cause)
from .expr import ExprAST, eval_jet, parse
from .quadrature import reference_integral, trapezium
from .rk import FEHLBERG7, RKTableau
from .xi_ode import (DEFAULT_DEN_GUARD, F_COEFFICIENT, XiProblem, error_term,
                     suggest_shift, unshift_error, xi_rhs)

__all__ = [
    "ProblemSpec", "CurveRow", "ErrorCurve",
    "solve_xi0", "solve_xi_at", "run", "emit_csv", "emit_xi_csv",
]

CSV_HEADER = "x,xi,trapezium,error_term,corrected,reference,residual"

#: subintervals scanned for a sign change of the bootstrap residual
SCAN_INTERVALS = 256

#: bisection stops once the bracket is narrower than this
BISECT_WIDTH = 1e-14


@dataclass(frozen=True)
class ProblemSpec:
    """Everything one corrected-quadrature run needs."""

    f_text: str
    f_ast: ExprAST
    a: float
    b: float
    x0: float
    h: float
    shift: float = 0.0
    ref_tol: float = 1e-13
    root_tol: float = 1e-12
    den_guard: float = DEFAULT_DEN_GUARD
    f_coefficient: float = F_COEFFICIENT
    tableau: RKTableau = FEHLBERG7
    h_min: float | None = None  # reverse sweep stops at a + h_min (default: h)

    def __post_init__(self):
        for name in ("a", "b", "x0", "h", "shift"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ConfigError(f"{name} must be finite, got {v!r}")
        if not self.a < self.b:
            raise ConfigError(f"need a < b, got a={self.a!r}, b={self.b!r}")
        if not (self.a < self.x0 < self.b):
            raise ConfigError(
                f"x0 must lie strictly inside ({self.a!r}, {self.b!r}), got {self.x0!r}")
        if self.h <= 0.0:
            raise ConfigError(f"step size must be positive, got {self.h!r}")
        if self.h > (self.b - self.a) / 10.0:
            raise ConfigError(
                f"step size {self.h!r} exceeds (b - a)/10 = {(self.b - self.a) / 10.0!r}")
        if self.ref_tol <= 0.0:
            raise ConfigError(f"reference tolerance must be positive, got {self.ref_tol!r}")
        if self.root_tol <= 0.0:
            raise ConfigError(f"root tolerance must be positive, got {self.root_tol!r}")
        if self.h_min is not None and self.h_min <= 0.0:
            raise ConfigError(f"h_min must be positive, got {self.h_min!r}")

    @classmethod
    def from_text(cls, f_text: str, a: float, b: float, x0: float | None = None,
                  h: float = 0.01, **kwargs) -> "ProblemSpec":
        if x0 is None:
            x0 = 0.5 * (a + b)
        return cls(f_text=f_text, f_ast=parse(f_text), a=a, b=b, x0=x0, h=h, **kwargs)

    @property
    def problem(self) -> XiProblem:
        return XiProblem(integrand=self.f_ast, a=self.a, shift=self.shift,
                         den_guard=self.den_guard, f_coefficient=self.f_coefficient)


@dataclass(frozen=True)
class CurveRow:
    x: float
    xi: float | None
    trapezium: float
    error_term: float
    corrected: float
    reference: float | None = None
    residual: float | None = None


@dataclass(frozen=True)
class ErrorCurve:
    rows: tuple[CurveRow, ...]
    spec: ProblemSpec
    tableau_id: str
    wall_time: float


# ------------------------------------------------------------ bootstrap

def solve_xi_at(problem: XiProblem, x: float, i_ref: float,
                root_tol: float) -> float:
    """Mean-value point at upper limit ``x`` given the reference integral
    of the (shifted) integrand over [a, x].

    Scans ``SCAN_INTERVALS`` uniform subintervals of (a, x) for a sign
    change of R(xi) = trapezium - (x-a)^3/12 g''(xi) - i_ref and bisects
    the first bracketing one down to ``BISECT_WIDTH``.  When |R| never
    exceeds ``root_tol`` the residual carries no information about xi
    (constant g'' already matching) and the midpoint is returned by
    convention.
    """
    a = problem.a
    w = x - a
    if w <= 0.0:
        raise ConfigError(f"upper limit {x!r} must exceed a={a!r}")
    base = trapezium(problem.g, a, x) - i_ref
    scale = w ** 3 / 12.0

    def res(xi: float) -> float:
        return base - scale * eval_jet(problem.g, xi).d2

    points = [a + w * i / SCAN_INTERVALS for i in range(SCAN_INTERVALS + 1)]
    values = [res(p) for p in points]
    if max(abs(v) for v in values) <= root_tol:
        return a + 0.5 * w
    bracket = None
    for i in range(SCAN_INTERVALS):
        if values[i] == 0.0:
            return points[i]
        if values[i] * values[i + 1] < 0.0:
            bracket = i
            break
    if bracket is None:
        if values[-1] == 0.0:
            return points[-1]
        min_abs = min(abs(v) for v in values)
        at = points[min(range(len(values)), key=lambda i: abs(values[i]))]
        raise NoRootError("no sign change of the bootstrap residual in (a, x0)",
                          min_abs_residual=min_abs, at=at)

    lo, hi = points[bracket], points[bracket + 1]
    r_lo = values[bracket]
    while hi - lo > BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket narrower than float spacing
            break
        r_mid = res(mid)
        if r_mid == 0.0:
            return mid
        if r_lo * r_mid < 0.0:
            hi = mid
        else:
            lo, r_lo = mid, r_mid
    xi0 = 0.5 * (lo + hi)
    achieved = abs(res(xi0))
    if achieved > root_tol:
        raise NoRootError(
            f"bisection converged but the residual {achieved!r} still exceeds "
            f"the root tolerance {root_tol!r}", min_abs_residual=achieved, at=xi0)
    return xi0


def solve_xi0(spec: ProblemSpec) -> float:
    """Bootstrap xi(x0) for ``spec`` against a fresh reference integral."""
    problem = spec.problem
    try:
        i_ref = reference_integral(problem.g, spec.a, spec.x0, spec.ref_tol)
        return solve_xi_at(problem, spec.x0, i_ref.value, spec.root_tol)
    except TrapcorrError as exc:
        exc.phase = exc.phase or "init"
        raise


# ------------------------------------------------------------------ run

def run(spec: ProblemSpec, reference: bool = False,
        residual: bool = False) -> ErrorCurve:
    """Produce the corrected-integral error curve for ``spec``.

    The grid is {a} followed by the reverse-sweep nodes up from a + h_min
    and the forward-sweep nodes from x0 to b.  The row at exactly x = a
    needs no mean-value point: every term carries a (x-a)^3 factor, so
    trapezium, error term and corrected value are all identically zero.

    ``reference`` attaches a reference-integral column (built additively
    from per-panel reference integrals, error budget split by panel
    width); ``residual`` adds corrected - reference and implies
    ``reference``.
    """
    t_start = time.perf_counter()
    reference = reference or residual
    problem = spec.problem
    xi0 = solve_xi0(spec)

    def rhs(x: float, xi: float) -> float:
        return xi_rhs(problem, x, xi)

    h_min = spec.h if spec.h_min is None else spec.h_min
    rev_target = spec.a + h_min
    try:
        forward = rk.integrate(rhs, spec.x0, xi0, spec.b, spec.h, spec.tableau)
        if rev_target < spec.x0:
            reverse = rk.integrate(rhs, spec.x0, xi0, rev_target, spec.h, spec.tableau)
            nodes = list(reversed(reverse.nodes))[:-1] + list(forward.nodes)
        else:
            nodes = list(forward.nodes)
    except TrapcorrError as exc:
        cause = root_cause(exc)
        if isinstance(cause, SingularDenominatorError):
            enriched = cause.with_suggestion(
                suggest_shift(spec.f_ast, spec.a, spec.b))
            enriched.phase = "ode"
            raise enriched from exc
        exc.phase = exc.phase or "ode"
        raise

    try:
        rows = [CurveRow(x=spec.a, xi=None, trapezium=0.0, error_term=0.0,
                         corrected=0.0,
                         reference=0.0 if reference else None,
                         residual=0.0 if residual else None)]
        for x, xi in nodes:
            trap = trapezium(spec.f_ast, spec.a, x)
            err = unshift_error(error_term(problem, x, xi), spec.shift, spec.a, x)
            rows.append(CurveRow(x=x, xi=xi, trapezium=trap, error_term=err,
                                 corrected=trap + err))
        if reference:
            rows = _attach_reference(spec, rows, residual)
    except TrapcorrError as exc:
        exc.phase = exc.phase or "curve"
        raise

    return ErrorCurve(rows=tuple(rows), spec=spec,
                      tableau_id=spec.tableau.name,
                      wall_time=time.perf_counter() - t_start)


def _attach_reference(spec: ProblemSpec, rows: list[CurveRow],
                      residual: bool) -> list[CurveRow]:
    # additive panel-by-panel references: sum of panel tolerances equals
    # ref_tol, so the accumulated estimate honours the requested budget
    span = rows[-1].x - spec.a
    out = [rows[0]]
    acc = 0.0
    prev = rows[0].x
    for row in rows[1:]:
        piece_tol = spec.ref_tol * (row.x - prev) / span
        acc += reference_integral(spec.f_ast, prev, row.x, piece_tol).value
        prev = row.x
        out.append(replace(row, reference=acc,
                           residual=(row.corrected - acc) if residual else None))
    return out


# ------------------------------------------------------------------ CSV

def _field(v: float | None) -> str:
    return "" if v is None else format(v, ".17g")


def _write_text(text: str, destination) -> None:
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {destination!r}: {exc}") from exc


def emit_csv(curve: ErrorCurve, destination) -> None:
    """Write the error curve as CSV (LF endings, 17 significant digits,
    empty fields for absent values).  Byte-identical for equal curves.

    ``destination`` is a path or an open text file.
    """
    if not curve.rows:
        raise ConfigError("cannot emit an empty curve")
    lines = [CSV_HEADER]
    for r in curve.rows:
        lines.append(",".join((
            _field(r.x), _field(r.xi), _field(r.trapezium),
            _field(r.error_term), _field(r.corrected),
            _field(r.reference), _field(r.residual))))
    _write_text("\n".join(lines) + "\n", destination)


def emit_xi_csv(curve: ErrorCurve, destination) -> None:
    """Write only the (x, xi) columns of the curve."""
    if not curve.rows:
        raise ConfigError("cannot emit an empty curve")
    lines = ["x,xi"]
    for r in curve.rows:
        lines.append(f"{_field(r.x)},{_field(r.xi)}")
    _write_text("\n".join(lines) + "\n", destination)
