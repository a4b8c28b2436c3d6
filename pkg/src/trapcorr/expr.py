"""Integrand expressions: parsing and order-3 Taylor-jet evaluation.

The grammar is a small calculator language over the single variable ``x``:

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := base ("^" factor)?
    base   := NUMBER | "x" | "pi" | "e" | IDENT "(" expr ")" | "(" expr ")" | "-" base
    IDENT  := sin | cos | tan | exp | ln | log10 | sqrt

Whitespace is insignificant, input must be ASCII, and there is no
implicit multiplication ("2x" is a syntax error).  ``^`` binds right and
tighter than unary minus inside its left operand, exactly as the grammar
above reads: ``-x^2`` parses as ``(-x)^2``.

Evaluation returns a :class:`Jet3` — the value and first three
derivatives at a point — propagated node by node through the sum,
product, quotient and chain rules.  Jets are exact to rounding; nothing
here differentiates numerically or symbolically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import DomainError, SyntaxError_, UnknownIdentifierError

__all__ = [
    "Jet3", "Num", "Var", "Const", "Neg", "BinOp", "Call", "ExprAST",
    "parse", "eval_jet", "eval_value", "contains_var", "shift_by_cubic",
]

FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "log10", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}


# ----------------------------------------------------------------- AST

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    """The single free variable x."""


@dataclass(frozen=True)
class Const:
    name: str  # "pi" or "e"


@dataclass(frozen=True)
class Neg:
    arg: "ExprAST"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "ExprAST"
    right: "ExprAST"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "ExprAST"


ExprAST = Union[Num, Var, Const, Neg, BinOp, Call]


def contains_var(node: ExprAST) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Num, Const)):
        return False
    if isinstance(node, Neg):
        return contains_var(node.arg)
    if isinstance(node, Call):
        return contains_var(node.arg)
    return contains_var(node.left) or contains_var(node.right)


def shift_by_cubic(node: ExprAST, d: float) -> ExprAST:
    """Structural AST for ``node + d*x^3/6`` (identity when d == 0)."""
    if d == 0.0:
        return node
    cubic = BinOp("/", BinOp("*", Num(d), BinOp("^", Var(), Num(3.0))), Num(6.0))
    return BinOp("+", node, cubic)


# ----------------------------------------------------------------- parser

_TOKEN_RE = re.compile(r"""
    (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


class _Parser:
    """Recursive-descent parser over a token stream with one-token
    lookahead.  Token positions are character offsets into the input."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = self._tokenize(text)
        self.i = 0

    @staticmethod
    def _tokenize(text: str):
        tokens = []
        pos = 0
        n = len(text)
        while pos < n:
            ch = text[pos]
            if ch.isspace():
                pos += 1
                continue
            if ord(ch) > 127:
                raise SyntaxError_(f"non-ASCII character {ch!r}", pos)
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise SyntaxError_(f"unexpected character {ch!r}", pos)
            kind = m.lastgroup
            tokens.append((kind, m.group(), pos))
            pos = m.end()
        tokens.append(("eof", "", n))
        return tokens

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise SyntaxError_(f"expected '{op}'", pos)
        return self.advance()

    # grammar productions ------------------------------------------

    def parse(self) -> ExprAST:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "eof":
            raise SyntaxError_(f"unexpected {text!r} after expression", pos)
        return node

    def expr(self) -> ExprAST:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> ExprAST:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.factor())
            else:
                return node

    def factor(self) -> ExprAST:
        node = self.base()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            exponent = self.factor()
            # jets of u^v with both operands depending on x would need
            # the exp(v ln u) rewrite unconditionally; the grammar only
            # admits a constant exponent over a non-constant base
            if contains_var(node) and contains_var(exponent):
                raise SyntaxError_(
                    "exponent must be constant when the base depends on x", pos)
            node = BinOp("^", node, exponent)
        return node

    def base(self) -> ExprAST:
        kind, text, pos = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "x":
                return Var()
            if text in CONSTANTS:
                return Const(text)
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            raise UnknownIdentifierError(text, pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "op" and text == "-":
            return Neg(self.base())
        raise SyntaxError_(f"unexpected {text!r}" if text else "unexpected end of input", pos)


def parse(text: str) -> ExprAST:
    """Parse expression ``text`` into an AST.

    Raises :class:`SyntaxError_` (with character offset) on malformed
    input and :class:`UnknownIdentifierError` for names outside the
    supported function/constant set.  Parsing is deterministic: equal
    text yields equal trees.
    """
    if not text or not text.strip():
        raise SyntaxError_("empty expression", 0)
    return _Parser(text).parse()


# ----------------------------------------------------------------- jets

@dataclass(frozen=True)
class Jet3:
    """Value and first three derivatives of a scalar function at a point."""

    d0: float
    d1: float
    d2: float
    d3: float


_CONST_JET_D = (0.0, 0.0, 0.0)


def _jet_mul(u: Jet3, v: Jet3) -> Jet3:
    # Leibniz rule with binomial weights
    return Jet3(
        u.d0 * v.d0,
        u.d1 * v.d0 + u.d0 * v.d1,
        u.d2 * v.d0 + 2.0 * u.d1 * v.d1 + u.d0 * v.d2,
        u.d3 * v.d0 + 3.0 * u.d2 * v.d1 + 3.0 * u.d1 * v.d2 + u.d0 * v.d3,
    )


def _jet_div(u: Jet3, v: Jet3, x: float) -> Jet3:
    if v.d0 == 0.0:
        raise DomainError("division by zero", x)
    w0 = u.d0 / v.d0
    w1 = (u.d1 - w0 * v.d1) / v.d0
    w2 = (u.d2 - w0 * v.d2 - 2.0 * w1 * v.d1) / v.d0
    w3 = (u.d3 - w0 * v.d3 - 3.0 * w1 * v.d2 - 3.0 * w2 * v.d1) / v.d0
    return Jet3(w0, w1, w2, w3)


def _compose(g0: float, g1: float, g2: float, g3: float, u: Jet3) -> Jet3:
    # Faa di Bruno through order 3
    return Jet3(
        g0,
        g1 * u.d1,
        g2 * u.d1 * u.d1 + g1 * u.d2,
        g3 * u.d1 ** 3 + 3.0 * g2 * u.d1 * u.d2 + g1 * u.d3,
    )


def _pow_const(u: Jet3, r: float, x: float) -> Jet3:
    """Jet of u ** r for constant exponent r."""
    if r == 0.0:
        return Jet3(1.0, *_CONST_JET_D)
    u0 = u.d0
    r_is_int = r == int(r)
    if u0 < 0.0 and not r_is_int:
        raise DomainError(f"negative base {u0!r} with non-integer exponent {r!r}", x)
    if u0 == 0.0 and r < 0.0:
        raise DomainError(f"zero base with negative exponent {r!r}", x)
    coeffs = [1.0, r, r * (r - 1.0), r * (r - 1.0) * (r - 2.0)]
    outer = []
    for k, ck in enumerate(coeffs):
        if ck == 0.0:
            outer.append(0.0)
            continue
        if u0 == 0.0 and r - k < 0.0:
            raise DomainError(
                f"derivative of order {k} of u^{r!r} undefined at u=0", x)
        outer.append(ck * math.pow(u0, r - k))
    return _compose(outer[0], outer[1], outer[2], outer[3], u)


def _call_jet(func: str, u: Jet3, x: float) -> Jet3:
    u0 = u.d0
    if func == "sin":
        s, c = math.sin(u0), math.cos(u0)
        return _compose(s, c, -s, -c, u)
    if func == "cos":
        s, c = math.sin(u0), math.cos(u0)
        return _compose(c, -s, -c, s, u)
    if func == "tan":
        t = math.tan(u0)
        g1 = 1.0 + t * t
        return _compose(t, g1, 2.0 * t * g1, 2.0 * g1 * (1.0 + 3.0 * t * t), u)
    if func == "exp":
        g = math.exp(u0)
        return _compose(g, g, g, g, u)
    if func == "ln":
        if u0 <= 0.0:
            raise DomainError(f"ln of non-positive value {u0!r}", x)
        iu = 1.0 / u0
        return _compose(math.log(u0), iu, -iu * iu, 2.0 * iu ** 3, u)
    if func == "log10":
        if u0 <= 0.0:
            raise DomainError(f"log10 of non-positive value {u0!r}", x)
        iu = 1.0 / (u0 * math.log(10.0))
        return _compose(math.log10(u0), iu, -iu / u0, 2.0 * iu / (u0 * u0), u)
    if func == "sqrt":
        # jets need u > 0: the derivative is already infinite at u = 0
        if u0 <= 0.0:
            raise DomainError(f"sqrt jet undefined for value {u0!r}", x)
        s = math.sqrt(u0)
        g1 = 0.5 / s
        return _compose(s, g1, -0.5 * g1 / u0, 0.75 * g1 / (u0 * u0), u)
    raise AssertionError(f"unhandled function {func}")


def _eval_jet(node: ExprAST, x: float) -> Jet3:
    if isinstance(node, Num):
        return Jet3(node.value, *_CONST_JET_D)
    if isinstance(node, Var):
        return Jet3(x, 1.0, 0.0, 0.0)
    if isinstance(node, Const):
        return Jet3(CONSTANTS[node.name], *_CONST_JET_D)
    if isinstance(node, Neg):
        u = _eval_jet(node.arg, x)
        return Jet3(-u.d0, -u.d1, -u.d2, -u.d3)
    if isinstance(node, Call):
        return _call_jet(node.func, _eval_jet(node.arg, x), x)
    u = _eval_jet(node.left, x)
    if node.op == "+":
        v = _eval_jet(node.right, x)
        return Jet3(u.d0 + v.d0, u.d1 + v.d1, u.d2 + v.d2, u.d3 + v.d3)
    if node.op == "-":
        v = _eval_jet(node.right, x)
        return Jet3(u.d0 - v.d0, u.d1 - v.d1, u.d2 - v.d2, u.d3 - v.d3)
    if node.op == "*":
        return _jet_mul(u, _eval_jet(node.right, x))
    if node.op == "/":
        return _jet_div(u, _eval_jet(node.right, x), x)
    # node.op == "^"
    if not contains_var(node.right):
        return _pow_const(u, eval_value(node.right, x), x)
    # constant base, exponent depends on x: rewrite as exp(v ln base)
    if u.d0 <= 0.0:
        raise DomainError(
            f"base {u.d0!r} must be positive for a non-constant exponent", x)
    v = _eval_jet(node.right, x)
    ln_b = math.log(u.d0)
    return _call_jet("exp", Jet3(v.d0 * ln_b, v.d1 * ln_b, v.d2 * ln_b, v.d3 * ln_b), x)


def eval_jet(ast: ExprAST, x: float) -> Jet3:
    """Evaluate ``ast`` and its first three derivatives at ``x``.

    Raises :class:`DomainError` when the point is outside the
    expression's domain or any component fails to be finite.
    """
    try:
        jet = _eval_jet(ast, x)
    except OverflowError as exc:
        raise DomainError(f"overflow: {exc}", x) from exc
    if not (math.isfinite(jet.d0) and math.isfinite(jet.d1)
            and math.isfinite(jet.d2) and math.isfinite(jet.d3)):
        raise DomainError("non-finite jet component", x)
    return jet


# ------------------------------------------------------------ value only

def _eval_value(node: ExprAST, x: float) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -_eval_value(node.arg, x)
    if isinstance(node, Call):
        u = _eval_value(node.arg, x)
        if node.func in ("ln", "log10") and u <= 0.0:
            raise DomainError(f"{node.func} of non-positive value {u!r}", x)
        if node.func == "sqrt" and u < 0.0:
            raise DomainError(f"sqrt of negative value {u!r}", x)
        fn = {"sin": math.sin, "cos": math.cos, "tan": math.tan,
              "exp": math.exp, "ln": math.log, "log10": math.log10,
              "sqrt": math.sqrt}[node.func]
        return fn(u)
    u = _eval_value(node.left, x)
    if node.op == "+":
        return u + _eval_value(node.right, x)
    if node.op == "-":
        return u - _eval_value(node.right, x)
    if node.op == "*":
        return u * _eval_value(node.right, x)
    if node.op == "/":
        v = _eval_value(node.right, x)
        if v == 0.0:
            raise DomainError("division by zero", x)
        return u / v
    r = _eval_value(node.right, x)
    if u < 0.0 and r != int(r):
        raise DomainError(f"negative base {u!r} with non-integer exponent {r!r}", x)
    if u == 0.0 and r < 0.0:
        raise DomainError(f"zero base with negative exponent {r!r}", x)
    return math.pow(u, r)


def eval_value(ast: ExprAST, x: float) -> float:
    """Evaluate just the value of ``ast`` at ``x`` (cheaper than a jet;
    quadrature uses this on every node)."""
    try:
        v = _eval_value(ast, x)
    except OverflowError as exc:
        raise DomainError(f"overflow: {exc}", x) from exc
    if not math.isfinite(v):
        raise DomainError("non-finite value", x)
    return v
