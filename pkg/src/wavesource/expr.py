"""Expression language for problem definitions.

A small scalar language over the variables ``x``, ``t``, ``tau`` with the
constant ``pi``, the operators ``+ - * / ^`` (usual precedence, ``^``
right-associative and binding tighter than unary minus) and the functions
``sin``, ``cos``, ``exp``.  Source text is parsed into immutable trees that
support exact symbolic differentiation and vectorised evaluation, so all
derivatives required by the solvers are free of finite-difference noise.

Trees are frozen dataclasses: structural equality is ``==``, printing via
:func:`to_source` round-trips through :func:`parse` to an identical tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DiffError, EvalError, ParseError

VARIABLES = ("x", "t", "tau")
FUNCTIONS = ("sin", "cos", "exp")

ArrayLike = Union[float, np.ndarray]


class Expr:
    """Base class of all expression nodes."""

    def __str__(self) -> str:
        return to_source(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float  # always >= 0; negative literals are Neg(Num(...))


@dataclass(frozen=True)
class Const(Expr):
    name: str  # only "pi"


@dataclass(frozen=True)
class Var(Expr):
    name: str  # one of VARIABLES


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Bin(Expr):
    op: str  # one of + - * / ^
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str  # one of FUNCTIONS
    arg: Expr


# ----------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "name" | "op" | "end"
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(source)
    while i < n:
        if source[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise ParseError(f"unexpected character {source[i]!r}", i)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(), i))
        i = m.end()
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            self.advance()
            return
        if tok.kind == "end":
            raise ParseError(f"expected {op!r} but input ended", tok.pos)
        raise ParseError(f"expected {op!r} but found {tok.text!r}", tok.pos)

    # expr := term (('+'|'-') term)*
    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = Bin(op, node, self.term())
        return node

    # term := unary (('*'|'/') unary)*
    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = Bin(op, node, self.unary())
        return node

    # unary := '-' unary | power
    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    # power := atom ('^' unary)?   (right associative, exponent may be signed)
    def power(self) -> Expr:
        node = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            node = Bin("^", node, self.unary())
        return node

    def atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "name":
            if tok.text == "pi":
                return Const("pi")
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(tok.text, arg)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if tok.kind == "end":
            raise ParseError("unexpected end of input", tok.pos)
        raise ParseError(f"unexpected token {tok.text!r}", tok.pos)


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree.

    Raises :class:`ParseError` (with character position) on syntax errors,
    unknown identifiers and unbalanced parentheses.
    """
    if not source or not source.strip():
        raise ParseError("empty expression", 0)
    parser = _Parser(_tokenize(source))
    node = parser.expr()
    tok = parser.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected token {tok.text!r}", tok.pos)
    return node


# ---------------------------------------------------------------- printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(e: Expr) -> int:
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def to_source(e: Expr) -> str:
    """Render ``e`` as source text; ``parse(to_source(e)) == e``."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    if isinstance(e, Neg):
        inner = to_source(e.arg)
        if _prec(e.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Bin):
        lp, rp = _prec(e.left), _prec(e.right)
        left = to_source(e.left)
        right = to_source(e.right)
        if e.op == "^":
            # right associative; parenthesise left at equal precedence
            if lp <= _PREC["^"]:
                left = f"({left})"
            if rp < _PREC["^"]:
                right = f"({right})"
        else:
            if lp < _PREC[e.op]:
                left = f"({left})"
            # left associative: equal precedence on the right needs parens
            if rp <= _PREC[e.op]:
                right = f"({right})"
        return f"{left}{e.op}{right}"
    raise TypeError(f"not an expression node: {e!r}")


# -------------------------------------------------------------- evaluation

def evaluate(e: Expr, x: ArrayLike = 0.0, t: ArrayLike = 0.0,
             tau: ArrayLike = 0.0) -> ArrayLike:
    """Evaluate ``e`` with numpy broadcasting over the variable bindings.

    Returns a float for scalar bindings, an ndarray otherwise.  Raises
    :class:`EvalError` on division by zero or any non-finite intermediate.
    """
    env = {
        "x": np.asarray(x, dtype=np.float64),
        "t": np.asarray(t, dtype=np.float64),
        "tau": np.asarray(tau, dtype=np.float64),
    }
    with np.errstate(divide="raise", invalid="raise", over="raise"):
        try:
            val = _eval(e, env)
        except FloatingPointError as exc:
            raise EvalError(f"evaluation failed: {exc}") from None
    arr = np.asarray(val)
    if not np.all(np.isfinite(arr)):
        raise EvalError("non-finite intermediate value")
    if arr.ndim == 0 and all(v.ndim == 0 for v in env.values()):
        return float(arr)
    return arr


def evaluate_array(e: Expr, x: ArrayLike = 0.0, t: ArrayLike = 0.0,
                   tau: ArrayLike = 0.0) -> np.ndarray:
    """Like :func:`evaluate` but always returns the fully broadcast array.

    Needed because constant expressions evaluate to 0-d results regardless
    of the binding shapes.
    """
    shape = np.broadcast_shapes(
        np.shape(x), np.shape(t), np.shape(tau))
    val = np.asarray(evaluate(e, x=x, t=t, tau=tau), dtype=np.float64)
    return np.array(np.broadcast_to(val, shape))


def _eval(e: Expr, env: dict) -> np.ndarray:
    if isinstance(e, Num):
        return np.float64(e.value)
    if isinstance(e, Const):
        return np.float64(np.pi)
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Neg):
        return np.negative(_eval(e.arg, env))
    if isinstance(e, Call):
        arg = _eval(e.arg, env)
        if e.func == "sin":
            return np.sin(arg)
        if e.func == "cos":
            return np.cos(arg)
        return np.exp(arg)
    if isinstance(e, Bin):
        a = _eval(e.left, env)
        b = _eval(e.right, env)
        if e.op == "+":
            return np.add(a, b)
        if e.op == "-":
            return np.subtract(a, b)
        if e.op == "*":
            return np.multiply(a, b)
        if e.op == "/":
            return np.divide(a, b)
        return np.power(a, b)
    raise TypeError(f"not an expression node: {e!r}")


# ----------------------------------------------------------- differentiation

def contains_var(e: Expr, var: str) -> bool:
    if isinstance(e, Var):
        return e.name == var
    if isinstance(e, Neg):
        return contains_var(e.arg, var)
    if isinstance(e, Call):
        return contains_var(e.arg, var)
    if isinstance(e, Bin):
        return contains_var(e.left, var) or contains_var(e.right, var)
    return False


def _is_zero(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 0.0


def _is_one(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 1.0


def _add(a: Expr, b: Expr) -> Expr:
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    return Bin("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_zero(b):
        return a
    if isinstance(a, Num) and isinstance(b, Num) and a.value >= b.value:
        return Num(a.value - b.value)
    if _is_zero(a):
        return Neg(b)
    return Bin("-", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_zero(a) or _is_zero(b):
        return Num(0.0)
    if _is_one(a):
        return b
    if _is_one(b):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return Bin("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_zero(a):
        return Num(0.0)
    if _is_one(b):
        return a
    return Bin("/", a, b)


def diff(e: Expr, var: str) -> Expr:
    """Exact symbolic derivative of ``e`` with respect to ``var``.

    ``var`` must be one of ``x``, ``t``, ``tau``.  Powers ``u^v`` are
    supported when the exponent does not depend on ``var`` (the function set
    has no logarithm, so a variable exponent has no closed-form derivative
    here); the catalog of admissible problem data never needs one.
    """
    if var not in VARIABLES:
        raise DiffError(f"unknown variable {var!r}")
    return _diff(e, var)


def _diff(e: Expr, var: str) -> Expr:
    if isinstance(e, (Num, Const)):
        return Num(0.0)
    if isinstance(e, Var):
        return Num(1.0) if e.name == var else Num(0.0)
    if isinstance(e, Neg):
        d = _diff(e.arg, var)
        return Num(0.0) if _is_zero(d) else Neg(d)
    if isinstance(e, Call):
        du = _diff(e.arg, var)
        if e.func == "sin":
            outer: Expr = Call("cos", e.arg)
        elif e.func == "cos":
            outer = Neg(Call("sin", e.arg))
        else:
            outer = Call("exp", e.arg)
        return _mul(outer, du)
    if isinstance(e, Bin):
        a, b = e.left, e.right
        da, db = _diff(a, var), _diff(b, var)
        if e.op == "+":
            return _add(da, db)
        if e.op == "-":
            return _sub(da, db)
        if e.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if e.op == "/":
            num = _sub(_mul(da, b), _mul(a, db))
            return _div(num, Bin("^", b, Num(2.0)))
        # power: exponent must not depend on var
        if contains_var(b, var):
            raise DiffError(
                f"cannot differentiate power with exponent depending on {var!r}")
        if _is_zero(da):
            return Num(0.0)
        if isinstance(b, Num):
            new_exp: Expr = Num(b.value - 1.0) if b.value >= 1.0 \
                else _sub(Num(b.value), Num(1.0))
        else:
            new_exp = Bin("-", b, Num(1.0))
        powered = a if _is_one(new_exp) else Bin("^", a, new_exp)
        return _mul(_mul(b, powered), da)
    raise TypeError(f"not an expression node: {e!r}")
