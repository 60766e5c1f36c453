"""User-supplied functions of one variable: parsing, printing, evaluation and
symbolic differentiation.

Grammar (``^`` binds tighter than unary minus, right-associative)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "x" | "e" | "pi" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := "log" | "exp" | "sqrt"

so ``-x^2`` is ``-(x^2)`` and ``2^-x`` is ``2^(-x)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from .errors import DomainError, EvaluationOverflow, ExprSyntaxError, StolarskyError


class Expr:
    """Base class of the immutable expression tree."""

    __slots__ = ()

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float
    name: str | None = None


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Log(Expr):
    arg: Expr


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: Expr


X = Var()
FUNCS = {"log": Log, "exp": Exp, "sqrt": Sqrt}
NAMED = {"e": math.e, "pi": math.pi}
ATOM_START = frozenset({"NUMBER", "x", "e", "pi", "log", "exp", "sqrt", "(", "-"})

# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad, ATOM_START)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_op(self, *ops):
        kind, val, _ = self.peek()
        return kind == "op" and val in ops

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self):
        if self.at_op("-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at_op("^"):
            self.take()
            return Pow(base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            value = float(val)
            if not math.isfinite(value):
                raise ExprSyntaxError(f"number {val!r} is out of range", pos)
            return Const(value)
        if kind == "name":
            if val == "x":
                return X
            if val in NAMED:
                return Const(NAMED[val], val)
            if val in FUNCS:
                k2, v2, p2 = self.take()
                if not (k2 == "op" and v2 == "("):
                    raise ExprSyntaxError(f"expected '(' after {val}", p2, {"("})
                inner = self.expr()
                self.expect_close()
                return FUNCS[val](inner)
            raise ExprSyntaxError(f"unknown identifier {val!r}", pos, ATOM_START)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_close()
            return inner
        what = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {what}", pos, ATOM_START)

    def expect_close(self):
        kind, val, pos = self.take()
        if not (kind == "op" and val == ")"):
            raise ExprSyntaxError("expected ')'", pos, {")", "+", "-", "*", "/", "^"})


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    >>> parse("x^2")
    Pow(base=Var(), exponent=Const(value=2.0, name=None))
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, ATOM_START)
    p = _Parser(text)
    node = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {val!r}", pos, {"+", "-", "*", "/", "^", "end"})
    return node


# --- printing ----------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}
_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def _prec(e: Expr) -> int:
    if isinstance(e, Const) and e.name is None and (e.value < 0 or str(e.value).startswith("-")):
        return 3
    return _PREC.get(type(e), 5)


def _fmt_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v)) if v != 0 else "0"
    return repr(v)


def to_string(e: Expr) -> str:
    """Minimal-parenthesis rendering that parses back to the same tree
    (negative constants print as a negated literal)."""
    if isinstance(e, Const):
        return e.name or _fmt_number(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, (Log, Exp, Sqrt)):
        return f"{type(e).__name__.lower()}({to_string(e.arg)})"
    if isinstance(e, Neg):
        inner = to_string(e.arg)
        return f"-({inner})" if _prec(e.arg) < 3 else f"-{inner}"
    if isinstance(e, Pow):
        base = to_string(e.base)
        if _prec(e.base) <= 4:
            base = f"({base})"
        ex = to_string(e.exponent)
        if _prec(e.exponent) < 3:
            ex = f"({ex})"
        return f"{base}^{ex}"
    p = _PREC[type(e)]
    left, right = to_string(e.left), to_string(e.right)
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {_SYMBOL[type(e)]} {right}"


# --- evaluation --------------------------------------------------------------


def _finite(v: float, what: str) -> float:
    if math.isinf(v) or math.isnan(v):
        raise EvaluationOverflow(f"{what} is not finite")
    return v


def evaluate(e: Expr, x: float) -> float:
    """Evaluate at ``x``. Raises :class:`DomainError` for log/sqrt of
    out-of-domain values, division by zero and invalid powers, and
    :class:`EvaluationOverflow` for non-finite results."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -evaluate(e.arg, x)
    if isinstance(e, Add):
        return _finite(evaluate(e.left, x) + evaluate(e.right, x), "sum")
    if isinstance(e, Sub):
        return _finite(evaluate(e.left, x) - evaluate(e.right, x), "difference")
    if isinstance(e, Mul):
        return _finite(evaluate(e.left, x) * evaluate(e.right, x), "product")
    if isinstance(e, Div):
        num, den = evaluate(e.left, x), evaluate(e.right, x)
        if den == 0.0:
            raise DomainError(f"division by zero at x={x!r}")
        return _finite(num / den, "quotient")
    if isinstance(e, Pow):
        base, ex = evaluate(e.base, x), evaluate(e.exponent, x)
        if base == 0.0 and ex < 0.0:
            raise DomainError(f"0 raised to negative power at x={x!r}")
        if base < 0.0 and not ex.is_integer():
            raise DomainError(f"negative base {base!r} with non-integer exponent at x={x!r}")
        try:
            return _finite(math.pow(base, ex), "power")
        except OverflowError:
            raise EvaluationOverflow(f"power overflow at x={x!r}") from None
    if isinstance(e, Log):
        v = evaluate(e.arg, x)
        if v <= 0.0:
            raise DomainError(f"log of non-positive value {v!r} at x={x!r}")
        return math.log(v)
    if isinstance(e, Exp):
        try:
            return math.exp(evaluate(e.arg, x))
        except OverflowError:
            raise EvaluationOverflow(f"exp overflow at x={x!r}") from None
    if isinstance(e, Sqrt):
        v = evaluate(e.arg, x)
        if v < 0.0:
            raise DomainError(f"sqrt of negative value {v!r} at x={x!r}")
        return math.sqrt(v)
    raise TypeError(f"not an expression node: {e!r}")


# --- simplifying constructors ----------------------------------------------------

ZERO, ONE, TWO = Const(0.0), Const(1.0), Const(2.0)


def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


def is_total(e: Expr) -> bool:
    """True if ``e`` cannot raise a domain error for any x > 0."""
    if isinstance(e, (Const, Var)):
        return True
    if isinstance(e, (Add, Sub, Mul)):
        return is_total(e.left) and is_total(e.right)
    if isinstance(e, (Neg, Exp)):
        return is_total(e.arg)
    if isinstance(e, Pow):
        ex = e.exponent
        return is_total(e.base) and _is_const(ex) and ex.value >= 0 and ex.value.is_integer()
    return False


def _fold(fn, *args):
    try:
        v = fn(*args)
    except (ValueError, OverflowError, ZeroDivisionError):
        return None
    return Const(v) if math.isfinite(v) else None


def add(a, b):
    if _is_const(a) and _is_const(b):
        return _fold(lambda p, q: p + q, a.value, b.value) or Add(a, b)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Add(a, b)


def sub(a, b):
    if _is_const(a) and _is_const(b):
        return _fold(lambda p, q: p - q, a.value, b.value) or Sub(a, b)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return Sub(a, b)


def mul(a, b):
    if _is_const(a) and _is_const(b):
        return _fold(lambda p, q: p * q, a.value, b.value) or Mul(a, b)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if (_is_const(a, 0.0) and is_total(b)) or (_is_const(b, 0.0) and is_total(a)):
        return ZERO
    if _is_const(a, -1.0):
        return neg(b)
    return Mul(a, b)


def div(a, b):
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return _fold(lambda p, q: p / q, a.value, b.value) or Div(a, b)
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 0.0) and _is_const(b) and b.value != 0.0:
        return ZERO
    return Div(a, b)


def neg(a):
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a, b):
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0) and is_total(a):
        return ONE
    if _is_const(a) and _is_const(b):
        return _fold(math.pow, a.value, b.value) or Pow(a, b)
    return Pow(a, b)


def log(a):
    if _is_const(a) and a.value > 0:
        return _fold(math.log, a.value) or Log(a)
    return Log(a)


def exp(a):
    if _is_const(a):
        return _fold(math.exp, a.value) or Exp(a)
    return Exp(a)


# --- differentiation -----------------------------------------------------------


def _has_var(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    return any(_has_var(c) for c in _children(e))


def _children(e: Expr):
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base, e.exponent)
    if isinstance(e, (Neg, Log, Exp, Sqrt)):
        return (e.arg,)
    return ()


def _defined(e: Expr) -> bool:
    # a constant subtree that evaluates cleanly contributes nothing to d/dx
    try:
        evaluate(e, 1.0)
    except StolarskyError:
        return False
    return True


def differentiate(e: Expr) -> Expr:
    """d/dx of ``e`` with conservative simplification.

    ``u^v`` with non-constant exponent is differentiated as ``exp(v log u)``.
    """
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if not _has_var(e) and _defined(e):
        return ZERO
    if isinstance(e, Neg):
        return neg(differentiate(e.arg))
    if isinstance(e, Add):
        return add(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Sub):
        return sub(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Mul):
        u, v = e.left, e.right
        return add(mul(differentiate(u), v), mul(u, differentiate(v)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        num = sub(mul(differentiate(u), v), mul(u, differentiate(v)))
        return div(num, power(v, TWO))
    if isinstance(e, Pow):
        u, v = e.base, e.exponent
        du = differentiate(u)
        if _is_const(v):
            return mul(mul(v, power(u, Const(v.value - 1.0))), du)
        dv = differentiate(v)
        if _is_const(u) and u.value > 0:
            return mul(mul(e, log(u)), dv)
        return mul(e, add(mul(dv, log(u)), div(mul(v, du), u)))
    if isinstance(e, Log):
        return div(differentiate(e.arg), e.arg)
    if isinstance(e, Exp):
        return mul(e, differentiate(e.arg))
    if isinstance(e, Sqrt):
        return div(differentiate(e.arg), mul(TWO, e))
    raise TypeError(f"not an expression node: {e!r}")


# --- differentiable function bundle ------------------------------------------------


@dataclass(frozen=True)
class DifferentiableFn:
    """f and its first three derivatives as callables on x > 0."""

    eval0: Callable[[float], float]
    eval1: Callable[[float], float]
    eval2: Callable[[float], float]
    eval3: Callable[[float], float]
    origin: object = None
    label: str = ""

    def __call__(self, x):
        return self.eval0(x)

    def derivative(self, order: int):
        return (self.eval0, self.eval1, self.eval2, self.eval3)[order]

    @classmethod
    def from_expr(cls, e: Union[Expr, str]) -> "DifferentiableFn":
        if isinstance(e, str):
            e = parse(e)
        d1 = differentiate(e)
        d2 = differentiate(d1)
        d3 = differentiate(d2)
        evals = [lambda x, n=n: evaluate(n, x) for n in (e, d1, d2, d3)]
        return cls(*evals, origin=e, label=to_string(e))
