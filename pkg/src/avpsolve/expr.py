"""Right-hand sides written as text, e.g. ``"y - 2*x/y"``.

Grammar (whitespace is insignificant)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := primary ("^" exponent)?
    exponent := (NUMBER | "(" expr ")") ("^" exponent)?
    primary  := NUMBER | VARIABLE | FUNCTION "(" expr ")" | "(" expr ")"

    NUMBER   := digits ["." digits] [("e" | "E") ["+" | "-"] digits]
    VARIABLE := "x" | "y" | "y1" | "y2" | ...
    FUNCTION := "sin" | "cos" | "tan" | "exp" | "ln" | "sqrt" | "abs"

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``; ``^`` is
right-associative, the other binary operators left-associative.  Domain
errors (division by zero, ``ln`` of a negative number, ...) evaluate to
``inf``/``nan`` rather than raising.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .core import OdeSystem, Vector
from .errors import (
    EvaluationError,
    ExpressionError,
    ExprSyntaxError,
    SystemCompileError,
    UnknownIdentifierError,
)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expression"


Expression = Union[Num, Var, Neg, BinOp, Call]


# ---- safe arithmetic --------------------------------------------------------


def _div(a: float, b: float) -> float:
    try:
        return a / b
    except ZeroDivisionError:
        if a == 0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)


def _pow(a: float, b: float) -> float:
    try:
        return math.pow(a, b)
    except OverflowError:
        if a < 0 and b == int(b) and int(b) % 2 == 1:
            return -math.inf
        return math.inf
    except (ValueError, ZeroDivisionError):
        if a == 0 and b < 0:
            return math.inf
        return math.nan


def _guard(fn: Callable[[float], float], overflow: float = math.inf) -> Callable[[float], float]:
    def safe(v: float) -> float:
        try:
            return fn(v)
        except OverflowError:
            return overflow
        except ValueError:
            return math.nan

    return safe


def _ln(v: float) -> float:
    if v == 0:
        return -math.inf
    if v < 0:
        return math.nan
    return math.log(v)


def _sqrt(v: float) -> float:
    return math.nan if v < 0 else math.sqrt(v)


FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": _guard(math.sin),
    "cos": _guard(math.cos),
    "tan": _guard(math.tan),
    "exp": _guard(math.exp),
    "ln": _ln,
    "sqrt": _sqrt,
    "abs": abs,
}

BINARY: dict[str, Callable[[float, float], float]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "^": _pow,
}


# ---- tokenizer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)
_VARIABLE = re.compile(r"x|y|y[1-9][0-9]*")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "ident", "op", "end"
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            toks.append(_Tok("end", "", len(text)))
            return toks
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()


_OPERAND = frozenset({"number", "variable", "function", "(", "-"})


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, message: str, expected) -> ExprSyntaxError:
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        return ExprSyntaxError(f"{message}, found {found}", t.offset, frozenset(expected))

    def expect(self, op: str) -> None:
        if self.tok.kind == "op" and self.tok.text == op:
            self.advance()
            return
        raise self.fail(f"expected {op!r}", {op, "operator"} if op == ")" else {op})

    def parse(self) -> Expression:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.fail("unexpected token", {"operator", "end of input"})
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expression:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expression:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.exponent())
        return base

    def exponent(self) -> Expression:
        t = self.tok
        if t.kind == "num":
            self.advance()
            node: Expression = Num(float(t.text))
        elif t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
        else:
            raise self.fail("exponent must be a number or parenthesized", {"number", "("})
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", node, self.exponent())
        return node

    def primary(self) -> Expression:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "ident":
            self.advance()
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg)
            if _VARIABLE.fullmatch(t.text):
                return Var(t.text)
            raise UnknownIdentifierError(t.text, t.offset)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise self.fail("expected an operand", _OPERAND)


def parse(text: str) -> Expression:
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, _OPERAND)
    return _Parser(text).parse()


def to_text(expr: Expression) -> str:
    """Fully parenthesized rendering; ``parse(to_text(e)) == e``."""
    if isinstance(expr, Num):
        return repr(float(expr.value))
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        return f"(-{to_text(expr.operand)})"
    if isinstance(expr, Call):
        return f"{expr.func}({to_text(expr.arg)})"
    if expr.op == "^":
        exp = expr.right
        exp_text = repr(float(exp.value)) if isinstance(exp, Num) else f"({to_text(exp)})"
        return f"({to_text(expr.left)} ^ {exp_text})"
    return f"({to_text(expr.left)} {expr.op} {to_text(expr.right)})"


def variables(expr: Expression) -> set[str]:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Num):
        return set()
    if isinstance(expr, Neg):
        return variables(expr.operand)
    if isinstance(expr, Call):
        return variables(expr.arg)
    return variables(expr.left) | variables(expr.right)


def _slot(name: str, dimension: int) -> int | None:
    """-1 for x, a 0-based state index for y-variables, None if unbound."""
    if name == "x":
        return -1
    if name == "y":
        return 0 if dimension == 1 else None
    k = int(name[1:])
    return k - 1 if k <= dimension else None


def compile_expr(expr: Expression, dimension: int) -> Callable[[float, Vector], float]:
    """Turn a tree into a closure ``f(x, y) -> float``; ``dimension=0`` allows only ``x``."""
    for name in sorted(variables(expr)):
        if _slot(name, dimension) is None:
            raise UnknownIdentifierError(name)
    return _build(expr, dimension)


def _build(expr: Expression, dimension: int):
    if isinstance(expr, Num):
        v = float(expr.value)
        return lambda x, y: v
    if isinstance(expr, Var):
        idx = _slot(expr.name, dimension)
        if idx == -1:
            return lambda x, y: float(x)
        return lambda x, y: float(y[idx])
    if isinstance(expr, Neg):
        inner = _build(expr.operand, dimension)
        return lambda x, y: -inner(x, y)
    if isinstance(expr, Call):
        fn = FUNCTIONS[expr.func]
        inner = _build(expr.arg, dimension)
        return lambda x, y: fn(inner(x, y))
    op = BINARY[expr.op]
    left, right = _build(expr.left, dimension), _build(expr.right, dimension)
    return lambda x, y: op(left(x, y), right(x, y))


def evaluate(expr: Expression, x: float, y: Sequence[float] | float = ()) -> float:
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    try:
        fn = compile_expr(expr, y.shape[0])
    except UnknownIdentifierError as exc:
        raise EvaluationError(f"unbound variable {exc.name!r}") from exc
    return fn(float(x), y)


def compile_function(text: str, dimension: int = 0) -> Callable[[float, Vector], float]:
    return compile_expr(parse(text), dimension)


def compile_system(texts: Sequence[str], dimension: int) -> OdeSystem:
    """Compile one expression per component into an :class:`OdeSystem`."""
    if len(texts) != dimension:
        raise SystemCompileError([(0, ExpressionError(f"expected {dimension} expressions, got {len(texts)}"))])
    fns, failures = [], []
    for i, text in enumerate(texts):
        try:
            fns.append(compile_function(text, dimension))
        except ExpressionError as exc:
            failures.append((i, exc))
    if failures:
        raise SystemCompileError(failures)

    def rhs(x: float, y: Vector) -> Vector:
        return np.array([fn(x, y) for fn in fns])

    rhs.texts = tuple(texts)
    return OdeSystem.from_rhs(dimension, rhs)
