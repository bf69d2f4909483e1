"""Bivariate expression trees: parsing, printing, and evaluation over any scalar algebra.

The grammar is a small calculator language over the variables x and y
(t and s are accepted as aliases and normalized at parse time):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | 'pi' | 'e' | IDENT | IDENT '(' expr ')' | '(' expr ')'

``^`` binds tightest and is right-associative, then unary minus, then
``*``/``/``, then ``+``/``-``.  Evaluation is generic: any object implementing
the arithmetic operators plus ``sin``/``cos``/``exp``/``log``/``sqrt`` methods
can flow through an expression tree, which is how the dual and hyper-dual
algebras obtain derivatives without a separate differentiation pass.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

__all__ = [
    "BinOp",
    "Call",
    "Const",
    "EvaluationError",
    "Expression",
    "Neg",
    "ParseError",
    "Var",
    "const",
    "evaluate",
    "parse",
    "pretty_print",
    "substitute",
    "variables",
]

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")
_CONSTANTS = {"pi": math.pi, "e": math.e}
_ALIASES = {"x": "x", "y": "y", "t": "x", "s": "y"}


class ParseError(Exception):
    """Malformed expression text; carries the byte offset and offending token."""

    def __init__(self, offset: int, message: str, token: str = ""):
        detail = f"{message} at offset {offset}"
        if token:
            detail += f" (near {token!r})"
        super().__init__(detail)
        self.offset = offset
        self.message = message
        self.token = token


class EvaluationError(Exception):
    """Evaluation left the algebra's domain or produced a non-finite value."""


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # "x" or "y" after alias normalization


@dataclass(frozen=True)
class Neg:
    child: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    fn: str  # one of FUNCTIONS
    arg: "Expression"


Expression = Union[Const, Var, Neg, BinOp, Call]


def const(value: float) -> Expression:
    """Constant node; negatives become ``Neg(Const(|v|))`` so printing round-trips."""
    v = float(value)
    if v < 0:
        return Neg(Const(-v))
    return Const(v)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "ident", "end", or the operator/paren character itself
    text: str
    offset: int


_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(_Token("num", m.group(), i))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(_Token("ident", m.group(), i))
            i = m.end()
            continue
        if c in "+-*/^()":
            tokens.append(_Token(c, c, i))
            i += 1
            continue
        raise ParseError(i, "unexpected character", c)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expr(self) -> Expression:
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.factor()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expression:
        if self.peek().kind == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expression:
        node = self.atom()
        if self.peek().kind == "^":
            self.advance()
            # right-associative: the exponent restarts at factor level
            node = BinOp("^", node, self.factor())
        return node

    def atom(self) -> Expression:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name in _CONSTANTS:
                return Const(_CONSTANTS[name])
            if name in _ALIASES:
                return Var(_ALIASES[name])
            if name in FUNCTIONS:
                opener = self.peek()
                if opener.kind != "(":
                    raise ParseError(opener.offset, "expected '(' after function name", opener.text)
                self.advance()
                arg = self.expr()
                closer = self.peek()
                if closer.kind != ")":
                    raise ParseError(closer.offset, "unbalanced parentheses", closer.text)
                self.advance()
                return Call(name, arg)
            raise ParseError(tok.offset, "unknown identifier", name)
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            closer = self.peek()
            if closer.kind != ")":
                raise ParseError(closer.offset, "unbalanced parentheses", closer.text)
            self.advance()
            return node
        raise ParseError(tok.offset, "empty operand", tok.text)


def parse(text: str) -> Expression:
    """Parse expression text into a tree, normalizing the t/s aliases to x/y."""
    if not text or not text.strip():
        raise ParseError(0, "empty input")
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    tok = parser.peek()
    if tok.kind != "end":
        raise ParseError(tok.offset, "trailing garbage", tok.text)
    return node


def _fmt_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def pretty_print(expr: Expression) -> str:
    """Fully parenthesized canonical form; ``parse(pretty_print(e)) == e``."""
    match expr:
        case Const(value):
            return _fmt_number(value)
        case Var(name):
            return name
        case Neg(child):
            return f"(-{pretty_print(child)})"
        case BinOp(op, left, right):
            return f"({pretty_print(left)}{op}{pretty_print(right)})"
        case Call(fn, arg):
            return f"{fn}({pretty_print(arg)})"
    raise TypeError(f"not an expression node: {expr!r}")


def variables(expr: Expression) -> frozenset[str]:
    """Set of variable names the expression actually uses."""
    match expr:
        case Const():
            return frozenset()
        case Var(name):
            return frozenset((name,))
        case Neg(child):
            return variables(child)
        case BinOp(_, left, right):
            return variables(left) | variables(right)
        case Call(_, arg):
            return variables(arg)
    raise TypeError(f"not an expression node: {expr!r}")


def substitute(expr: Expression, mapping: dict[str, Expression]) -> Expression:
    """Replace each variable named in ``mapping`` by the given subtree."""
    match expr:
        case Const():
            return expr
        case Var(name):
            return mapping.get(name, expr)
        case Neg(child):
            return Neg(substitute(child, mapping))
        case BinOp(op, left, right):
            return BinOp(op, substitute(left, mapping), substitute(right, mapping))
        case Call(fn, arg):
            return Call(fn, substitute(arg, mapping))
    raise TypeError(f"not an expression node: {expr!r}")


def _pow_real(base: float, exponent: float) -> float:
    b, p = float(base), float(exponent)
    if b > 0.0:
        return math.pow(b, p)
    if b == 0.0:
        if p > 0.0:
            return 0.0
        if p == 0.0:
            return 1.0
        raise EvaluationError("zero base raised to a negative exponent")
    if p.is_integer():
        return math.pow(b, p)
    raise EvaluationError("fractional power of a negative base")


def _call_real(fn: str, v: float):
    if fn == "sin":
        return math.sin(v)
    if fn == "cos":
        return math.cos(v)
    if fn == "exp":
        return math.exp(v)
    if fn == "log":
        if v <= 0.0:
            raise EvaluationError("log of a non-positive value")
        return math.log(v)
    if fn == "sqrt":
        if v < 0.0:
            raise EvaluationError("sqrt of a negative value")
        return math.sqrt(v)
    raise EvaluationError(f"unsupported function {fn!r}")


def _apply_call(fn: str, value):
    if isinstance(value, (int, float)):
        return _call_real(fn, value)
    return getattr(value, fn)()


def _apply_power(base, exponent):
    if isinstance(base, (int, float)) and isinstance(exponent, (int, float)):
        return _pow_real(base, exponent)
    return base ** exponent


def _eval(node: Expression, x, y):
    match node:
        case Const(value):
            return value
        case Var(name):
            return x if name == "x" else y
        case Neg(child):
            return -_eval(child, x, y)
        case BinOp(op, left, right):
            a = _eval(left, x, y)
            b = _eval(right, x, y)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                return a / b
            return _apply_power(a, b)
        case Call(fn, arg):
            return _apply_call(fn, _eval(arg, x, y))
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(expr: Expression, x, y):
    """Evaluate ``expr`` at ``(x, y)`` under whichever scalar algebra the inputs carry.

    Plain numbers produce a plain float; dual or hyper-dual inputs produce
    derivative-carrying results.  Any domain violation or non-finite plain
    result raises :class:`EvaluationError`.
    """
    try:
        result = _eval(expr, x, y)
    except EvaluationError:
        raise
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise EvaluationError(str(exc)) from exc
    if isinstance(result, (int, float)) and not math.isfinite(result):
        raise EvaluationError("result is not finite")
    return result
