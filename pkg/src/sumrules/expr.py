"""Parser and evaluator for density expressions.

Grammar (EBNF, whitespace insignificant between tokens)::

    expr    = term , { ( "+" | "-" ) , term } ;
    term    = factor , { ( "*" | "/" ) , factor } ;
    factor  = ( "+" | "-" ) , factor | power ;
    power   = atom , [ "^" , factor ] ;           (* right associative *)
    atom    = NUMBER | call | name | "(" , expr , ")" ;
    call    = FUNCTION , "(" , expr , ")" ;
    name    = "x" | "pi" | "e" | PARAMETER ;
    NUMBER  = digits , [ "." , digits ] , [ exponent ]
            | "." , digits , [ exponent ] ;

Functions: sin, cos, tan, exp, log, sqrt, abs. Any other identifier is a
named parameter bound at evaluation time; using one in call position is an
error. Exponentiation with an integer literal exponent is evaluated by
repeated multiplication, so ``x^2`` is bitwise ``x*x``.

Parse errors carry the byte offset of the offending token. Evaluation that
produces NaN or infinity raises, rather than letting the values propagate
into quadrature.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import (
    ExpressionSyntaxError,
    NonFiniteResultError,
    UnboundParameterError,
    UnknownIdentifierError,
)

__all__ = [
    "ExprAst",
    "Num",
    "Var",
    "Const",
    "Param",
    "Unary",
    "Binary",
    "Call",
    "parse",
    "eval_ast",
    "pretty",
    "FUNCTIONS",
    "CONSTANTS",
]

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
CONSTANTS = {"pi": np.pi, "e": np.e}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "ExprAst"


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: "ExprAst"
    rhs: "ExprAst"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "ExprAst"


ExprAst = Union[Num, Var, Const, Param, Unary, Binary, Call]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == m.start():
            # skip leading whitespace manually to pin the offset
            stripped = pos
            while stripped < len(text) and text[stripped].isspace():
                stripped += 1
            if stripped == len(text):
                break
            raise ExpressionSyntaxError(
                f"unexpected character {text[stripped]!r}", stripped
            )
        kind = m.lastgroup
        value = m.group(kind)
        offset = m.end() - len(value)
        tokens.append((kind, value, offset))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, value, offset = self.peek()
        if kind != "op" or value != op:
            raise ExpressionSyntaxError(
                f"expected {op!r}, found {value!r:.20}" if value else f"expected {op!r}",
                offset,
            )
        return self.advance()

    def parse_expr(self) -> ExprAst:
        node = self.parse_term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = Binary(value, node, self.parse_term())
            else:
                return node

    def parse_term(self) -> ExprAst:
        node = self.parse_factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = Binary(value, node, self.parse_factor())
            else:
                return node

    def parse_factor(self) -> ExprAst:
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            self.advance()
            operand = self.parse_factor()
            return operand if value == "+" else Unary("-", operand)
        return self.parse_power()

    def parse_power(self) -> ExprAst:
        base = self.parse_atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return Binary("^", base, self.parse_factor())
        return base

    def parse_atom(self) -> ExprAst:
        kind, value, offset = self.advance()
        if kind == "num":
            return Num(float(value))
        if kind == "ident":
            nk, nv, _ = self.peek()
            if nk == "op" and nv == "(":
                if value not in FUNCTIONS:
                    raise UnknownIdentifierError(
                        f"unknown function {value!r}", offset
                    )
                self.advance()
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(value, arg)
            if value == "x":
                return Var()
            if value in CONSTANTS:
                return Const(value)
            return Param(value)
        if kind == "op" and value == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        shown = value if value else "end of input"
        raise ExpressionSyntaxError(f"expected a value, found {shown!r}", offset)


def parse(text: str) -> ExprAst:
    """Parse an expression string into an AST.

    Raises ExpressionSyntaxError or UnknownIdentifierError with the byte
    offset of the problem.
    """
    parser = _Parser(text)
    node = parser.parse_expr()
    kind, value, offset = parser.peek()
    if kind != "end":
        raise ExpressionSyntaxError(f"unexpected trailing {value!r}", offset)
    return node


def _int_power(base, exponent: int):
    # binary exponentiation keeps integer powers exact in the x^2 == x*x sense
    if exponent == 0:
        return np.ones_like(base) if isinstance(base, np.ndarray) else 1.0
    neg = exponent < 0
    e = -exponent if neg else exponent
    result = None
    square = base
    while e:
        if e & 1:
            result = square if result is None else result * square
        e >>= 1
        if e:
            square = square * square
    return 1.0 / result if neg else result


def _eval(node: ExprAst, x, params: Mapping[str, float]):
    # leaves come back as numpy scalars so that 0/0 and friends follow IEEE
    # semantics instead of raising ZeroDivisionError on the Python-float path
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Const):
        return np.float64(CONSTANTS[node.name])
    if isinstance(node, Param):
        try:
            return np.float64(params[node.name])
        except KeyError:
            raise UnboundParameterError(
                f"parameter {node.name!r} has no bound value"
            ) from None
    if isinstance(node, Unary):
        return -_eval(node.operand, x, params)
    if isinstance(node, Binary):
        if node.op == "^" and isinstance(node.rhs, Num) and float(node.rhs.value).is_integer():
            return _int_power(_eval(node.lhs, x, params), int(node.rhs.value))
        a = _eval(node.lhs, x, params)
        b = _eval(node.rhs, x, params)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return np.power(a, b)
    if isinstance(node, Call):
        return FUNCTIONS[node.name](_eval(node.arg, x, params))
    raise TypeError(f"not an expression node: {node!r}")


def eval_ast(node: ExprAst, x, params: Mapping[str, float] | None = None):
    """Evaluate an AST at x (scalar or ndarray) with bound parameters.

    The result is broadcast against x. NaN or infinite values raise
    NonFiniteResultError; invalid intermediate operations (division by zero,
    log of a negative) surface the same way.
    """
    params = params or {}
    xa = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(node, xa, params)
    out = np.broadcast_to(np.asarray(out, dtype=float), xa.shape).copy() if xa.shape else float(out)
    if not np.all(np.isfinite(out)):
        raise NonFiniteResultError("expression evaluated to a non-finite value")
    return out


_LEVEL_ADD, _LEVEL_MUL, _LEVEL_UNARY, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(node: ExprAst) -> int:
    if isinstance(node, Binary):
        if node.op in "+-":
            return _LEVEL_ADD
        if node.op in "*/":
            return _LEVEL_MUL
        return _LEVEL_POW
    if isinstance(node, Unary):
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def _wrap(node: ExprAst, min_level: int) -> str:
    s = pretty(node)
    return f"({s})" if _level(node) < min_level else s


def pretty(node: ExprAst) -> str:
    """Render an AST back to text. parse(pretty(ast)) reproduces the AST."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, (Const, Param)):
        return node.name
    if isinstance(node, Unary):
        return "-" + _wrap(node.operand, _LEVEL_UNARY)
    if isinstance(node, Call):
        return f"{node.name}({pretty(node.arg)})"
    if isinstance(node, Binary):
        if node.op in "+-":
            lhs = _wrap(node.lhs, _LEVEL_ADD)
            rhs = _wrap(node.rhs, _LEVEL_ADD + 1)
            return f"{lhs} {node.op} {rhs}"
        if node.op in "*/":
            lhs = _wrap(node.lhs, _LEVEL_MUL)
            rhs = _wrap(node.rhs, _LEVEL_MUL + 1)
            return f"{lhs}{node.op}{rhs}"
        lhs = _wrap(node.lhs, _LEVEL_POW + 1)
        rhs = _wrap(node.rhs, _LEVEL_UNARY)
        return f"{lhs}^{rhs}"
    raise TypeError(f"not an expression node: {node!r}")
