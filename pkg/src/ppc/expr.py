"""Scalar-field expression DSL.

Parses text like ``4*alpha*exp(2*z)`` into an immutable AST over the chart
coordinates ``x, y, z`` and named constants, and evaluates it to a
:class:`~ppc.jets.Jet2` at a point under a constant-binding environment.

Grammar (whitespace-insensitive)::

    expr    :=  term (('+' | '-') term)*          left associative
    term    :=  factor (('*' | '/') factor)*      left associative
    factor  :=  '-' factor | power
    power   :=  atom ('^' integer)?               exponent is an integer literal
    atom    :=  number | ident | ident '(' expr ')' | '(' expr ')'

Precedence is ``^`` > unary minus > ``* /`` > ``+ -``.  Function names are
limited to exp, log, sqrt, sin, cos, sinh and cosh.  Identifiers are
case-sensitive ASCII; Greek letters are spelled out (alpha, beta, ...).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import ExprSyntaxError, UnboundIdentifier, UnknownFunction
from .jets import ChartPoint, Jet2, jet_seed

FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos", "sinh", "cosh")
COORDS = {"x": 0, "y": 1, "z": 2}


# AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "ExprAst"


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * /
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Pow:
    base: "ExprAst"
    exponent: int


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "ExprAst"


ExprAst = Union[Num, Ident, Neg, Bin, Pow, Call]


# Small builder helpers for constructing ASTs programmatically.

def num(v: float) -> Num:
    return Num(float(v))


def ident(name: str) -> Ident:
    return Ident(name)


def add(a: ExprAst, b: ExprAst) -> Bin:
    return Bin("+", a, b)


def sub(a: ExprAst, b: ExprAst) -> Bin:
    return Bin("-", a, b)


def mul(a: ExprAst, b: ExprAst) -> Bin:
    return Bin("*", a, b)


def div(a: ExprAst, b: ExprAst) -> Bin:
    return Bin("/", a, b)


def neg(a: ExprAst) -> Neg:
    return Neg(a)


def powi(a: ExprAst, n: int) -> Pow:
    return Pow(a, n)


def call(fn: str, a: ExprAst) -> Call:
    if fn not in FUNCTIONS:
        raise UnknownFunction(f"unknown function {fn!r}")
    return Call(fn, a)


def as_ast(value) -> ExprAst:
    """Coerce a float, expression string or AST into an AST."""
    if isinstance(value, (Num, Ident, Neg, Bin, Pow, Call)):
        return value
    if isinstance(value, str):
        return parse(value)
    return Num(float(value))


# Tokenizer ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad = len(text) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        for kind in ("number", "ident", "op"):
            got = m.group(kind)
            if got is not None:
                tokens.append(_Token(kind, got, m.start(kind)))
                break
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


# Parser ---------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        tok = self.next()
        if tok.kind != "op" or tok.text != op:
            raise ExprSyntaxError(f"unexpected token {tok.text!r}", tok.offset, (op,))

    def parse(self) -> ExprAst:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExprSyntaxError(f"trailing input {tok.text!r}", tok.offset,
                                  ("operator", "end of input"))
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            node = Bin(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next().text
            node = Bin(op, node, self.factor())
        return node

    def factor(self) -> ExprAst:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.next()
            arg = self.factor()
            # Fold a literal so that "-3" round-trips as a negative number.
            if isinstance(arg, Num):
                return Num(-arg.value)
            return Neg(arg)
        return self.power()

    def power(self) -> ExprAst:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.next()
            sign = 1
            if self.peek().kind == "op" and self.peek().text == "-":
                self.next()
                sign = -1
            tok = self.next()
            if tok.kind != "number" or not re.fullmatch(r"\d+", tok.text):
                raise ExprSyntaxError(f"exponent {tok.text!r} is not an integer literal",
                                      tok.offset, ("integer",))
            return Pow(base, sign * int(tok.text))
        return base

    def atom(self) -> ExprAst:
        tok = self.next()
        if tok.kind == "number":
            return Num(float(tok.text))
        if tok.kind == "ident":
            if self.peek().kind == "op" and self.peek().text == "(":
                if tok.text not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {tok.text!r} at offset {tok.offset}")
                self.next()
                arg = self.expr()
                self.expect_op(")")
                return Call(tok.text, arg)
            return Ident(tok.text)
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"unexpected token {tok.text!r}", tok.offset,
                              ("number", "identifier", "("))


def parse(text: str) -> ExprAst:
    """Parse expression text into an AST."""
    return _Parser(text).parse()


# Pretty printer --------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "pow": 4, "atom": 5}


def _render(node: ExprAst, ctx: int) -> str:
    if isinstance(node, Num):
        s = repr(node.value)
        prec = _PREC["neg"] if node.value < 0 else _PREC["atom"]
    elif isinstance(node, Ident):
        s, prec = node.name, _PREC["atom"]
    elif isinstance(node, Call):
        s, prec = f"{node.fn}({_render(node.arg, 0)})", _PREC["atom"]
    elif isinstance(node, Neg):
        s, prec = "-" + _render(node.arg, _PREC["neg"]), _PREC["neg"]
    elif isinstance(node, Pow):
        s = f"{_render(node.base, _PREC['atom'])}^{node.exponent}"
        prec = _PREC["pow"]
    elif isinstance(node, Bin):
        prec = _PREC[node.op]
        # Right operand one level tighter so left associativity round-trips.
        s = f"{_render(node.left, prec)} {node.op} {_render(node.right, prec + 1)}"
    else:  # pragma: no cover
        raise TypeError(f"not an AST node: {node!r}")
    return f"({s})" if prec < ctx else s


def to_source(node: ExprAst) -> str:
    """Render an AST back to expression text (parse(to_source(t)) == t
    for any t produced by parse)."""
    return _render(node, 0)


# Evaluation -------------------------------------------------------------------


def eval_jet(node: ExprAst, p: ChartPoint, env: Mapping[str, float]) -> Jet2:
    """Evaluate an expression to a Jet2 at p; constants have zero derivatives."""
    if isinstance(node, Num):
        return Jet2.constant(node.value)
    if isinstance(node, Ident):
        axis = COORDS.get(node.name)
        if axis is not None:
            return jet_seed(p, axis)
        try:
            return Jet2.constant(env[node.name])
        except KeyError:
            raise UnboundIdentifier(f"identifier {node.name!r} is not bound") from None
    if isinstance(node, Neg):
        return -eval_jet(node.arg, p, env)
    if isinstance(node, Bin):
        left = eval_jet(node.left, p, env)
        right = eval_jet(node.right, p, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        return left / right
    if isinstance(node, Pow):
        return eval_jet(node.base, p, env).pow_int(node.exponent)
    if isinstance(node, Call):
        return getattr(eval_jet(node.arg, p, env), node.fn)()
    raise TypeError(f"not an AST node: {node!r}")  # pragma: no cover


def eval_value(node: ExprAst, p: ChartPoint, env: Mapping[str, float]) -> float:
    return eval_jet(node, p, env).value
