"""Coefficient expression language.

Grammar (EBNF)::

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = "-" , unary | power ;
    power   = primary , [ "^" , unary ] ;          (* right associative *)
    primary = number | call | identifier | "(" , expr , ")" ;
    call    = function , "(" , expr , { "," , expr } , ")" ;
    function = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt" | "pow" ;
    number  = digits , [ "." , [digits] ] , [ exponent ] | "." , digits , [ exponent ] ;
    exponent = ("e" | "E") , [ "+" | "-" ] , digits ;
    identifier = letter , { letter | digit | "_" } ;

Evaluation is generic over the numeric tower of :mod:`parastruct.jet`, so the
same tree yields values, first derivatives, or nested higher derivatives
depending on what the variables are bound to.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from . import jet

__all__ = [
    "ExprError",
    "LexError",
    "ParseError",
    "EvaluationError",
    "Token",
    "Expr",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "FUNCTIONS",
    "tokenize",
    "parse",
    "parse_tokens",
    "evaluate",
    "to_source",
    "dump",
    "variables",
]


class ExprError(ValueError):
    """Base class for expression errors; ``offset`` points into the source."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


class LexError(ExprError):
    pass


class ParseError(ExprError):
    pass


class EvaluationError(ExprError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # number | identifier | operator | paren | comma | end
    lexeme: str
    offset: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<identifier>[A-Za-z][A-Za-z0-9_]*)
  | (?P<operator>[-+*/^])
  | (?P<paren>[()])
  | (?P<comma>,)
    """,
    re.VERBOSE,
)


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens (whitespace dropped, no end marker)."""
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise LexError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    return tokens


# -- syntax tree ---------------------------------------------------------


class Expr:
    """Immutable expression tree node."""

    __slots__ = ()

    def eval(self, env):  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True)
class Num(Expr):
    value: float

    def eval(self, env):
        return self.value


@dataclass(frozen=True)
class Var(Expr):
    name: str
    offset: int = field(default=-1, compare=False)

    def eval(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {self.name!r}", self.offset) from None


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def eval(self, env):
        return -self.operand.eval(env)


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    offset: int = field(default=-1, compare=False)

    def eval(self, env):
        a = self.left.eval(env)
        b = self.right.eval(env)
        op = self.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        try:
            if op == "/":
                if jet.real_part(b) == 0.0:
                    raise ZeroDivisionError("division by zero")
                return a / b
            return jet.power(a, b)
        except (ZeroDivisionError, jet.TowerDomainError, OverflowError) as exc:
            raise EvaluationError(str(exc), self.offset) from None


def _pow2(x, y):
    return jet.power(x, y)


FUNCTIONS = {
    "sin": (1, jet.sin),
    "cos": (1, jet.cos),
    "tan": (1, jet.tan),
    "exp": (1, jet.exp),
    "log": (1, jet.log),
    "sqrt": (1, jet.sqrt),
    "pow": (2, _pow2),
}


@dataclass(frozen=True)
class Call(Expr):
    func: str
    args: tuple
    offset: int = field(default=-1, compare=False)

    def eval(self, env):
        values = [a.eval(env) for a in self.args]
        try:
            return FUNCTIONS[self.func][1](*values)
        except (ZeroDivisionError, jet.TowerDomainError, OverflowError, ValueError) as exc:
            raise EvaluationError(f"{self.func}: {exc}", self.offset) from None


# -- parser --------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token], length: int):
        self.tokens = tokens
        self.pos = 0
        self.end = Token("end", "", length)

    def peek(self) -> Token:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else self.end

    def take(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, kind: str, lexeme: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind or tok.lexeme != lexeme:
            found = "end of input" if tok.kind == "end" else repr(tok.lexeme)
            raise ParseError(f"expected {what}, found {found}", tok.offset)
        return self.take()

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind == "operator" and self.peek().lexeme in "+-":
            tok = self.take()
            node = BinOp(tok.lexeme, node, self.term(), tok.offset)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind == "operator" and self.peek().lexeme in "*/":
            tok = self.take()
            node = BinOp(tok.lexeme, node, self.unary(), tok.offset)
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "operator" and tok.lexeme == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        tok = self.peek()
        if tok.kind == "operator" and tok.lexeme == "^":
            self.take()
            return BinOp("^", base, self.unary(), tok.offset)
        return base

    def primary(self) -> Expr:
        tok = self.take()
        if tok.kind == "number":
            return Num(float(tok.lexeme))
        if tok.kind == "identifier":
            nxt = self.peek()
            if nxt.kind == "paren" and nxt.lexeme == "(":
                return self.call(tok)
            if tok.lexeme in FUNCTIONS:
                raise ParseError(f"function {tok.lexeme!r} must be called with '('", nxt.offset)
            return Var(tok.lexeme, tok.offset)
        if tok.kind == "paren" and tok.lexeme == "(":
            inner = self.expr()
            self.expect("paren", ")", f"')' to close '(' at offset {tok.offset}")
            return inner
        found = "end of input" if tok.kind == "end" else repr(tok.lexeme)
        raise ParseError(f"expected a number, variable, function call or '(', found {found}", tok.offset)

    def call(self, name: Token) -> Expr:
        if name.lexeme not in FUNCTIONS:
            raise ParseError(f"unknown function {name.lexeme!r}", name.offset)
        open_tok = self.take()
        args = [self.expr()]
        while self.peek().kind == "comma":
            self.take()
            args.append(self.expr())
        self.expect("paren", ")", f"')' to close '(' at offset {open_tok.offset}")
        arity = FUNCTIONS[name.lexeme][0]
        if len(args) != arity:
            raise ParseError(f"{name.lexeme} takes {arity} argument(s), got {len(args)}", name.offset)
        return Call(name.lexeme, tuple(args), name.offset)


def parse_tokens(tokens: list[Token], length: int | None = None) -> Expr:
    """Parse a token stream produced by :func:`tokenize`."""
    if length is None:
        length = tokens[-1].offset + len(tokens[-1].lexeme) if tokens else 0
    p = _Parser(tokens, length)
    if not tokens:
        raise ParseError("empty expression", 0)
    node = p.expr()
    tok = p.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected {tok.lexeme!r} after complete expression", tok.offset)
    return node


def parse(source: str) -> Expr:
    return parse_tokens(tokenize(source), len(source))


def evaluate(e: Expr, bindings: Mapping[str, object]):
    """Evaluate ``e`` with variables bound to tower values."""
    return e.eval(bindings)


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Call):
        return set().union(*(variables(a) for a in e.args))
    return set()


# -- printing ------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}
_NAMES = {"+": "Add", "-": "Sub", "*": "Mul", "/": "Div", "^": "Pow"}


def _fmt_number(v: float) -> str:
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def to_source(e: Expr) -> str:
    """Render ``e`` with the minimal parentheses that parse back to the same tree."""

    def wrap(child: Expr, need: bool) -> str:
        s = to_source(child)
        return f"({s})" if need else s

    if isinstance(e, Num):
        s = _fmt_number(e.value)
        return f"({s})" if e.value < 0 else s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({', '.join(to_source(a) for a in e.args)})"
    if isinstance(e, Neg):
        return "-" + wrap(e.operand, _prec(e.operand) < _PREC["neg"])
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        if e.op == "^":
            left = wrap(e.left, _prec(e.left) <= p)
            right = wrap(e.right, _prec(e.right) < _PREC["neg"])
            return f"{left}^{right}"
        left = wrap(e.left, _prec(e.left) < p)
        right = wrap(e.right, _prec(e.right) <= p)
        sep = f" {e.op} " if p == 1 else e.op
        return f"{left}{sep}{right}"
    raise TypeError(f"not an expression: {e!r}")


def dump(e: Expr) -> str:
    """Structural rendering used for golden parse-tree files."""
    if isinstance(e, Num):
        return f"Num({_fmt_number(e.value)})"
    if isinstance(e, Var):
        return f"Var({e.name})"
    if isinstance(e, Neg):
        return f"Neg({dump(e.operand)})"
    if isinstance(e, BinOp):
        return f"{_NAMES[e.op]}({dump(e.left)}, {dump(e.right)})"
    if isinstance(e, Call):
        return f"Call({e.func}, {', '.join(dump(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")
