# core/expressions.py
"""
Коммутаторные выражения над генераторами pc-группы.

    [x, y, z]      левонормированный коммутатор [[x,y],z]
    x^a  x^(a b)   сопряжение
    x^2  x^-1      степень
    x y            произведение
    g12            генератор по метке; id - единица
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .exceptions import ExpressionSyntaxError
from .pc_engine import (
    PcElement, PcPresentation,
    commutator, conjugate, generator, identity, left_normed_commutator, multiply, power,
)

_TOKEN_RE = re.compile(r"\s*(?:(?P<int>-?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[\[\](),^]))")
_GEN_RE = re.compile(r"g(\d+)\Z")


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Product:
    factors: tuple["Expr", ...]


@dataclass(frozen=True)
class Power:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Conjugate:
    base: "Expr"
    by: "Expr"


@dataclass(frozen=True)
class Commutator:
    items: tuple["Expr", ...]


Expr = Union[Name, Product, Power, Conjugate, Commutator]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected {text[pos:].strip()[:1]!r} at position {pos + 1}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, value: str | None = None) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ExpressionSyntaxError(f"unexpected end of expression {self.text!r}")
        if value is not None and tok[1] != value:
            raise ExpressionSyntaxError(f"expected {value!r} at position {tok[2]}, got {tok[1]!r}")
        self.pos += 1
        return tok

    def product(self) -> Expr:
        factors = []
        while True:
            tok = self.peek()
            if tok is None or tok[1] in (",", "]", ")"):
                break
            factors.append(self.factor())
        if not factors:
            tok = self.peek()
            where = f"position {tok[2]}" if tok else "end"
            raise ExpressionSyntaxError(f"empty expression at {where}")
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self) -> Expr:
        node = self.atom()
        while self.peek() and self.peek()[1] == "^":
            self.take("^")
            tok = self.peek()
            if tok is None:
                raise ExpressionSyntaxError("missing exponent after '^'")
            if tok[0] == "int":
                self.take()
                node = Power(node, int(tok[1]))
            else:
                node = Conjugate(node, self.atom())
        return node

    def atom(self) -> Expr:
        kind, value, col = self.take()
        if kind == "name":
            return Name(value)
        if value == "(":
            inner = self.product()
            self.take(")")
            return inner
        if value == "[":
            items = [self.product()]
            while self.peek() and self.peek()[1] == ",":
                self.take(",")
                items.append(self.product())
            self.take("]")
            if len(items) < 2:
                raise ExpressionSyntaxError(f"commutator at position {col} needs at least two entries")
            return Commutator(tuple(items))
        raise ExpressionSyntaxError(f"unexpected {value!r} at position {col}")


def parse_expression(text: str) -> Expr:
    parser = _Parser(text)
    expr = parser.product()
    if parser.peek() is not None:
        tok = parser.peek()
        raise ExpressionSyntaxError(f"unexpected {tok[1]!r} at position {tok[2]}")
    return expr


def evaluate(p: PcPresentation, expr: Expr | str, names: Mapping[str, PcElement] | None = None,
             fuel: int | None = None) -> PcElement:
    """Значение выражения в группе p; names - именованные элементы (x, a, ...)."""
    if isinstance(expr, str):
        expr = parse_expression(expr)
    names = names or {}

    def ev(node: Expr) -> PcElement:
        if isinstance(node, Name):
            if node.name in names:
                return names[node.name]
            if node.name == "id":
                return identity(p)
            m = _GEN_RE.match(node.name)
            if m:
                return generator(p, int(m.group(1)))
            raise ExpressionSyntaxError(f"unknown name {node.name!r} in {p.name}")
        if isinstance(node, Product):
            acc = identity(p)
            for f in node.factors:
                acc = multiply(p, acc, ev(f), fuel)
            return acc
        if isinstance(node, Power):
            return power(p, ev(node.base), node.exponent, fuel)
        if isinstance(node, Conjugate):
            return conjugate(p, ev(node.base), ev(node.by), fuel)
        values = [ev(item) for item in node.items]
        if len(values) == 2:
            return commutator(p, values[0], values[1], fuel)
        return left_normed_commutator(p, values, fuel)

    return ev(expr)


def format_expression(expr: Expr) -> str:
    if isinstance(expr, Name):
        return expr.name
    if isinstance(expr, Product):
        return " ".join(_wrapped(f) for f in expr.factors)
    if isinstance(expr, Power):
        return f"{_wrapped(expr.base)}^{expr.exponent}"
    if isinstance(expr, Conjugate):
        by = expr.by if isinstance(expr.by, (Name, Commutator)) else None
        return f"{_wrapped(expr.base)}^{format_expression(by) if by else '(' + format_expression(expr.by) + ')'}"
    return "[" + ",".join(format_expression(i) for i in expr.items) + "]"


def _wrapped(expr: Expr) -> str:
    if isinstance(expr, Product):
        return f"({format_expression(expr)})"
    return format_expression(expr)
