"""Arithmetic expressions: parse, evaluate, and render.

Precedence is ^ above * / above + -, with ^ right-associative and the rest
left-associative; parentheses override. Number literals are arbitrary
precision integers, written bare or with a leading '#'. Addition,
subtraction, multiplication, division, and integer exponents are evaluated
exactly (rationals); sqrt and log fall back to 64-bit floats. log is base 10.
'-' is strictly binary: there are no negative literals, though results may be
negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import PdeError

# Guards `calc` against runaway exponentiation; literals and + - * / have no
# size limit.
MAX_EXPONENT = 1_000_000


class NumericError(PdeError):
    pass


class ExprSyntaxError(NumericError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnbalancedParenError(ExprSyntaxError):
    pass


class UnknownFunctionError(ExprSyntaxError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown function {name!r}", position)
        self.name = name


class DivideByZeroError(NumericError):
    pass


class DomainError(NumericError):
    pass


@dataclass(frozen=True)
class Number:
    value: int


@dataclass(frozen=True)
class BinaryOp:
    op: str  # one of + - * / ^
    left: "ExprTree"
    right: "ExprTree"


@dataclass(frozen=True)
class Call:
    func: str  # sqrt or log
    argument: "ExprTree"


@dataclass(frozen=True)
class Paren:
    child: "ExprTree"


ExprTree = Union[Number, BinaryOp, Call, Paren]

FUNCTIONS = ("sqrt", "log")

# Expression token items: (kind, value, position). Kinds: number, op, func,
# lparen, rparen. The block parser feeds the same shape from its own tokens.
ExprItem = tuple[str, object, int]


def lex_expr(text: str) -> list[ExprItem]:
    items: list[ExprItem] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "#":
            start = i
            i += 1
            digits = _take_digits(text, i)
            if not digits:
                raise ExprSyntaxError("'#' must be followed by digits", start)
            i += len(digits)
            items.append(("number", int(digits), start))
        elif ch.isdigit():
            digits = _take_digits(text, i)
            items.append(("number", int(digits), i))
            i += len(digits)
        elif ch.isalpha():
            start = i
            while i < n and text[i].isalpha():
                i += 1
            name = text[start:i]
            if name not in FUNCTIONS:
                raise UnknownFunctionError(name, start)
            items.append(("func", name, start))
        elif ch in "+-*/^":
            items.append(("op", ch, i))
            i += 1
        elif ch == "(":
            items.append(("lparen", ch, i))
            i += 1
        elif ch == ")":
            items.append(("rparen", ch, i))
            i += 1
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    return items


def _take_digits(text: str, i: int) -> str:
    j = i
    while j < len(text) and text[j].isdigit():
        j += 1
    return text[i:j]


class _Parser:
    def __init__(self, items: list[ExprItem]):
        self.items = items
        self.i = 0

    def peek(self) -> ExprItem | None:
        return self.items[self.i] if self.i < len(self.items) else None

    def next(self) -> ExprItem:
        item = self.peek()
        if item is None:
            raise ExprSyntaxError("unexpected end of expression", self._end_pos())
        self.i += 1
        return item

    def _end_pos(self) -> int:
        return self.items[-1][2] + 1 if self.items else 0

    def parse(self) -> ExprTree:
        tree = self.expr()
        rest = self.peek()
        if rest is not None:
            if rest[0] == "rparen":
                raise UnbalancedParenError("unmatched ')'", rest[2])
            raise ExprSyntaxError(f"unexpected {rest[1]!r}", rest[2])
        return tree

    def expr(self) -> ExprTree:
        tree = self.term()
        while (item := self.peek()) and item[0] == "op" and item[1] in "+-":
            self.next()
            tree = BinaryOp(str(item[1]), tree, self.term())
        return tree

    def term(self) -> ExprTree:
        tree = self.power()
        while (item := self.peek()) and item[0] == "op" and item[1] in "*/":
            self.next()
            tree = BinaryOp(str(item[1]), tree, self.power())
        return tree

    def power(self) -> ExprTree:
        base = self.atom()
        item = self.peek()
        if item and item[0] == "op" and item[1] == "^":
            self.next()
            return BinaryOp("^", base, self.power())  # right-associative
        return base

    def atom(self) -> ExprTree:
        kind, value, pos = self.next()
        if kind == "number":
            return Number(int(value))  # type: ignore[arg-type]
        if kind == "func":
            self._expect_lparen(pos)
            inner = self.expr()
            self._expect_rparen(pos)
            return Call(str(value), inner)
        if kind == "lparen":
            inner = self.expr()
            self._expect_rparen(pos)
            return Paren(inner)
        raise ExprSyntaxError(f"unexpected {value!r}", pos)

    def _expect_lparen(self, open_pos: int):
        item = self.peek()
        if item is None or item[0] != "lparen":
            raise ExprSyntaxError("expected '('", item[2] if item else open_pos + 1)
        self.next()

    def _expect_rparen(self, open_pos: int):
        item = self.peek()
        if item is None:
            raise UnbalancedParenError("missing ')'", open_pos)
        if item[0] != "rparen":
            raise ExprSyntaxError(f"expected ')', found {item[1]!r}", item[2])
        self.next()


def parse_expr(text: str) -> ExprTree:
    """Parse an expression string into a tree."""
    items = lex_expr(text)
    if not items:
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(items).parse()


def parse_expr_items(items: list[ExprItem]) -> ExprTree:
    """Parse a pre-lexed item stream (used for expressions inside blocks)."""
    if not items:
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(items).parse()


Numeric = Union[int, Fraction, float]


def _normalize(value: Numeric) -> Numeric:
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    return value


def eval_expr(tree: ExprTree) -> Numeric:
    """Evaluate a tree. Exact for + - * / and integer ^; float for sqrt/log."""
    return _normalize(_eval(tree))


def _eval(tree: ExprTree) -> Numeric:
    if isinstance(tree, Number):
        return tree.value
    if isinstance(tree, Paren):
        return _eval(tree.child)
    if isinstance(tree, Call):
        x = _eval(tree.argument)
        if tree.func == "sqrt":
            if x < 0:
                raise DomainError("square root of a negative number")
            return math.sqrt(x)
        if x <= 0:
            raise DomainError("logarithm of a non-positive number")
        return math.log10(x)
    left = _eval(tree.left)
    right = _eval(tree.right)
    op = tree.op
    if isinstance(left, float) or isinstance(right, float):
        return _eval_float(op, float(left), float(right))
    left_q, right_q = Fraction(left), Fraction(right)
    if op == "+":
        return left_q + right_q
    if op == "-":
        return left_q - right_q
    if op == "*":
        return left_q * right_q
    if op == "/":
        if right_q == 0:
            raise DivideByZeroError("division by zero")
        return left_q / right_q
    # op == "^"
    if right_q.denominator == 1:
        exponent = int(right_q)
        if abs(exponent) > MAX_EXPONENT:
            raise NumericError(f"exponent magnitude above {MAX_EXPONENT}")
        if exponent < 0 and left_q == 0:
            raise DivideByZeroError("zero to a negative power")
        return left_q ** exponent
    return _eval_float("^", float(left_q), float(right_q))


def _eval_float(op: str, left: float, right: float) -> float:
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if right == 0.0:
            raise DivideByZeroError("division by zero")
        return left / right
    try:
        return left ** right
    except (ValueError, OverflowError) as exc:
        raise DomainError(str(exc)) from exc


_ENGLISH_OPS = {
    "+": "plus",
    "-": "minus",
    "*": "multiplied by",
    "/": "divided by",
    "^": "raised to the power of",
}
_ENGLISH_FUNCS = {"sqrt": "square root of", "log": "logarithm of"}


def render_expr(tree: ExprTree, style: str = "english") -> str:
    """Render a tree as English words or as re-parseable symbols."""
    if style == "english":
        return _render(tree, _ENGLISH_OPS, _ENGLISH_FUNCS, func_parens=False)
    if style == "symbols":
        return _render(tree, {op: op for op in _ENGLISH_OPS}, None, func_parens=True)
    raise ValueError(f"unknown style {style!r}")


def _render(tree, ops, funcs, func_parens: bool) -> str:
    if isinstance(tree, Number):
        return str(tree.value)
    if isinstance(tree, Paren):
        return f"({_render(tree.child, ops, funcs, func_parens)})"
    if isinstance(tree, Call):
        inner = _render(tree.argument, ops, funcs, func_parens)
        if func_parens:
            return f"{tree.func}({inner})"
        return f"{funcs[tree.func]} {inner}"
    left = _render(tree.left, ops, funcs, func_parens)
    right = _render(tree.right, ops, funcs, func_parens)
    return f"{left} {ops[tree.op]} {right}"


def format_value(value: Numeric) -> str:
    """Display form of an evaluation result: 4.0 prints as 4, rationals as a/b."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        if value.is_integer() and abs(value) < 1e16:
            return str(int(value))
        return repr(value)
    return str(value)
