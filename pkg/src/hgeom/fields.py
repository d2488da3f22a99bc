"""Scalar-field expression DSL.

Manifest files define metric components, structure components, domain
constraints and gauge functions as text.  This module parses that text into
immutable expression trees, prints trees back to canonical text, and
evaluates trees either on scalar jets (value + gradient + Hessian) or on
plain floats.

Grammar (standard precedence, ``^`` binds tightest and is right
associative; ``*`` ``/`` and ``+`` ``-`` are left associative)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ['^' unary]
    atom   := NUMBER | 'pi' | 'u'<k> | FUNC '(' expr ')' | '(' expr ')'

Functions are the analytic primitives of the jet kernel (``sinh``, ``cosh``,
``tanh``, ``coth``, ``sin``, ``cos``, ``tan``, ``exp``, ``ln``, ``sqrt``).
Exponents are constant-folded at parse time and must be integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .jets import DomainError, ScalarJet, UNARY_PRIMITIVES, constant

__all__ = [
    "ParseError",
    "FieldExpr",
    "Num",
    "Var",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Neg",
    "PowInt",
    "Call",
    "parse_scalar_field",
    "format_scalar_field",
    "evaluate_scalar_field",
    "evaluate_scalar_value",
]

FUNCTION_NAMES = tuple(sorted(set(UNARY_PRIMITIVES) - {"neg"}))


class ParseError(ValueError):
    """Expression text could not be parsed; carries a 0-based position."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (position {position})")


# -- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based coordinate index


@dataclass(frozen=True)
class Add:
    a: "Node"
    b: "Node"


@dataclass(frozen=True)
class Sub:
    a: "Node"
    b: "Node"


@dataclass(frozen=True)
class Mul:
    a: "Node"
    b: "Node"


@dataclass(frozen=True)
class Div:
    a: "Node"
    b: "Node"


@dataclass(frozen=True)
class Neg:
    a: "Node"


@dataclass(frozen=True)
class PowInt:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"


Node = Union[Num, Var, Add, Sub, Mul, Div, Neg, PowInt, Call]


@dataclass(frozen=True)
class FieldExpr:
    """A parsed scalar field over a chart of fixed dimension."""

    ast: Node
    dim: int


# -- lexer ------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # NUM | IDENT | OP | LPAREN | RPAREN | END
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            tokens.append(_Token("NUM", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("IDENT", text[i:j], i))
            i = j
            continue
        if ch in "+-*/^":
            tokens.append(_Token("OP", ch, i))
            i += 1
            continue
        if ch == "(":
            tokens.append(_Token("LPAREN", ch, i))
            i += 1
            continue
        if ch == ")":
            tokens.append(_Token("RPAREN", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("END", "", n))
    return tokens


# -- parser -----------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token], dim: int):
        self.tokens = tokens
        self.k = 0
        self.dim = dim

    def peek(self) -> _Token:
        return self.tokens[self.k]

    def advance(self) -> _Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {what}", tok.pos)
        return self.advance()

    def parse_expr(self) -> Node:
        node = self.parse_term()
        while self.peek().kind == "OP" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.parse_term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def parse_term(self) -> Node:
        node = self.parse_unary()
        while self.peek().kind == "OP" and self.peek().text in "*/":
            op = self.advance().text
            rhs = self.parse_unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def parse_unary(self) -> Node:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Node:
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "^":
            caret = self.advance()
            exponent = self.parse_unary()
            folded = _fold_constant(exponent)
            if folded is None or not float(folded).is_integer():
                raise ParseError("exponent must be a constant integer", caret.pos)
            return PowInt(base, int(folded))
        return base

    def parse_atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "NUM":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "IDENT":
            self.advance()
            name = tok.text
            if name == "pi":
                return Num(math.pi)
            if name in FUNCTION_NAMES:
                self.expect("LPAREN", f"'(' after function {name!r}")
                arg = self.parse_expr()
                self.expect("RPAREN", "')'")
                return Call(name, arg)
            if len(name) > 1 and name[0] == "u" and name[1:].isdigit() and name[1] != "0":
                index = int(name[1:])
                if index > self.dim:
                    raise ParseError(
                        f"variable {name!r} exceeds chart dimension {self.dim}", tok.pos
                    )
                return Var(index - 1)
            raise ParseError(f"unknown identifier {name!r}", tok.pos)
        if tok.kind == "LPAREN":
            self.advance()
            node = self.parse_expr()
            self.expect("RPAREN", "')'")
            return node
        raise ParseError("expected expression", tok.pos)


def _fold_constant(node: Node) -> float | None:
    """Evaluate a constant subtree, or return None if it contains variables."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg):
        v = _fold_constant(node.a)
        return None if v is None else -v
    if isinstance(node, (Add, Sub, Mul, Div)):
        a = _fold_constant(node.a)
        b = _fold_constant(node.b)
        if a is None or b is None:
            return None
        if isinstance(node, Add):
            return a + b
        if isinstance(node, Sub):
            return a - b
        if isinstance(node, Mul):
            return a * b
        return None if b == 0.0 else a / b
    if isinstance(node, PowInt):
        v = _fold_constant(node.base)
        if v is None or (v == 0.0 and node.exponent < 0):
            return None
        return float(v**node.exponent)
    return None


def parse_scalar_field(text: str, dim: int) -> FieldExpr:
    """Parse expression text over a chart of ``dim`` coordinates u1..u{dim}."""
    if dim < 1:
        raise ValueError("chart dimension must be at least 1")
    if not text.strip():
        raise ParseError("empty expression", 0)
    parser = _Parser(_tokenize(text), dim)
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing.kind != "END":
        raise ParseError(f"unexpected trailing input {trailing.text!r}", trailing.pos)
    return FieldExpr(node, dim)


# -- printer ----------------------------------------------------------------

_PRECEDENCE = {
    Add: 1,
    Sub: 1,
    Mul: 2,
    Div: 2,
    Neg: 3,
    PowInt: 5,
    Num: 10,
    Var: 10,
    Call: 10,
}


def _prec(node: Node) -> int:
    return _PRECEDENCE[type(node)]


def _wrap(node: Node, minimum: int) -> str:
    text = _print(node)
    return f"({text})" if _prec(node) < minimum else text


def _print(node: Node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"u{node.index + 1}"
    if isinstance(node, Call):
        return f"{node.name}({_print(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.a, 3)
    if isinstance(node, Add):
        return f"{_wrap(node.a, 1)}+{_wrap(node.b, 2)}"
    if isinstance(node, Sub):
        return f"{_wrap(node.a, 1)}-{_wrap(node.b, 2)}"
    if isinstance(node, Mul):
        return f"{_wrap(node.a, 2)}*{_wrap(node.b, 3)}"
    if isinstance(node, Div):
        return f"{_wrap(node.a, 2)}/{_wrap(node.b, 3)}"
    if isinstance(node, PowInt):
        return f"{_wrap(node.base, 6)}^{node.exponent}"
    raise TypeError(f"unknown node {node!r}")


def format_scalar_field(expr: FieldExpr) -> str:
    """Print a parsed field as canonical text; reparsing reproduces the tree."""
    return _print(expr.ast)


# -- evaluation -------------------------------------------------------------


def _eval_jet(node: Node, jets: Sequence[ScalarJet], dim: int) -> ScalarJet:
    if isinstance(node, Num):
        return constant(node.value, dim)
    if isinstance(node, Var):
        return jets[node.index]
    if isinstance(node, Add):
        return _eval_jet(node.a, jets, dim) + _eval_jet(node.b, jets, dim)
    if isinstance(node, Sub):
        return _eval_jet(node.a, jets, dim) - _eval_jet(node.b, jets, dim)
    if isinstance(node, Mul):
        return _eval_jet(node.a, jets, dim) * _eval_jet(node.b, jets, dim)
    if isinstance(node, Div):
        return _eval_jet(node.a, jets, dim) / _eval_jet(node.b, jets, dim)
    if isinstance(node, Neg):
        return -_eval_jet(node.a, jets, dim)
    if isinstance(node, PowInt):
        return _eval_jet(node.base, jets, dim) ** node.exponent
    if isinstance(node, Call):
        return UNARY_PRIMITIVES[node.name](_eval_jet(node.arg, jets, dim))
    raise TypeError(f"unknown node {node!r}")


def evaluate_scalar_field(expr: FieldExpr, jets: Sequence[ScalarJet]) -> ScalarJet:
    """Evaluate a parsed field on seeded coordinate jets."""
    if len(jets) != expr.dim:
        raise ValueError(
            f"expression over {expr.dim} coordinates evaluated with {len(jets)} jets"
        )
    return _eval_jet(expr.ast, jets, expr.dim)


_VALUE_FUNCTIONS = {
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
}


def _eval_value(node: Node, coords: Sequence[float]) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return float(coords[node.index])
    if isinstance(node, Add):
        return _eval_value(node.a, coords) + _eval_value(node.b, coords)
    if isinstance(node, Sub):
        return _eval_value(node.a, coords) - _eval_value(node.b, coords)
    if isinstance(node, Mul):
        return _eval_value(node.a, coords) * _eval_value(node.b, coords)
    if isinstance(node, Div):
        a = _eval_value(node.a, coords)
        b = _eval_value(node.b, coords)
        if b == 0.0:
            raise DomainError("div", 0.0)
        return a / b
    if isinstance(node, Neg):
        return -_eval_value(node.a, coords)
    if isinstance(node, PowInt):
        base = _eval_value(node.base, coords)
        if base == 0.0 and node.exponent < 0:
            raise DomainError("pow-int", 0.0)
        return float(base**node.exponent)
    if isinstance(node, Call):
        t = _eval_value(node.arg, coords)
        if node.name in _VALUE_FUNCTIONS:
            return _VALUE_FUNCTIONS[node.name](t)
        if node.name == "coth":
            s = math.sinh(t)
            if s == 0.0:
                raise DomainError("coth", t)
            return math.cosh(t) / s
        if node.name == "tan":
            if math.cos(t) == 0.0:
                raise DomainError("tan", t)
            return math.tan(t)
        if node.name == "ln":
            if t <= 0.0:
                raise DomainError("ln", t)
            return math.log(t)
        if node.name == "sqrt":
            if t <= 0.0:
                raise DomainError("sqrt", t)
            return math.sqrt(t)
        raise TypeError(f"unknown function {node.name!r}")
    raise TypeError(f"unknown node {node!r}")


def evaluate_scalar_value(expr: FieldExpr, coords: Sequence[float]) -> float:
    """Evaluate the plain value of a field (no derivatives); used by sampling."""
    if len(coords) != expr.dim:
        raise ValueError(
            f"expression over {expr.dim} coordinates evaluated with {len(coords)} values"
        )
    return _eval_value(expr.ast, coords)
