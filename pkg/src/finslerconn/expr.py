"""A small expression language for chart-dependent input fields.

Norm functions, one-form components and endomorphism entries all enter the
engine as strings like ``"sqrt(y1^2 + exp(2*x1)*y2^2)"``.  This module
tokenizes and parses them (a Pratt parser with the usual precedence
``^`` > unary ``-`` > ``*``/``/`` > ``+``/``-``), evaluates the AST on
:class:`~finslerconn.ad.ChartJets`, and pretty-prints it back.

Variables are ``x1..xn`` and ``y1..yn`` for the chart dimension ``n``;
functions are ``sqrt``, ``exp``, ``log``, ``sin``, ``cos``, ``abs``.
Exponents of ``^`` must be constant (integer, decimal, or a parenthesized
ratio like ``(3/2)``) so that differentiation stays within the analytic
toolbox.  All syntax errors carry the byte offset of the offending token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .ad import ChartJets, Series

__all__ = [
    "ExprError",
    "Node",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse_expression",
    "format_expression",
    "evaluate",
    "ExprScalarField",
    "ExprCovectorField",
    "ExprMatrixField",
    "FieldSpec",
    "FUNCTIONS",
]

FUNCTIONS = ("sqrt", "exp", "log", "sin", "cos", "abs")


class ExprError(ValueError):
    """Parse or validation failure, with the byte offset into the source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Node:
    offset: int = field(compare=False)


@dataclass(frozen=True)
class Num(Node):
    value: float = 0.0


@dataclass(frozen=True)
class Var(Node):
    kind: str = "x"  # "x" or "y"
    index: int = 1  # 1-based


@dataclass(frozen=True)
class Neg(Node):
    arg: "Node" = None  # type: ignore[assignment]


@dataclass(frozen=True)
class BinOp(Node):
    op: str = "+"
    left: "Node" = None  # type: ignore[assignment]
    right: "Node" = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Call(Node):
    func: str = "sqrt"
    arg: "Node" = None  # type: ignore[assignment]


# ---------------------------------------------------------------------------
# tokens


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "end"
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    out: list[_Token] = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ExprError(f"unexpected character {src[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(_Token("end", "", len(src)))
    return out


_VAR_RE = re.compile(r"^([xy])([1-9][0-9]*)$")

_BINARY_BP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY_BP = 30


class _Parser:
    def __init__(self, src: str, n: int):
        self.src = src
        self.n = n
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise ExprError(f"expected {text!r}", tok.offset)
        return self.advance()

    # Pratt core -----------------------------------------------------------

    def parse(self) -> Node:
        node = self.expression(0)
        tok = self.peek()
        if tok.kind != "end":
            raise ExprError(f"unexpected trailing input {tok.text!r}", tok.offset)
        return node

    def expression(self, rbp: int) -> Node:
        node = self.prefix()
        while True:
            tok = self.peek()
            if tok.kind != "op" or tok.text not in _BINARY_BP:
                break
            lbp = _BINARY_BP[tok.text]
            if lbp <= rbp:
                break
            self.advance()
            if tok.text == "^":
                node = self.finish_power(node, tok)
            else:
                right = self.expression(lbp)
                node = BinOp(tok.offset, tok.text, node, right)
        return node

    def prefix(self) -> Node:
        tok = self.advance()
        if tok.kind == "number":
            return Num(tok.offset, float(tok.text))
        if tok.kind == "ident":
            return self.identifier(tok)
        if tok.kind == "op" and tok.text == "-":
            return Neg(tok.offset, self.expression(_UNARY_BP))
        if tok.kind == "op" and tok.text == "+":
            return self.expression(_UNARY_BP)
        if tok.kind == "op" and tok.text == "(":
            node = self.expression(0)
            self.expect_op(")")
            return node
        raise ExprError(f"unexpected token {tok.text!r}" if tok.text else "unexpected end of input", tok.offset)

    def identifier(self, tok: _Token) -> Node:
        if tok.text in FUNCTIONS:
            self.expect_op("(")
            arg = self.expression(0)
            self.expect_op(")")
            return Call(tok.offset, tok.text, arg)
        m = _VAR_RE.match(tok.text)
        if m is None:
            raise ExprError(f"unknown identifier {tok.text!r}", tok.offset)
        index = int(m.group(2))
        if index > self.n:
            raise ExprError(
                f"variable {tok.text!r} exceeds chart dimension {self.n}", tok.offset
            )
        return Var(tok.offset, m.group(1), index)

    # constant exponents ----------------------------------------------------

    def finish_power(self, base: Node, caret: _Token) -> Node:
        exp_node = self.expression(_BINARY_BP["^"])
        value = _fold_constant(exp_node)
        if value is None:
            raise ExprError("exponent of '^' must be a constant", exp_node.offset)
        return BinOp(caret.offset, "^", base, Num(exp_node.offset, value))


def _fold_constant(node: Node) -> float | None:
    """Evaluate a variable-free subtree to a float, or return None."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg):
        v = _fold_constant(node.arg)
        return None if v is None else -v
    if isinstance(node, BinOp):
        a = _fold_constant(node.left)
        b = _fold_constant(node.right)
        if a is None or b is None:
            return None
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return a**b
    return None


def parse_expression(text: str, n: int) -> Node:
    """Parse ``text`` over the chart variables x1..xn, y1..yn."""
    if n < 1:
        raise ValueError("chart dimension must be at least 1")
    return _Parser(text, n).parse()


# ---------------------------------------------------------------------------
# printing


_PREC = {"+": 10, "-": 10, "*": 20, "/": 20, "neg": 30, "^": 40, "atom": 99}


def _prec_of(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    if isinstance(node, Num) and node.value < 0:
        return _PREC["neg"]
    return _PREC["atom"]


def format_expression(node: Node) -> str:
    """Render an AST back to source; reparsing yields an equal AST."""
    if isinstance(node, Num):
        v = node.value
        if v == int(v) and abs(v) < 1e15:
            return str(int(v))
        return repr(v)
    if isinstance(node, Var):
        return f"{node.kind}{node.index}"
    if isinstance(node, Call):
        return f"{node.func}({format_expression(node.arg)})"
    if isinstance(node, Neg):
        inner = format_expression(node.arg)
        if _prec_of(node.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        lhs = format_expression(node.left)
        rhs = format_expression(node.right)
        p = _PREC[node.op]
        # binary ops associate left; the right operand needs parens at equal
        # precedence, the left only below it ('^' keeps both strict)
        if _prec_of(node.left) < p or (node.op == "^" and _prec_of(node.left) <= p):
            lhs = f"({lhs})"
        if _prec_of(node.right) <= p:
            rhs = f"({rhs})"
        return f"{lhs} {node.op} {rhs}" if node.op in "+-" else f"{lhs}{node.op}{rhs}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# evaluation


def evaluate(node: Node, jets: ChartJets) -> Series:
    """Evaluate an AST to a scalar series on the given chart jets."""
    if isinstance(node, Num):
        return jets.const(node.value)
    if isinstance(node, Var):
        comps = jets.xs if node.kind == "x" else jets.ys
        return comps[node.index - 1]
    if isinstance(node, Neg):
        return -evaluate(node.arg, jets)
    if isinstance(node, Call):
        arg = evaluate(node.arg, jets)
        return getattr(arg, node.func)()
    if isinstance(node, BinOp):
        if node.op == "^":
            assert isinstance(node.right, Num)
            return evaluate(node.left, jets) ** node.right.value
        left = evaluate(node.left, jets)
        right = evaluate(node.right, jets)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        return left / right
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# field adapters


class ExprScalarField:
    """A scalar chart field defined by one expression string."""

    def __init__(self, n: int, text: str):
        self.n = n
        self.text = text
        self._ast = parse_expression(text, n)

    def eval(self, jets: ChartJets) -> Series:
        return evaluate(self._ast, jets)

    def describe(self) -> str:
        return self.text

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"ExprScalarField({self.n}, {self.text!r})"


class ExprCovectorField:
    """A covector field with one expression per component."""

    def __init__(self, n: int, components: Sequence[str]):
        if len(components) != n:
            raise ValueError(f"need {n} components, got {len(components)}")
        self.n = n
        self.components = tuple(components)
        self._asts = [parse_expression(t, n) for t in components]

    def eval(self, jets: ChartJets) -> Series:
        return Series.stack([evaluate(a, jets) for a in self._asts])

    def describe(self) -> str:
        return "[" + ", ".join(self.components) + "]"


class ExprMatrixField:
    """An endomorphism field with one expression per entry (row-major)."""

    def __init__(self, n: int, rows: Sequence[Sequence[str]]):
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"need an {n}x{n} grid of expressions")
        self.n = n
        self.rows = tuple(tuple(r) for r in rows)
        self._asts = [[parse_expression(t, n) for t in row] for row in rows]

    def eval(self, jets: ChartJets) -> Series:
        return Series.stack(
            [Series.stack([evaluate(a, jets) for a in row]) for row in self._asts]
        )

    def describe(self) -> str:
        return "; ".join("[" + ", ".join(r) + "]" for r in self.rows)


@dataclass(frozen=True)
class FieldSpec:
    """A declarative description of a field, convertible to an adapter.

    ``kind`` is ``"scalar"``, ``"covector"`` or ``"matrix"``; ``components``
    holds 1, n, or n*n expression strings (row-major for matrices).
    """

    kind: str
    n: int
    components: tuple[str, ...]

    def build(self):
        if self.kind == "scalar":
            if len(self.components) != 1:
                raise ValueError("scalar FieldSpec needs exactly one expression")
            return ExprScalarField(self.n, self.components[0])
        if self.kind == "covector":
            return ExprCovectorField(self.n, self.components)
        if self.kind == "matrix":
            if len(self.components) != self.n * self.n:
                raise ValueError(f"matrix FieldSpec needs {self.n * self.n} entries")
            rows = [
                self.components[i * self.n : (i + 1) * self.n] for i in range(self.n)
            ]
            return ExprMatrixField(self.n, rows)
        raise ValueError(f"unknown field kind {self.kind!r}")
