"""Scalar expressions over chart coordinates x1..xn.

Expressions are parsed into small immutable trees and evaluated either to a
plain float or to a second-order jet (value, gradient, Hessian).  Jet
arithmetic is truncated Taylor arithmetic, so derivatives are exact to
machine rounding; nothing here uses finite differences.

Grammar (ASCII only)::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | x<k> | func '(' expr (',' expr)* ')' | '(' expr ')'

Precedence: '^' over unary minus over '*','/' over '+','-'.
Variables are fixed names x1..xn; there are no user-defined identifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "ExprError",
    "ExprSyntaxError",
    "ExprDomainError",
    "ExprAst",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "Jet2",
    "parse",
    "to_string",
    "eval_value",
    "eval_jet2",
    "variables_used",
    "shift_variables",
]

# Functions accepted in call position, with their arity.
FUNCTIONS = {
    "exp": 1,
    "log": 1,
    "sin": 1,
    "cos": 1,
    "sinh": 1,
    "cosh": 1,
    "sqrt": 1,
    "pow": 2,
}


class ExprError(ValueError):
    """Base class for expression parsing/evaluation failures."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class ExprDomainError(ExprError):
    """Evaluation left the function's domain (log/sqrt/division)."""

    def __init__(self, message: str, node: "ExprAst"):
        super().__init__(f"{message} in '{to_string(node)}'")
        self.node = node


# --------------------------------------------------------------------------
# AST
#
# Nodes compare structurally; source offsets are carried for error messages
# but excluded from equality so that parse/print round trips compare equal.

@dataclass(frozen=True)
class Const:
    value: float
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    index: int  # 1-based: x1..xn
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "ExprAst"
    right: "ExprAst"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    offset: int = field(default=0, compare=False)


ExprAst = Union[Const, Var, Neg, BinOp, Call]


# --------------------------------------------------------------------------
# Tokenizer

_TOKEN_OPS = set("+-*/^(),")


def _tokenize(text: str):
    if not text.isascii():
        raise ExprSyntaxError("only ASCII input is supported", 0)
    tokens = []  # (kind, value, offset)
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _TOKEN_OPS:
            tokens.append(("op", c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lit = text[i:j]
            try:
                value = float(lit)
            except ValueError:
                raise ExprSyntaxError(f"bad number literal '{lit}'", i) from None
            tokens.append(("num", value, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character '{c}'", i)
    tokens.append(("end", "", n))
    return tokens


# --------------------------------------------------------------------------
# Parser (recursive descent, precedence by grammar level)

class _Parser:
    def __init__(self, tokens, dimension: int):
        self.tokens = tokens
        self.pos = 0
        self.dimension = dimension

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, value, offset = self.peek()
        if kind != "op" or value != op:
            raise ExprSyntaxError(f"expected '{op}'", offset)
        return self.advance()

    def parse_expr(self) -> ExprAst:
        node = self.parse_term()
        while True:
            kind, value, offset = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.parse_term()
                node = BinOp(value, node, rhs, offset)
            else:
                return node

    def parse_term(self) -> ExprAst:
        node = self.parse_unary()
        while True:
            kind, value, offset = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                rhs = self.parse_unary()
                node = BinOp(value, node, rhs, offset)
            else:
                return node

    def parse_unary(self) -> ExprAst:
        kind, value, offset = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.parse_unary(), offset)
        return self.parse_power()

    def parse_power(self) -> ExprAst:
        node = self.parse_atom()
        kind, value, offset = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            # exponent may itself carry a unary minus: x^-2
            rhs = self.parse_unary()
            node = BinOp("^", node, rhs, offset)
        return node

    def parse_atom(self) -> ExprAst:
        kind, value, offset = self.advance()
        if kind == "num":
            return Const(value, offset)
        if kind == "op" and value == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        if kind == "name":
            if value in FUNCTIONS:
                self.expect_op("(")
                args = [self.parse_expr()]
                while True:
                    k, v, o = self.peek()
                    if k == "op" and v == ",":
                        self.advance()
                        args.append(self.parse_expr())
                    else:
                        break
                self.expect_op(")")
                if len(args) != FUNCTIONS[value]:
                    raise ExprSyntaxError(
                        f"{value} takes {FUNCTIONS[value]} argument(s), got {len(args)}",
                        offset,
                    )
                return Call(value, tuple(args), offset)
            if value.startswith("x") and value[1:].isdigit():
                index = int(value[1:])
                if not 1 <= index <= self.dimension:
                    raise ExprSyntaxError(
                        f"variable {value} out of range for dimension {self.dimension}",
                        offset,
                    )
                return Var(index, offset)
            raise ExprSyntaxError(f"unknown identifier '{value}'", offset)
        raise ExprSyntaxError("expected a value", offset)


def parse(text: str, dimension: int) -> ExprAst:
    """Parse ``text`` into an expression tree over x1..x<dimension>."""
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    if not 1 <= dimension <= 16:
        raise ExprError(f"dimension must be in 1..16, got {dimension}")
    parser = _Parser(_tokenize(text), dimension)
    node = parser.parse_expr()
    kind, value, offset = parser.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected trailing input '{value}'", offset)
    return node


# --------------------------------------------------------------------------
# Printing (minimal parentheses; reparsing yields an equal tree)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _print(node: ExprAst, parent_prec: int, right_of: str | None) -> str:
    if isinstance(node, Const):
        if node.value >= 0:
            return repr(node.value) if node.value != int(node.value) else str(int(node.value))
        return f"({node.value})"
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        inner = _print(node.operand, _PREC["neg"], None)
        text = f"-{inner}"
        return f"({text})" if parent_prec > _PREC["neg"] else text
    if isinstance(node, Call):
        args = ", ".join(_print(a, 0, None) for a in node.args)
        return f"{node.name}({args})"
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        if node.op == "^":
            left = _print(node.left, prec + 1, None)
            right = _print(node.right, prec, None)
        else:
            left = _print(node.left, prec, None)
            # left-associative: right operand needs one level more
            right = _print(node.right, prec + 1, node.op)
        text = f"{left} {node.op} {right}" if node.op in "+-" else f"{left}{node.op}{right}"
        return f"({text})" if parent_prec > prec else text
    raise TypeError(f"not an expression node: {node!r}")


def to_string(node: ExprAst) -> str:
    """Render a tree back to source text."""
    return _print(node, 0, None)


def variables_used(node: ExprAst) -> set[int]:
    """Set of 1-based variable indices appearing in the tree."""
    if isinstance(node, Var):
        return {node.index}
    if isinstance(node, Neg):
        return variables_used(node.operand)
    if isinstance(node, BinOp):
        return variables_used(node.left) | variables_used(node.right)
    if isinstance(node, Call):
        out: set[int] = set()
        for a in node.args:
            out |= variables_used(a)
        return out
    return set()


def shift_variables(node: ExprAst, offset: int) -> ExprAst:
    """Return a copy with every variable index increased by ``offset``."""
    if isinstance(node, Const):
        return node
    if isinstance(node, Var):
        return Var(node.index + offset, node.offset)
    if isinstance(node, Neg):
        return Neg(shift_variables(node.operand, offset), node.offset)
    if isinstance(node, BinOp):
        return BinOp(
            node.op,
            shift_variables(node.left, offset),
            shift_variables(node.right, offset),
            node.offset,
        )
    if isinstance(node, Call):
        return Call(node.name, tuple(shift_variables(a, offset) for a in node.args), node.offset)
    raise TypeError(f"not an expression node: {node!r}")


# --------------------------------------------------------------------------
# Second-order jets

@dataclass
class Jet2:
    """Value with exact first and second derivatives at a point.

    ``hessian`` is exactly symmetric: every arithmetic rule below builds it
    from symmetric pieces (outer(a,b) + outer(b,a) is bit-symmetric).
    """

    value: float
    gradient: np.ndarray  # shape (n,)
    hessian: np.ndarray   # shape (n, n)

    @staticmethod
    def constant(value: float, n: int) -> "Jet2":
        return Jet2(float(value), np.zeros(n), np.zeros((n, n)))

    @staticmethod
    def variable(value: float, index: int, n: int) -> "Jet2":
        g = np.zeros(n)
        g[index] = 1.0
        return Jet2(float(value), g, np.zeros((n, n)))


def _j_add(a: Jet2, b: Jet2) -> Jet2:
    return Jet2(a.value + b.value, a.gradient + b.gradient, a.hessian + b.hessian)


def _j_sub(a: Jet2, b: Jet2) -> Jet2:
    return Jet2(a.value - b.value, a.gradient - b.gradient, a.hessian - b.hessian)


def _j_mul(a: Jet2, b: Jet2) -> Jet2:
    cross = np.outer(a.gradient, b.gradient)
    return Jet2(
        a.value * b.value,
        a.value * b.gradient + b.value * a.gradient,
        a.value * b.hessian + b.value * a.hessian + cross + cross.T,
    )


def _j_chain(u: Jet2, f, df, d2f) -> Jet2:
    # f(u): f' u'' + f'' u' (x) u'
    outer = np.outer(u.gradient, u.gradient)
    return Jet2(f, df * u.gradient, df * u.hessian + d2f * outer)


def _j_div(a: Jet2, b: Jet2, node: ExprAst) -> Jet2:
    if b.value == 0.0:
        raise ExprDomainError("division by zero", node)
    inv = _j_chain(b, 1.0 / b.value, -1.0 / b.value**2, 2.0 / b.value**3)
    return _j_mul(a, inv)


def _j_pow_const(x: Jet2, c: float, node: ExprAst) -> Jet2:
    if c == 0.0:
        return Jet2.constant(1.0, len(x.gradient))
    try:
        f = x.value**c
        df = c * x.value ** (c - 1.0) if c != 0.0 else 0.0
        d2f = c * (c - 1.0) * x.value ** (c - 2.0) if c not in (0.0, 1.0) else 0.0
    except (ZeroDivisionError, OverflowError):
        raise ExprDomainError(f"power x^{c} undefined here", node) from None
    if isinstance(f, complex) or isinstance(df, complex) or isinstance(d2f, complex):
        raise ExprDomainError(f"power x^{c} of negative base", node)
    return _j_chain(x, f, df, d2f)


def _j_pow(base: Jet2, expo: Jet2, node: ExprAst) -> Jet2:
    # Constant exponent keeps negative bases legal (integer powers).
    if not expo.gradient.any() and not expo.hessian.any():
        return _j_pow_const(base, expo.value, node)
    if base.value <= 0.0:
        raise ExprDomainError("x^y with varying exponent needs positive base", node)
    log_b = _j_chain(base, np.log(base.value), 1.0 / base.value, -1.0 / base.value**2)
    prod = _j_mul(expo, log_b)
    return _j_chain(prod, np.exp(prod.value), np.exp(prod.value), np.exp(prod.value))


def _j_call(name: str, u: Jet2, node: ExprAst) -> Jet2:
    v = u.value
    if name == "exp":
        e = np.exp(v)
        return _j_chain(u, e, e, e)
    if name == "log":
        if v <= 0.0:
            raise ExprDomainError("log of non-positive value", node)
        return _j_chain(u, np.log(v), 1.0 / v, -1.0 / v**2)
    if name == "sin":
        return _j_chain(u, np.sin(v), np.cos(v), -np.sin(v))
    if name == "cos":
        return _j_chain(u, np.cos(v), -np.sin(v), -np.cos(v))
    if name == "sinh":
        return _j_chain(u, np.sinh(v), np.cosh(v), np.sinh(v))
    if name == "cosh":
        return _j_chain(u, np.cosh(v), np.sinh(v), np.cosh(v))
    if name == "sqrt":
        if v <= 0.0:
            raise ExprDomainError("sqrt of non-positive value", node)
        r = np.sqrt(v)
        return _j_chain(u, r, 0.5 / r, -0.25 / (r * v))
    raise ExprError(f"unknown function '{name}'")


def _eval_jet(node: ExprAst, point: np.ndarray) -> Jet2:
    n = len(point)
    if isinstance(node, Const):
        return Jet2.constant(node.value, n)
    if isinstance(node, Var):
        return Jet2.variable(point[node.index - 1], node.index - 1, n)
    if isinstance(node, Neg):
        u = _eval_jet(node.operand, point)
        return Jet2(-u.value, -u.gradient, -u.hessian)
    if isinstance(node, BinOp):
        a = _eval_jet(node.left, point)
        b = _eval_jet(node.right, point)
        if node.op == "+":
            return _j_add(a, b)
        if node.op == "-":
            return _j_sub(a, b)
        if node.op == "*":
            return _j_mul(a, b)
        if node.op == "/":
            return _j_div(a, b, node)
        if node.op == "^":
            return _j_pow(a, b, node)
        raise ExprError(f"unknown operator '{node.op}'")
    if isinstance(node, Call):
        if node.name == "pow":
            a = _eval_jet(node.args[0], point)
            b = _eval_jet(node.args[1], point)
            return _j_pow(a, b, node)
        return _j_call(node.name, _eval_jet(node.args[0], point), node)
    raise TypeError(f"not an expression node: {node!r}")


def eval_jet2(ast: ExprAst, point) -> Jet2:
    """Evaluate value, gradient and Hessian of ``ast`` at ``point``."""
    pt = np.asarray(point, dtype=float)
    if pt.ndim != 1:
        raise ExprError("point must be a flat coordinate vector")
    top = max(variables_used(ast), default=0)
    if top > len(pt):
        raise ExprError(f"point has {len(pt)} coordinates but expression uses x{top}")
    return _eval_jet(ast, pt)


def eval_value(ast: ExprAst, point) -> float:
    """Evaluate only the value of ``ast`` at ``point``."""
    pt = np.asarray(point, dtype=float)
    return _eval_value(ast, pt)


def _eval_value(node: ExprAst, point: np.ndarray) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return float(point[node.index - 1])
    if isinstance(node, Neg):
        return -_eval_value(node.operand, point)
    if isinstance(node, BinOp):
        a = _eval_value(node.left, point)
        b = _eval_value(node.right, point)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0.0:
                raise ExprDomainError("division by zero", node)
            return a / b
        if node.op == "^":
            try:
                r = a**b
            except (ZeroDivisionError, OverflowError):
                raise ExprDomainError("power undefined here", node) from None
            if isinstance(r, complex):
                raise ExprDomainError("power of negative base", node)
            return r
    if isinstance(node, Call):
        if node.name == "pow":
            return _eval_value(BinOp("^", node.args[0], node.args[1], node.offset), point)
        u = _eval_value(node.args[0], point)
        if node.name == "exp":
            return float(np.exp(u))
        if node.name == "log":
            if u <= 0.0:
                raise ExprDomainError("log of non-positive value", node)
            return float(np.log(u))
        if node.name == "sin":
            return float(np.sin(u))
        if node.name == "cos":
            return float(np.cos(u))
        if node.name == "sinh":
            return float(np.sinh(u))
        if node.name == "cosh":
            return float(np.cosh(u))
        if node.name == "sqrt":
            if u <= 0.0:
                raise ExprDomainError("sqrt of non-positive value", node)
            return float(np.sqrt(u))
    raise TypeError(f"not an expression node: {node!r}")
