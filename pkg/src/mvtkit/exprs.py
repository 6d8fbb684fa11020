"""Parser and evaluators for one-variable real function expressions.

Grammar (whitespace-insensitive, no implicit multiplication)::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := ("-" factor) | power
    power  := atom ("^" factor)?
    atom   := NUMBER | "x" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := "sin" | "cos" | "exp" | "ln" | "sqrt"
    NUMBER := decimal literal with optional fraction and exponent part

``pi`` and ``e`` parse to constant nodes.  ``^`` is right-associative and
binds tighter than unary minus.  A power whose exponent is not a constant is
rewritten at parse time as ``exp(exponent * ln(base))``; constant exponents
stay as power nodes so that integer powers keep an exact evaluation path.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from typing import Union

from . import jets
from .jets import DomainError, Jet

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")
NAMED_CONSTANTS = {"pi": math.pi, "e": math.e}


class ParseError(ValueError):
    """Syntax or name error, carrying the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a FUNC name
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # "add" | "sub" | "mul" | "div" | "pow"
    left: "Expr"
    right: "Expr"


Expr = Union[Constant, Variable, Unary, Binary]

X = Variable()


# -- tokenizer ------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<number>(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^()])
    )""",
    re.VERBOSE,
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            # skip leading blanks manually to report the offending char
            stripped = pos
            while stripped < n and source[stripped].isspace():
                stripped += 1
            if stripped >= n:
                break
            raise ParseError(
                f"unexpected character {source[stripped]!r}", stripped
            )
        pos = m.end()
        if m.lastgroup is None:
            continue
        text = m.group(m.lastgroup)
        tokens.append((m.lastgroup, text, m.start(m.lastgroup)))
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, symbol: str) -> None:
        kind, text, offset = self.peek()
        if kind != "op" or text != symbol:
            raise ParseError(f"expected {symbol!r}", offset)
        self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.parse_term()
                node = Binary("add" if text == "+" else "sub", node, rhs)
            else:
                return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                rhs = self.parse_factor()
                node = Binary("mul" if text == "*" else "div", node, rhs)
            else:
                return node

    def parse_factor(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            inner = self.parse_factor()
            # fold the sign of numeric literals so "x^-2" stays a
            # constant-exponent power
            if isinstance(inner, Constant):
                return Constant(-inner.value)
            return Unary("neg", inner)
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            exponent = self.parse_factor()
            return _make_pow(base, exponent)
        return base

    def parse_atom(self) -> Expr:
        kind, text, offset = self.advance()
        if kind == "number":
            return Constant(float(text))
        if kind == "ident":
            if text == "x":
                return X
            if text in NAMED_CONSTANTS:
                return Constant(NAMED_CONSTANTS[text])
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return Unary(text, arg)
            raise ParseError(f"unknown identifier {text!r}", offset)
        if kind == "op" and text == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ParseError("expected a number, name or parenthesized expression", offset)


def _make_pow(base: Expr, exponent: Expr) -> Expr:
    if isinstance(exponent, Constant):
        return Binary("pow", base, exponent)
    # non-constant exponent: rewrite as exp(exponent * ln(base))
    return Unary("exp", Binary("mul", exponent, Unary("ln", base)))


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree.

    Raises :class:`ParseError` (with byte offset) on malformed input or
    unknown identifiers; the input must be non-empty.
    """
    if not source or source.isspace():
        raise ParseError("empty expression", 0)
    parser = _Parser(source)
    node = parser.parse_expr()
    kind, text, offset = parser.peek()
    if kind != "eof":
        raise ParseError(f"unexpected trailing input {text!r}", offset)
    return node


# -- evaluation -----------------------------------------------------------


def _pow_int_value(base: float, k: int) -> float:
    if k == 0:
        return 1.0
    if k < 0:
        inv = _pow_int_value(base, -k)
        if inv == 0.0:
            raise DomainError(f"negative power of zero base {base!r}")
        return 1.0 / inv
    result = None
    acc = base
    while k:
        if k & 1:
            result = acc if result is None else result * acc
        k >>= 1
        if k:
            acc = acc * acc
    return result


def eval_value(e: Expr, x: float) -> float:
    """Plain real evaluation of the expression at ``x``."""
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, Variable):
        return float(x)
    if isinstance(e, Unary):
        v = eval_value(e.arg, x)
        if e.op == "neg":
            return -v
        if e.op == "exp":
            try:
                return math.exp(v)
            except OverflowError:
                raise DomainError(f"exp overflow at argument {v!r}") from None
        if e.op == "ln":
            if v <= 0.0:
                raise DomainError(f"ln of non-positive value {v!r}")
            return math.log(v)
        if e.op == "sin":
            return math.sin(v)
        if e.op == "cos":
            return math.cos(v)
        if e.op == "sqrt":
            if v < 0.0:
                raise DomainError(f"sqrt of negative value {v!r}")
            return math.sqrt(v)
        raise ValueError(f"unknown unary operator {e.op!r}")
    if isinstance(e, Binary):
        l = eval_value(e.left, x)
        r = eval_value(e.right, x)
        if e.op == "add":
            return l + r
        if e.op == "sub":
            return l - r
        if e.op == "mul":
            return l * r
        if e.op == "div":
            if r == 0.0:
                raise DomainError("division by zero")
            return l / r
        if e.op == "pow":
            try:
                if float(r).is_integer():
                    # same repeated-squaring path the jet evaluator takes
                    return _pow_int_value(l, int(r))
                return float(l) ** float(r)
            except (OverflowError, ValueError, ZeroDivisionError) as exc:
                raise DomainError(f"power {l!r}^{r!r}: {exc}") from None
        raise ValueError(f"unknown binary operator {e.op!r}")
    raise TypeError(f"not an expression node: {e!r}")


def eval_jet(e: Expr, x0: float, order: int) -> Jet:
    """Jet of the expression at ``x0`` up to ``order``.

    Integer constant exponents are evaluated by repeated squaring so that
    polynomials keep an exact path; fractional constant exponents go through
    the ``exp(p * ln(u))`` rewrite and need a positive base.
    """
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    return _eval_jet(e, float(x0), order)


def _eval_jet(e: Expr, x0: float, order: int) -> Jet:
    if isinstance(e, Constant):
        return jets.constant(e.value, x0, order)
    if isinstance(e, Variable):
        return jets.variable(x0, order)
    if isinstance(e, Unary):
        u = _eval_jet(e.arg, x0, order)
        if e.op == "neg":
            return -u
        return jets.apply(e.op, u)
    if isinstance(e, Binary):
        if e.op == "pow":
            base = _eval_jet(e.left, x0, order)
            exponent = e.right
            if not isinstance(exponent, Constant):
                # hand-built tree; same rewrite the parser applies
                p = _eval_jet(exponent, x0, order)
                return jets.exp(p * jets.ln(base))
            p = exponent.value
            if float(p).is_integer():
                return jets.pow_int(base, int(p))
            return jets.exp(jets.ln(base) * p)
        l = _eval_jet(e.left, x0, order)
        r = _eval_jet(e.right, x0, order)
        if e.op == "add":
            return l + r
        if e.op == "sub":
            return l - r
        if e.op == "mul":
            return l * r
        if e.op == "div":
            return l / r
        raise ValueError(f"unknown binary operator {e.op!r}")
    raise TypeError(f"not an expression node: {e!r}")


# -- printing -------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        if e.op in ("add", "sub"):
            return _PREC_ADD
        if e.op in ("mul", "div"):
            return _PREC_MUL
        return _PREC_POW
    if isinstance(e, Unary) and e.op == "neg":
        return _PREC_NEG
    return _PREC_ATOM


def _format_number(v: float) -> str:
    if v < 0 or (v == 0.0 and math.copysign(1.0, v) < 0):
        return "-" + repr(-v)
    return repr(v)


def to_source(e: Expr) -> str:
    """Render the tree back to parseable source.

    The output re-parses to a structurally identical tree (named constants
    are rendered as their numeric values).
    """

    def wrap(child: Expr, min_prec: int) -> str:
        s = to_source(child)
        return f"({s})" if _prec(child) < min_prec else s

    if isinstance(e, Constant):
        return _format_number(e.value)
    if isinstance(e, Variable):
        return "x"
    if isinstance(e, Unary):
        if e.op == "neg":
            return "-" + wrap(e.arg, _PREC_NEG)
        return f"{e.op}({to_source(e.arg)})"
    if isinstance(e, Binary):
        if e.op == "add":
            return f"{wrap(e.left, _PREC_ADD)} + {wrap(e.right, _PREC_ADD + 1)}"
        if e.op == "sub":
            return f"{wrap(e.left, _PREC_ADD)} - {wrap(e.right, _PREC_ADD + 1)}"
        if e.op == "mul":
            return f"{wrap(e.left, _PREC_MUL)}*{wrap(e.right, _PREC_MUL + 1)}"
        if e.op == "div":
            return f"{wrap(e.left, _PREC_MUL)}/{wrap(e.right, _PREC_MUL + 1)}"
        if e.op == "pow":
            # exponent position accepts any factor, including unary minus
            return f"{wrap(e.left, _PREC_ATOM)}^{wrap(e.right, _PREC_NEG)}"
    raise TypeError(f"not an expression node: {e!r}")


# -- polynomial view ------------------------------------------------------

_MAX_POLY_DEGREE = 256


def poly_coeffs(e: Expr) -> list[float] | None:
    """Ascending power-basis coefficients when the tree is a polynomial
    (constants, x, +, -, *, division by a nonzero constant, and non-negative
    integer constant powers); ``None`` otherwise."""
    coeffs = _poly_coeffs_cached(e)
    return None if coeffs is None else list(coeffs)


@functools.lru_cache(maxsize=512)
def _poly_coeffs_cached(e: Expr) -> tuple[float, ...] | None:

    def trim(c: list[float]) -> list[float]:
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        return c

    def conv(a: list[float], b: list[float]) -> list[float] | None:
        if len(a) + len(b) - 1 > _MAX_POLY_DEGREE + 1:
            return None
        out = [0.0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0.0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return out

    def go(node: Expr) -> list[float] | None:
        if isinstance(node, Constant):
            return [node.value]
        if isinstance(node, Variable):
            return [0.0, 1.0]
        if isinstance(node, Unary):
            if node.op != "neg":
                return None
            inner = go(node.arg)
            return None if inner is None else [-c for c in inner]
        if isinstance(node, Binary):
            if node.op == "pow":
                if not isinstance(node.right, Constant):
                    return None
                p = node.right.value
                if not float(p).is_integer() or p < 0 or p > _MAX_POLY_DEGREE:
                    return None
                base = go(node.left)
                if base is None:
                    return None
                result = [1.0]
                for _ in range(int(p)):
                    result = conv(result, base)
                    if result is None:
                        return None
                return trim(result)
            l = go(node.left)
            if l is None:
                return None
            r = go(node.right)
            if r is None:
                return None
            if node.op == "add" or node.op == "sub":
                size = max(len(l), len(r))
                l = l + [0.0] * (size - len(l))
                r = r + [0.0] * (size - len(r))
                if node.op == "add":
                    return trim([a + b for a, b in zip(l, r)])
                return trim([a - b for a, b in zip(l, r)])
            if node.op == "mul":
                out = conv(l, r)
                return None if out is None else trim(out)
            if node.op == "div":
                if len(r) == 1 and r[0] != 0.0:
                    return [c / r[0] for c in l]
                return None
        return None

    out = go(e)
    return None if out is None else tuple(out)
