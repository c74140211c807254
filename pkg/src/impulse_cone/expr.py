"""Scalar arithmetic expression language.

Problem files describe the nonlinearity f(t,u), the weight g, impulse
functions I(x) and measure densities as text expressions.  This module
parses them into immutable ASTs, evaluates them (scalar interpreter or
compiled scalar/vector callables) and reports domain errors instead of
letting NaNs leak.

Grammar (standard precedence, ``^`` right-associative and tightest,
then unary minus, then ``* /``, then ``+ -``)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | power
    power   := atom ('^' factor)?
    atom    := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Known functions: sin cos exp log sqrt abs pow (2 args), min max (>= 2).
Named constants: pi, e.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from .errors import EvalDomainError, ExprSyntaxError, UnboundVariableError

__all__ = [
    "Expr", "Num", "Var", "Const", "Neg", "BinOp", "Call",
    "parse", "evaluate", "free_vars", "to_text", "compile_fn",
]

CONSTANTS = {"pi": math.pi, "e": math.e}

# function name -> (min arity, max arity or None for variadic)
FUNCTIONS = {
    "sin": (1, 1), "cos": (1, 1), "exp": (1, 1), "log": (1, 1),
    "sqrt": (1, 1), "abs": (1, 1), "pow": (2, 2),
    "min": (2, None), "max": (2, None),
}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Union[Num, Var, Const, Neg, BinOp, Call]


# ---------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(source: str):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == m.start():
            # skip leading whitespace manually to locate the bad byte
            while pos < n and source[pos].isspace():
                pos += 1
            if pos >= n:
                break
            raise ExprSyntaxError(
                f"unexpected character {source[pos]!r}", pos,
                "a number, name or operator")
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        self.i += 1

    def expect_op(self, op: str):
        kind, text, pos = self.tok
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"got {text or 'end of input'!r}", pos, f"'{op}'")
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.tok
        if kind != "end":
            raise ExprSyntaxError(f"trailing input {text!r}", pos,
                                  "an operator or end of input")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.tok[:2] in (("op", "+"), ("op", "-")):
            op = self.tok[1]
            self.advance()
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.tok[:2] in (("op", "*"), ("op", "/")):
            op = self.tok[1]
            self.advance()
            left = BinOp(op, left, self.factor())
        return left

    def factor(self) -> Expr:
        if self.tok[:2] == ("op", "-"):
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok[:2] == ("op", "^"):
            self.advance()
            return BinOp("^", base, self.factor())  # right-associative
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.tok
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "name":
            self.advance()
            if self.tok[:2] == ("op", "("):
                return self.call(text, pos)
            if text in CONSTANTS:
                return Const(text)
            return Var(text)
        if kind == "op" and text == "(":
            self.advance()
            e = self.expr()
            self.expect_op(")")
            return e
        raise ExprSyntaxError(
            f"got {text or 'end of input'!r}", pos,
            "a number, name, '(' or unary '-'")

    def call(self, name: str, pos: int) -> Expr:
        if name not in FUNCTIONS:
            raise ExprSyntaxError(f"unknown function {name!r}", pos,
                                  "one of " + ", ".join(sorted(FUNCTIONS)))
        self.expect_op("(")
        args = [self.expr()]
        while self.tok[:2] == ("op", ","):
            self.advance()
            args.append(self.expr())
        self.expect_op(")")
        lo, hi = FUNCTIONS[name]
        if len(args) < lo or (hi is not None and len(args) > hi):
            want = f"{lo}" if hi == lo else (f">= {lo}" if hi is None else f"{lo}..{hi}")
            raise ExprSyntaxError(
                f"{name} takes {want} argument(s), got {len(args)}", pos,
                f"{want} argument(s)")
        return Call(name, tuple(args))


def parse(source: str) -> Expr:
    """Parse expression text into an AST."""
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0, "an expression")
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# evaluation

def _check_pow(base, exponent):
    if base < 0 and exponent != math.floor(exponent):
        raise EvalDomainError(
            f"fractional power of negative base: {base!r} ^ {exponent!r}")
    if base == 0 and exponent < 0:
        raise EvalDomainError(f"zero raised to negative power {exponent!r}")
    return base ** exponent


def _check_div(num, den):
    if den == 0:
        raise EvalDomainError("division by zero")
    return num / den


def _check_log(x):
    if x <= 0:
        raise EvalDomainError(f"log of non-positive value {x!r}")
    return math.log(x)


def _check_sqrt(x):
    if x < 0:
        raise EvalDomainError(f"sqrt of negative value {x!r}")
    return math.sqrt(x)


_SCALAR_FUNCS = {
    "sin": math.sin, "cos": math.cos, "exp": math.exp,
    "log": _check_log, "sqrt": _check_sqrt, "abs": abs,
    "pow": _check_pow, "min": min, "max": max,
}


def evaluate(expr: Expr, bindings: dict) -> float:
    """Evaluate ``expr`` with the given variable bindings (IEEE doubles)."""
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Const):
        return CONSTANTS[expr.name]
    if isinstance(expr, Var):
        try:
            return float(bindings[expr.name])
        except KeyError:
            raise UnboundVariableError(expr.name) from None
    if isinstance(expr, Neg):
        return -evaluate(expr.arg, bindings)
    if isinstance(expr, BinOp):
        a = evaluate(expr.left, bindings)
        b = evaluate(expr.right, bindings)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if expr.op == "/":
            return _check_div(a, b)
        try:
            return _check_pow(a, b)
        except OverflowError:
            raise EvalDomainError(f"overflow in {a!r} ^ {b!r}") from None
    if isinstance(expr, Call):
        args = [evaluate(a, bindings) for a in expr.args]
        try:
            return float(_SCALAR_FUNCS[expr.func](*args))
        except OverflowError:
            raise EvalDomainError(f"overflow in {expr.func}") from None
    raise TypeError(f"not an Expr node: {expr!r}")


def free_vars(expr: Expr) -> set:
    """Set of variable names occurring in ``expr`` (constants excluded)."""
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, (Num, Const)):
        return set()
    if isinstance(expr, Neg):
        return free_vars(expr.arg)
    if isinstance(expr, BinOp):
        return free_vars(expr.left) | free_vars(expr.right)
    if isinstance(expr, Call):
        out = set()
        for a in expr.args:
            out |= free_vars(a)
        return out
    raise TypeError(f"not an Expr node: {expr!r}")


# ---------------------------------------------------------------------------
# pretty-printer

# print precedence: lower binds looser
_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(expr: Expr) -> int:
    if isinstance(expr, BinOp):
        if expr.op in "+-":
            return _PREC_ADD
        if expr.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(expr, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def to_text(expr: Expr) -> str:
    """Render the AST as source that reparses to a structurally identical
    tree (minimal parentheses)."""
    def wrap(child, need_parens):
        s = to_text(child)
        return f"({s})" if need_parens else s

    if isinstance(expr, Num):
        return repr(expr.value)
    if isinstance(expr, (Var, Const)):
        return expr.name
    if isinstance(expr, Neg):
        return "-" + wrap(expr.arg, _prec(expr.arg) < _PREC_NEG)
    if isinstance(expr, Call):
        return expr.func + "(" + ", ".join(to_text(a) for a in expr.args) + ")"
    if isinstance(expr, BinOp):
        p = _prec(expr)
        if expr.op == "^":
            # base must be an atom; the exponent slot absorbs '-' and '^'
            left = wrap(expr.left, _prec(expr.left) < _PREC_ATOM)
            right = wrap(expr.right, _prec(expr.right) < _PREC_NEG)
        else:
            left = wrap(expr.left, _prec(expr.left) < p)
            # left-associative: an equal-precedence right child needs parens
            right = wrap(expr.right, _prec(expr.right) <= p)
        return f"{left}{expr.op}{right}"
    raise TypeError(f"not an Expr node: {expr!r}")


# ---------------------------------------------------------------------------
# compiled callables (fast paths for quadrature and time stepping)

def _np_log(x):
    x = np.asarray(x)
    if np.any(x <= 0):
        raise EvalDomainError("log of non-positive value")
    return np.log(x)


def _np_sqrt(x):
    x = np.asarray(x)
    if np.any(x < 0):
        raise EvalDomainError("sqrt of negative value")
    return np.sqrt(x)


def _np_pow(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any((a < 0) & (b != np.floor(b))):
        raise EvalDomainError("fractional power of negative base")
    if np.any((a == 0) & (b < 0)):
        raise EvalDomainError("zero raised to negative power")
    return np.power(a, b)


def _np_div(a, b):
    b = np.asarray(b, dtype=float)
    if np.any(b == 0):
        raise EvalDomainError("division by zero")
    return np.asarray(a, dtype=float) / b


def _np_minimum(*args):
    out = args[0]
    for a in args[1:]:
        out = np.minimum(out, a)
    return out


def _np_maximum(*args):
    out = args[0]
    for a in args[1:]:
        out = np.maximum(out, a)
    return out


_NUMPY_ENV = {
    "sin": np.sin, "cos": np.cos, "exp": np.exp,
    "log": _np_log, "sqrt": _np_sqrt, "abs": np.abs,
    "pow": _np_pow, "min": _np_minimum, "max": _np_maximum,
    "_div": _np_div,
}

_SCALAR_ENV = dict(_SCALAR_FUNCS)
_SCALAR_ENV["_div"] = _check_div
_SCALAR_ENV["pow"] = _check_pow


def _emit(expr: Expr) -> str:
    if isinstance(expr, Num):
        return repr(expr.value)
    if isinstance(expr, Const):
        return repr(CONSTANTS[expr.name])
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        return f"(-{_emit(expr.arg)})"
    if isinstance(expr, BinOp):
        a, b = _emit(expr.left), _emit(expr.right)
        if expr.op == "^":
            return f"pow({a}, {b})"
        if expr.op == "/":
            return f"_div({a}, {b})"
        return f"({a} {expr.op} {b})"
    if isinstance(expr, Call):
        return expr.func + "(" + ", ".join(_emit(a) for a in expr.args) + ")"
    raise TypeError(f"not an Expr node: {expr!r}")


def compile_fn(expr: Expr, args: Iterable[str], vector: bool = False) -> Callable:
    """Compile the AST to a Python callable of the named arguments.

    ``vector=True`` produces a numpy-broadcasting callable; both modes
    keep the domain-error semantics of :func:`evaluate`.
    """
    args = tuple(args)
    missing = free_vars(expr) - set(args)
    if missing:
        raise UnboundVariableError(sorted(missing)[0])
    env = dict(_NUMPY_ENV if vector else _SCALAR_ENV)
    env["__builtins__"] = {}
    source = f"lambda {', '.join(args)}: {_emit(expr)}" if args else f"lambda: {_emit(expr)}"
    fn = eval(compile(source, "<expr>", "eval"), env)
    if vector:
        def vfn(*xs):
            # constant expressions must still broadcast to the input shape
            out = fn(*xs)
            if np.ndim(out) == 0 and xs and np.ndim(xs[0]) > 0:
                out = np.full_like(np.asarray(xs[0], dtype=float), float(out))
            return out
        return vfn

    def sfn(*xs):
        try:
            return float(fn(*xs))
        except ZeroDivisionError:
            raise EvalDomainError("division by zero") from None
        except OverflowError:
            raise EvalDomainError("overflow") from None
        except ValueError as err:
            raise EvalDomainError(str(err)) from None

    return sfn
