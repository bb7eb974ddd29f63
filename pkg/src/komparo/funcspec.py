"""Parsing, printing and evaluation of the real-valued functions f and g.

Expressions are immutable trees of frozen dataclasses. Evaluation is
vectorized over a batch of points; single-point evaluation goes through the
same code path so results are bit-identical whichever entry point is used.

Grammar::

    expr       := term (('+'|'-') term)*
    term       := factor (('*'|'/') factor)*
    factor     := atom ('^' integer)?
    atom       := number | var | '(' expr ')' | call | piecewise
    var        := 'x' integer
    call       := ident '(' expr (',' expr)* ')'    ident in {abs, min, max, norm}
    piecewise  := 'piecewise' '{' (guard ':' expr ';')+ 'else' ':' expr '}'
    guard      := comparison ('&&' comparison)*
    comparison := expr ('<=' | '<' | '>=' | '>' | '==') expr
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Sequence, Union

import numpy as np

CALLS = ("abs", "min", "max", "norm")
COMPARATORS = ("<=", "<", ">=", ">", "==")


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class UnboundVariableError(ParseError):
    pass


class MissingDefaultError(ParseError):
    pass


class EvalError(ArithmeticError):
    """Raised when an expression has no finite real value at some point."""

    def __init__(self, message: str, subexpr: str, point=None):
        self.subexpr = subexpr
        self.point = None if point is None else tuple(float(v) for v in point)
        at = f" at x={self.point}" if self.point is not None else ""
        super().__init__(f"{message} in `{subexpr}`{at}")


class UnknownBuiltinError(KeyError):
    pass


# --------------------------------------------------------------------------
# expression tree


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Piecewise:
    branches: tuple  # of (tuple[Compare, ...], Node)
    default: "Node"


Node = Union[Const, Var, BinOp, Pow, Call, Piecewise]


@dataclass(frozen=True)
class FuncExpr:
    """A function R^d -> R given by an expression tree."""

    body: Node
    dimension: int
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be a positive integer")
        bad = max_var_index(self.body)
        if bad > self.dimension:
            raise UnboundVariableError(
                f"variable x{bad} exceeds dimension {self.dimension}")

    def __call__(self, point) -> float:
        return evaluate(self, point)

    def __str__(self) -> str:
        return to_text(self)

    @property
    def name(self) -> str:
        return self.label or to_text(self)


def max_var_index(node: Node) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Const):
        return 0
    if isinstance(node, BinOp):
        return max(max_var_index(node.left), max_var_index(node.right))
    if isinstance(node, Pow):
        return max_var_index(node.base)
    if isinstance(node, Call):
        return max(max_var_index(a) for a in node.args)
    if isinstance(node, Piecewise):
        m = max_var_index(node.default)
        for guard, expr in node.branches:
            m = max(m, max_var_index(expr))
            for c in guard:
                m = max(m, max_var_index(c.left), max_var_index(c.right))
        return m
    raise TypeError(f"not an expression node: {node!r}")


def negate(fn: FuncExpr) -> FuncExpr:
    """Return `0 - fn`, the parsed form of the negation."""
    label = f"-({fn.label})" if fn.label else ""
    return FuncExpr(BinOp("-", Const(0.0), fn.body), fn.dimension, label)


# --------------------------------------------------------------------------
# tokenizer and parser

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>\d+\.?\d*|\.\d+)
  | (?P<var>x\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|==|&&|[-+*/^(),:;{}<>])
""", re.VERBOSE)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, dimension: int):
        self.tokens = _tokenize(text)
        self.i = 0
        self.dimension = dimension

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.next()
        if text != value or kind == "eof":
            found = "end of input" if kind == "eof" else repr(text)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {text!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.next()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.next()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        node = self.atom()
        if self.peek()[1] == "^":
            self.next()
            kind, text, pos = self.next()
            if kind != "number" or not text.isdigit():
                raise ParseError("exponent must be a nonnegative integer literal", pos)
            node = Pow(node, int(text))
        return node

    def atom(self) -> Node:
        kind, text, pos = self.next()
        if kind == "number":
            return Const(float(text))
        if kind == "var":
            index = int(text[1:])
            if index < 1 or index > self.dimension:
                raise UnboundVariableError(
                    f"variable {text} is not bound in dimension {self.dimension}", pos)
            return Var(index)
        if text == "(" and kind == "op":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident" and text == "piecewise":
            return self.piecewise()
        if kind == "ident" and text in CALLS:
            self.expect("(")
            args = [self.expr()]
            while self.peek()[1] == ",":
                self.next()
                args.append(self.expr())
            self.expect(")")
            return Call(text, tuple(args))
        if kind == "ident":
            raise ParseError(f"unknown identifier {text!r}", pos)
        if kind == "eof":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {text!r}", pos)

    def piecewise(self) -> Piecewise:
        self.expect("{")
        branches = []
        while True:
            kind, text, pos = self.peek()
            if kind == "ident" and text == "else":
                self.next()
                self.expect(":")
                default = self.expr()
                self.expect("}")
                if not branches:
                    raise ParseError("piecewise needs at least one guarded branch", pos)
                return Piecewise(tuple(branches), default)
            if text == "}" or kind == "eof":
                raise MissingDefaultError("piecewise without a final 'else' branch", pos)
            guard = [self.comparison()]
            while self.peek()[1] == "&&":
                self.next()
                guard.append(self.comparison())
            self.expect(":")
            expr = self.expr()
            if self.peek()[1] == "}":
                raise MissingDefaultError(
                    "piecewise without a final 'else' branch", self.peek()[2])
            self.expect(";")
            branches.append((tuple(guard), expr))

    def comparison(self) -> Compare:
        left = self.expr()
        kind, text, pos = self.next()
        if text not in COMPARATORS or kind != "op":
            raise ParseError(f"expected a comparison operator, found {text!r}", pos)
        return Compare(text, left, self.expr())


def parse(text: str, dimension: int, label: str = "") -> FuncExpr:
    if dimension < 1:
        raise ValueError("dimension must be a positive integer")
    body = _Parser(text, dimension).parse()
    return FuncExpr(body, dimension, label or text.strip())


# --------------------------------------------------------------------------
# canonical printer


def _number(v: float) -> str:
    v = float(v)
    if v < 0 or (v == 0 and np.signbit(v)):
        return f"(0 - {_number(-v)})"
    s = format(Decimal(repr(v)), "f")
    if s.endswith(".0"):
        s = s[:-2]
    return s


def _print(node: Node) -> str:
    if isinstance(node, Const):
        return _number(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, BinOp):
        return f"({_print(node.left)} {node.op} {_print(node.right)})"
    if isinstance(node, Pow):
        base = _print(node.base)
        if isinstance(node.base, Pow):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(_print(a) for a in node.args)})"
    if isinstance(node, Piecewise):
        parts = []
        for guard, expr in node.branches:
            cond = " && ".join(f"{_print(c.left)} {c.op} {_print(c.right)}" for c in guard)
            parts.append(f"{cond} : {_print(expr)} ;")
        parts.append(f"else : {_print(node.default)}")
        return "piecewise { " + " ".join(parts) + " }"
    raise TypeError(f"not an expression node: {node!r}")


def to_text(fn: FuncExpr | Node) -> str:
    """Canonical text form; `parse(to_text(e), d)` evaluates exactly like e."""
    return _print(fn.body if isinstance(fn, FuncExpr) else fn)


# --------------------------------------------------------------------------
# evaluation


def _check_finite(values: np.ndarray, node: Node, X: np.ndarray) -> np.ndarray:
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(np.argmax(bad))
        raise EvalError("non-finite intermediate value", _print(node), X[k])
    return values


def _compare(op: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if op == "<=":
        return a <= b
    if op == "<":
        return a < b
    if op == ">=":
        return a >= b
    if op == ">":
        return a > b
    return a == b


def _eval(node: Node, X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    if isinstance(node, Const):
        return np.full(n, node.value, dtype=float)
    if isinstance(node, Var):
        return X[:, node.index - 1].astype(float, copy=True)
    if isinstance(node, BinOp):
        a = _eval(node.left, X)
        b = _eval(node.right, X)
        if node.op == "+":
            out = a + b
        elif node.op == "-":
            out = a - b
        elif node.op == "*":
            out = a * b
        else:
            zero = b == 0
            if zero.any():
                raise EvalError("division by zero", _print(node), X[int(np.argmax(zero))])
            out = a / b
        return _check_finite(out, node, X)
    if isinstance(node, Pow):
        base = _eval(node.base, X)
        if node.exponent == 0:
            return np.ones(n)
        out = base.copy()
        for _ in range(node.exponent - 1):
            out = out * base
        return _check_finite(out, node, X)
    if isinstance(node, Call):
        args = [_eval(a, X) for a in node.args]
        if node.name == "abs":
            if len(args) != 1:
                raise EvalError("abs takes exactly one argument", _print(node))
            return np.abs(args[0])
        if node.name == "min":
            out = args[0]
            for a in args[1:]:
                out = np.minimum(out, a)
            return out
        if node.name == "max":
            out = args[0]
            for a in args[1:]:
                out = np.maximum(out, a)
            return out
        acc = args[0] * args[0]
        for a in args[1:]:
            acc = acc + a * a
        return _check_finite(np.sqrt(acc), node, X)
    if isinstance(node, Piecewise):
        out = np.empty(n, dtype=float)
        remaining = np.arange(n)
        for guard, expr in node.branches:
            if remaining.size == 0:
                break
            Xr = X[remaining]
            # && short-circuits: later comparisons only see points still alive
            alive = np.arange(remaining.size)
            for c in guard:
                Xa = Xr[alive]
                hit = _compare(c.op, _eval(c.left, Xa), _eval(c.right, Xa))
                alive = alive[hit]
                if alive.size == 0:
                    break
            taken = np.zeros(remaining.size, dtype=bool)
            taken[alive] = True
            sel = remaining[taken]
            if sel.size:
                out[sel] = _eval(expr, X[sel])
            remaining = remaining[~taken]
        if remaining.size:
            out[remaining] = _eval(node.default, X[remaining])
        return out
    raise TypeError(f"not an expression node: {node!r}")


def evaluate_many(fn: FuncExpr, points) -> np.ndarray:
    """Evaluate fn on an (N, d) array of points."""
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, fn.dimension) if fn.dimension == 1 else X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != fn.dimension:
        raise ValueError(f"expected points of dimension {fn.dimension}, got shape {X.shape}")
    with np.errstate(all="ignore"):
        return _eval(fn.body, X)


def evaluate(fn: FuncExpr, point: Sequence[float] | float) -> float:
    p = np.atleast_1d(np.asarray(point, dtype=float))
    if p.shape != (fn.dimension,):
        raise ValueError(f"point must have length {fn.dimension}, got {p.shape[0]}")
    return float(evaluate_many(fn, p.reshape(1, -1))[0])


# --------------------------------------------------------------------------
# fixture catalog

BUILTIN_CATALOG = ("euclid_norm(d)", "sum_squares(d)", "exmupper_f", "identity_1d", "double_well")

_DIM_RE = re.compile(r"^(euclid_norm|sum_squares)\((\d+)\)$")


def builtin(name: str) -> FuncExpr:
    """Return a catalogued fixture, e.g. ``builtin("euclid_norm(2)")``."""
    name = name.strip()
    m = _DIM_RE.match(name)
    if m:
        d = int(m.group(2))
        if d < 1:
            raise UnknownBuiltinError(f"{name}: dimension must be positive")
        if m.group(1) == "euclid_norm":
            body = Call("norm", tuple(Var(i) for i in range(1, d + 1)))
        else:
            body = Pow(Var(1), 2)
            for i in range(2, d + 1):
                body = BinOp("+", body, Pow(Var(i), 2))
        return FuncExpr(body, d, name)
    if name == "exmupper_f":
        return parse("piecewise { x1 <= 0 : 1 ; else : x1^2 }", 1, name)
    if name == "identity_1d":
        return FuncExpr(Var(1), 1, name)
    if name == "double_well":
        return parse("x1^4 - x1^2", 1, name)
    raise UnknownBuiltinError(
        f"unknown builtin {name!r}; catalog: {', '.join(BUILTIN_CATALOG)}")


def is_builtin_name(name: str) -> bool:
    name = name.strip()
    return bool(_DIM_RE.match(name)) or name in ("exmupper_f", "identity_1d", "double_well")


def resolve(text: str, dimension: int) -> FuncExpr:
    """Builtin name, the ``norm`` sentinel, or an expression in the grammar."""
    text = text.strip()
    if text == "norm":
        return builtin(f"euclid_norm({dimension})")
    if is_builtin_name(text):
        fn = builtin(text)
        if fn.dimension != dimension:
            raise ParseError(
                f"builtin {text!r} has dimension {fn.dimension}, expected {dimension}")
        return fn
    return parse(text, dimension)
