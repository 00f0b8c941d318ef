"""Expression trees, symbolic differentiation and a small text syntax.

Nodes are frozen dataclasses, so structurally equal trees compare and hash
equal. Constants are exact rationals. The arithmetic dunders build trees,
which keeps formula definitions close to their usual notation::

    x = Var("x")
    e = 1 - 1 / (200 * x)
    differentiate(e, "x")
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Union

Number = Union[int, Fraction]


class ExprError(ValueError):
    pass


class NotDifferentiable(ExprError):
    pass


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, n):
        if isinstance(n, int) and n >= 0:
            return Pow(self, n)
        return Powr(self, as_expr(n))

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Sub(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Div(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Neg(Expr):
    a: Expr


@dataclass(frozen=True)
class Pow(Expr):
    """Natural power."""

    a: Expr
    n: int


@dataclass(frozen=True)
class Powr(Expr):
    """Real power, defined as exp(b * ln a) with 0^b = 0 for b > 0."""

    a: Expr
    b: Expr


@dataclass(frozen=True)
class Exp(Expr):
    a: Expr


@dataclass(frozen=True)
class Ln(Expr):
    a: Expr


@dataclass(frozen=True)
class Log2(Expr):
    a: Expr


@dataclass(frozen=True)
class Min(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Max(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Piecewise(Expr):
    """``below`` where ``var < threshold``, otherwise ``above``."""

    var: str
    threshold: Fraction
    below: Expr
    above: Expr

    def __post_init__(self):
        if not isinstance(self.threshold, Fraction):
            object.__setattr__(self, "threshold", Fraction(self.threshold))


_BINARY = (Add, Sub, Mul, Div, Min, Max)
_UNARY = (Neg, Exp, Ln, Log2)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    if isinstance(x, float):
        return Const(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, _BINARY) or isinstance(e, Powr):
        return (e.a, e.b)
    if isinstance(e, _UNARY) or isinstance(e, Pow):
        return (e.a,)
    if isinstance(e, Piecewise):
        return (e.below, e.above)
    return ()


def variables(e: Expr) -> set[str]:
    out: set[str] = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, Piecewise):
            out.add(n.var)
        stack.extend(children(n))
    return out


def substitute(e: Expr, mapping: Mapping[str, object]) -> Expr:
    """Replace variables by expressions or numbers. Piecewise switch
    variables must stay variables."""
    repl = {k: as_expr(v) for k, v in mapping.items()}
    memo: dict[int, Expr] = {}

    def go(n: Expr) -> Expr:
        key = id(n)
        if key in memo:
            return memo[key]
        if isinstance(n, Var):
            r = repl.get(n.name, n)
        elif isinstance(n, Const):
            r = n
        elif isinstance(n, Piecewise):
            if n.var in repl:
                raise ExprError(f"cannot substitute piecewise switch variable {n.var!r}")
            r = Piecewise(n.var, n.threshold, go(n.below), go(n.above))
        elif isinstance(n, Pow):
            r = Pow(go(n.a), n.n)
        elif isinstance(n, _UNARY):
            r = type(n)(go(n.a))
        else:
            r = type(n)(go(n.a), go(n.b))
        memo[key] = r
        return r

    return go(e)


# --- simplifying constructors ---------------------------------------------

ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def _is_const(e: Expr, v=None) -> bool:
    return isinstance(e, Const) and (v is None or e.value == v)


def _monomial(e: Expr):
    """(coefficient, {var: exponent}) when e is a product/quotient of
    constants and integer powers of variables, else None."""
    if isinstance(e, Const):
        return e.value, {}
    if isinstance(e, Var):
        return Fraction(1), {e.name: 1}
    if isinstance(e, Pow):
        m = _monomial(e.a)
        if m is None:
            return None
        return m[0] ** e.n, {k: n * e.n for k, n in m[1].items()}
    if isinstance(e, (Mul, Div)):
        a, b = _monomial(e.a), _monomial(e.b)
        if a is None or b is None:
            return None
        if isinstance(e, Div) and b[0] == 0:
            return None
        sign = 1 if isinstance(e, Mul) else -1
        coef = a[0] * b[0] if sign == 1 else a[0] / b[0]
        powers = dict(a[1])
        for k, n in b[1].items():
            powers[k] = powers.get(k, 0) + sign * n
        return coef, {k: n for k, n in powers.items() if n}
    return None


def _build_monomial(coef: Fraction, powers: dict[str, int]) -> Expr:
    def prod(items):
        out = None
        for name, n in sorted(items):
            t = Var(name) if n == 1 else Pow(Var(name), n)
            out = t if out is None else Mul(out, t)
        return out

    if coef == 0:
        return ZERO
    if coef < 0 and powers:
        return Neg(_build_monomial(-coef, powers))
    num = prod((k, n) for k, n in powers.items() if n > 0)
    den = prod((k, -n) for k, n in powers.items() if n < 0)
    p, q = Const(Fraction(coef.numerator)), coef.denominator
    if num is None:
        top = p
    elif p.value == 1:
        top = num
    elif p.value == -1:
        top = Neg(num)
    else:
        top = Mul(p, num)
    if den is None:
        return top if q == 1 else Div(top, Const(Fraction(q)))
    if q != 1:
        den = Mul(Const(Fraction(q)), den)
    if isinstance(top, Neg):
        return Neg(Div(top.a, den))
    return Div(top, den)


def _normal_monomial(e: Expr) -> Expr:
    m = _monomial(e)
    if m is None or isinstance(e, (Var, Const)):
        return e
    return _build_monomial(*m)


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if isinstance(b, Neg):
        return sub(a, b.a)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    if a == b:
        return ZERO
    if isinstance(b, Neg):
        return add(a, b.a)
    return Sub(a, b)


def neg(a: Expr) -> Expr:
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.a
    if isinstance(a, Sub):
        return Sub(a.b, a.a)
    return Neg(a)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(b):
        a, b = b, a
    if _is_const(a, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(a, -1):
        return neg(b)
    if _is_const(a) and isinstance(b, Mul) and _is_const(b.a):
        return mul(Const(a.value * b.a.value), b.b)
    if isinstance(a, Neg):
        return neg(mul(a.a, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.a))
    return _normal_monomial(Mul(a, b))


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0):
        return Div(a, b)
    if _is_const(a) and _is_const(b):
        return Const(a.value / b.value)
    if _is_const(a, 0):
        return ZERO
    if _is_const(b, 1):
        return a
    if a == b:
        return ONE
    if isinstance(a, Neg):
        return neg(div(a.a, b))
    return _normal_monomial(Div(a, b))


def power(a: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return a
    if _is_const(a):
        return Const(a.value**n)
    if isinstance(a, Pow):
        return Pow(a.a, a.n * n)
    return _normal_monomial(Pow(a, n))


def simplify(e: Expr) -> Expr:
    """Constant folding and 0/1 identities, bottom-up."""
    if isinstance(e, (Var, Const)):
        return e
    if isinstance(e, Piecewise):
        return Piecewise(e.var, e.threshold, simplify(e.below), simplify(e.above))
    if isinstance(e, Pow):
        return power(simplify(e.a), e.n)
    if isinstance(e, Neg):
        return neg(simplify(e.a))
    if isinstance(e, (Exp, Ln, Log2)):
        a = simplify(e.a)
        if isinstance(e, Exp) and _is_const(a, 0):
            return ONE
        if isinstance(e, (Ln, Log2)) and _is_const(a, 1):
            return ZERO
        return type(e)(a)
    a, b = simplify(e.a), simplify(e.b)
    if isinstance(e, Add):
        return add(a, b)
    if isinstance(e, Sub):
        return sub(a, b)
    if isinstance(e, Mul):
        return mul(a, b)
    if isinstance(e, Div):
        return div(a, b)
    if isinstance(e, Powr):
        if _is_const(b) and b.value.denominator == 1 and b.value >= 0:
            return power(a, int(b.value))
        return Powr(a, b)
    return type(e)(a, b)


# --- differentiation -------------------------------------------------------

_LN2_EXPR = Ln(Const(Fraction(2)))


def differentiate(e: Expr, v: str) -> Expr:
    """Symbolic derivative of ``e`` with respect to variable ``v``.

    Piecewise nodes are differentiated branch by branch, which is only
    meaningful away from the switching threshold. ``min``/``max`` raise
    :class:`NotDifferentiable`.
    """
    return simplify(_d(e, v))


def _d(e: Expr, v: str) -> Expr:
    if isinstance(e, Var):
        return ONE if e.name == v else ZERO
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Add):
        return add(_d(e.a, v), _d(e.b, v))
    if isinstance(e, Sub):
        return sub(_d(e.a, v), _d(e.b, v))
    if isinstance(e, Neg):
        return neg(_d(e.a, v))
    if isinstance(e, Mul):
        return add(mul(_d(e.a, v), e.b), mul(e.a, _d(e.b, v)))
    if isinstance(e, Div):
        da, db = _d(e.a, v), _d(e.b, v)
        if _is_const(db, 0):
            return div(da, e.b)
        if _is_const(da, 0):
            return neg(div(mul(e.a, db), power(e.b, 2)))
        return div(sub(mul(da, e.b), mul(e.a, db)), power(e.b, 2))
    if isinstance(e, Pow):
        if e.n == 0:
            return ZERO
        return mul(mul(Const(Fraction(e.n)), power(e.a, e.n - 1)), _d(e.a, v))
    if isinstance(e, Powr):
        da, db = _d(e.a, v), _d(e.b, v)
        if _is_const(db, 0):
            if isinstance(e.b, Const):
                return mul(mul(e.b, Powr(e.a, Const(e.b.value - 1))), da)
            return mul(mul(e.b, Powr(e.a, sub(e.b, ONE))), da)
        return mul(e, add(mul(db, Ln(e.a)), div(mul(e.b, da), e.a)))
    if isinstance(e, Exp):
        return mul(e, _d(e.a, v))
    if isinstance(e, Ln):
        return div(_d(e.a, v), e.a)
    if isinstance(e, Log2):
        return div(_d(e.a, v), mul(e.a, _LN2_EXPR))
    if isinstance(e, Piecewise):
        return Piecewise(e.var, e.threshold, _d(e.below, v), _d(e.above, v))
    if isinstance(e, (Min, Max)):
        raise NotDifferentiable(f"{type(e).__name__.lower()} is not differentiable")
    raise ExprError(f"unknown node {e!r}")


# --- point evaluation ------------------------------------------------------


def evaluate(e: Expr, env: Mapping[str, object]):
    """Point value. Stays exact (Fraction) while only rational operations
    are involved; transcendental nodes fall back to floats."""
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise ExprError(f"variable {e.name!r} not bound") from None
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Piecewise):
        x = env[e.var]
        return evaluate(e.below if x < e.threshold else e.above, env)
    if isinstance(e, Pow):
        return evaluate(e.a, env) ** e.n
    if isinstance(e, Neg):
        return -evaluate(e.a, env)
    if isinstance(e, Exp):
        return math.exp(evaluate(e.a, env))
    if isinstance(e, Ln):
        return math.log(evaluate(e.a, env))
    if isinstance(e, Log2):
        return math.log2(evaluate(e.a, env))
    if isinstance(e, Mul):
        # u*log(u) and u*log(v/u) extend continuously by 0 at u = 0
        for u, other in ((e.a, e.b), (e.b, e.a)):
            if isinstance(other, (Ln, Log2)) and (
                other.a == u or (isinstance(other.a, Div) and other.a.b == u)
            ):
                uv = evaluate(u, env)
                if uv == 0:
                    return 0.0
    a, b = evaluate(e.a, env), evaluate(e.b, env)
    if isinstance(e, Add):
        return a + b
    if isinstance(e, Sub):
        return a - b
    if isinstance(e, Mul):
        return a * b
    if isinstance(e, Div):
        return a / b
    if isinstance(e, Min):
        return min(a, b)
    if isinstance(e, Max):
        return max(a, b)
    if isinstance(e, Powr):
        if a == 0 and b > 0:
            return 0.0
        return math.exp(b * math.log(a))
    raise ExprError(f"unknown node {e!r}")


# --- printing --------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _fmt_const(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def to_text(e: Expr) -> str:
    """Render in the syntax accepted by :func:`parse`."""

    def prec(n: Expr) -> int:
        if isinstance(n, Const):
            if n.value.denominator != 1:
                return 2
            return 3 if n.value < 0 else 5
        return _PREC.get(type(n), 5)

    def wrap(n: Expr, p: int, right: bool = False) -> str:
        s = go(n)
        q = prec(n)
        return f"({s})" if q < p or (right and q == p) else s

    def go(n: Expr) -> str:
        if isinstance(n, Var):
            return n.name
        if isinstance(n, Const):
            return _fmt_const(n.value)
        if isinstance(n, Add):
            return f"{wrap(n.a, 1)} + {wrap(n.b, 1, True)}"
        if isinstance(n, Sub):
            return f"{wrap(n.a, 1)} - {wrap(n.b, 1, True)}"
        if isinstance(n, Mul):
            return f"{wrap(n.a, 2)} * {wrap(n.b, 2, True)}"
        if isinstance(n, Div):
            return f"{wrap(n.a, 2)} / {wrap(n.b, 2, True)}"
        if isinstance(n, Neg):
            return f"-{wrap(n.a, 4)}"
        if isinstance(n, Pow):
            return f"{wrap(n.a, 5)}^{n.n}"
        if isinstance(n, Powr):
            return f"powr({go(n.a)}, {go(n.b)})"
        if isinstance(n, Piecewise):
            return (
                f"piecewise({n.var}, {_fmt_const(n.threshold)}, {go(n.below)}, {go(n.above)})"
            )
        name = {Exp: "exp", Ln: "ln", Log2: "log2", Min: "min", Max: "max"}[type(n)]
        return f"{name}({', '.join(go(c) for c in children(n))})"

    return go(e)


# --- parsing ---------------------------------------------------------------


@dataclass(frozen=True)
class Goal:
    """An inequality ``lhs rel rhs`` with rel one of <=, <, >=, >."""

    lhs: Expr
    rel: str
    rhs: Expr

    def __str__(self) -> str:
        return f"{to_text(self.lhs)} {self.rel} {to_text(self.rhs)}"

    def normalised(self) -> tuple[Expr, Expr, bool]:
        """(small, large, strict) such that the goal reads small <(=) large."""
        if self.rel in ("<=", "<"):
            return self.lhs, self.rhs, self.rel == "<"
        return self.rhs, self.lhs, self.rel == ">"


_FUNCS1: dict[str, Callable[[Expr], Expr]] = {
    "exp": Exp,
    "ln": Ln,
    "log2": Log2,
    "sqrt": lambda a: Powr(a, Const(Fraction(1, 2))),
}
_REL = {ast.LtE: "<=", ast.Lt: "<", ast.GtE: ">=", ast.Gt: ">"}


def _prepare(text: str) -> ast.AST:
    src = text.replace("^", "**")
    try:
        return ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExprError(f"cannot parse {text!r}: {exc.msg}") from None


def _const_of(e: Expr) -> Fraction | None:
    if isinstance(e, Const):
        return e.value
    return None


def _convert(node: ast.AST, src: str) -> Expr:
    if isinstance(node, ast.Expression):
        return _convert(node.body, src)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        if isinstance(node.value, bool):
            raise ExprError("booleans are not numbers")
        seg = ast.get_source_segment(src, node) or repr(node.value)
        return Const(Fraction(seg))
    if isinstance(node, ast.Name):
        return Var(node.id)
    if isinstance(node, ast.UnaryOp):
        a = _convert(node.operand, src)
        if isinstance(node.op, ast.USub):
            return neg(a)
        if isinstance(node.op, ast.UAdd):
            return a
    if isinstance(node, ast.BinOp):
        a, b = _convert(node.left, src), _convert(node.right, src)
        op = node.op
        if isinstance(op, ast.Add):
            return add(a, b)
        if isinstance(op, ast.Sub):
            return sub(a, b)
        if isinstance(op, ast.Mult):
            return mul(a, b)
        if isinstance(op, ast.Div):
            return div(a, b)
        if isinstance(op, ast.Pow):
            q = _const_of(b)
            if q is not None and q.denominator == 1:
                n = int(q)
                return power(a, n) if n >= 0 else div(ONE, power(a, -n))
            return Powr(a, b)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        name = node.func.id
        args = [_convert(x, src) for x in node.args]
        if name in _FUNCS1 and len(args) == 1:
            return _FUNCS1[name](args[0])
        if name == "log" and len(args) == 1:
            return Ln(args[0])
        if name == "log" and len(args) == 2:
            base, arg = args
            if _is_const(base, 2):
                return Log2(arg)
            return Div(Ln(arg), Ln(base))
        if name in ("min", "max") and len(args) == 2:
            return (Min if name == "min" else Max)(*args)
        if name == "powr" and len(args) == 2:
            return Powr(*args)
        if name == "piecewise" and len(args) == 4:
            var, thr = args[0], _const_of(args[1])
            if not isinstance(var, Var) or thr is None:
                raise ExprError("piecewise(var, constant, below, above)")
            return Piecewise(var.name, thr, args[2], args[3])
        raise ExprError(f"unknown function {name}/{len(args)}")
    raise ExprError(f"unsupported syntax: {ast.dump(node)[:60]}")


def parse(text: str) -> Expr:
    """Parse an expression such as ``"y * log2(2*(x+y)/(5*y))"``.

    ``^`` is exponentiation; integer exponents give natural powers, any
    other exponent gives ``powr``. Decimal literals are read exactly.
    """
    tree = _prepare(text)
    if isinstance(tree.body, ast.Compare):
        raise ExprError("expected an expression, got a comparison")
    return _convert(tree, text.replace("^", "**").strip())


def parse_goal(text: str) -> Goal:
    tree = _prepare(text)
    body = tree.body
    if not isinstance(body, ast.Compare) or len(body.ops) != 1:
        raise ExprError("goal must be a single comparison such as 'a <= b'")
    rel = _REL.get(type(body.ops[0]))
    if rel is None:
        raise ExprError("goal relation must be one of <=, <, >=, >")
    src = text.replace("^", "**").strip()
    return Goal(_convert(body.left, src), rel, _convert(body.comparators[0], src))


def parse_number(text: str) -> Fraction:
    """Exact value of a constant expression like ``2^-11``."""
    e = simplify(parse(text))
    if not isinstance(e, Const):
        raise ExprError(f"{text!r} is not a rational constant")
    return e.value
