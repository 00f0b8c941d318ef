"""Interval evaluation of expression trees.

Trees are lowered once into nested closures (cached per tree) so that the
branch-and-bound prover can re-evaluate the same goal over many boxes
cheaply. Repeated subtrees are evaluated once per call.

Two product shapes get their continuous extension at zero instead of the
naive ``0 * -inf`` blow-up:

* ``u * log(u)``      -> 0 at u = 0
* ``u * log(v / u)``  -> 0 at u = 0

Both occur in the entropy-style formulas of the function library, at the
box edges x = 1 and y = 0.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

from . import interval as iv
from .expr import (
    Add,
    Const,
    Div,
    Exp,
    Expr,
    ExprError,
    Ln,
    Log2,
    Max,
    Min,
    Mul,
    Neg,
    Piecewise,
    Pow,
    Powr,
    Sub,
    Var,
    children,
)
from .interval import Interval

Env = Mapping[str, Interval]
Compiled = Callable[[Env, list], Interval]

MAX_BITS = 53


def _log_arg(e: Expr):
    """(argument, base2) if e is Ln/Log2, else None."""
    if isinstance(e, Ln):
        return e.a, False
    if isinstance(e, Log2):
        return e.a, True
    return None


def _match_entropy(e: Mul):
    """Recognise u*log(u) and u*log(v/u) in either factor order."""
    for u, other in ((e.a, e.b), (e.b, e.a)):
        la = _log_arg(other)
        if la is None:
            continue
        arg, base2 = la
        if arg == u:
            return ("xlogx", u, None, base2)
        if isinstance(arg, Div) and arg.b == u:
            return ("xlog_ratio", u, arg.a, base2)
    return None


@lru_cache(maxsize=256)
def compile_expr(e: Expr) -> tuple[Compiled, int]:
    """Lower ``e`` to a closure ``f(env, cache)``; returns (f, cache_size)."""
    counts: Counter = Counter()
    stack = [e]
    while stack:
        n = stack.pop()
        counts[n] += 1
        if counts[n] == 1:
            stack.extend(children(n))
    shared = {n: i for i, n in enumerate(n for n, c in counts.items() if c > 1 and not isinstance(n, (Var, Const)))}
    built: dict[Expr, Compiled] = {}

    def build(n: Expr) -> Compiled:
        if n in built:
            return built[n]
        f = _lower(n, build)
        slot = shared.get(n)
        if slot is not None:
            inner = f

            def f(env, cache, inner=inner, slot=slot):
                r = cache[slot]
                if r is None:
                    r = cache[slot] = inner(env, cache)
                return r

        built[n] = f
        return f

    return build(e), len(shared)


def _lower(n: Expr, build) -> Compiled:
    if isinstance(n, Var):
        name = n.name

        def f(env, cache):
            try:
                return env[name]
            except KeyError:
                raise ExprError(f"variable {name!r} not covered by the box") from None

        return f
    if isinstance(n, Const):
        c = Interval.exact(n.value)
        return lambda env, cache: c
    if isinstance(n, Mul):
        m = _match_entropy(n)
        if m is not None:
            kind, u, v, base2 = m
            fu = build(u)
            if kind == "xlogx":
                if base2:
                    return lambda env, cache: iv.xlogx(fu(env, cache)) / iv.LN2
                return lambda env, cache: iv.xlogx(fu(env, cache))
            fv = build(v)
            if base2:
                return lambda env, cache: iv.xlog_ratio(fu(env, cache), fv(env, cache)) / iv.LN2
            return lambda env, cache: iv.xlog_ratio(fu(env, cache), fv(env, cache))
        fa, fb = build(n.a), build(n.b)
        return lambda env, cache: fa(env, cache) * fb(env, cache)
    if isinstance(n, Add):
        fa, fb = build(n.a), build(n.b)
        return lambda env, cache: fa(env, cache) + fb(env, cache)
    if isinstance(n, Sub):
        fa, fb = build(n.a), build(n.b)
        return lambda env, cache: fa(env, cache) - fb(env, cache)
    if isinstance(n, Div):
        fa, fb = build(n.a), build(n.b)
        return lambda env, cache: fa(env, cache) / fb(env, cache)
    if isinstance(n, Neg):
        fa = build(n.a)
        return lambda env, cache: -fa(env, cache)
    if isinstance(n, Pow):
        fa, k = build(n.a), n.n
        return lambda env, cache: fa(env, cache) ** k
    if isinstance(n, Powr):
        fa, fb = build(n.a), build(n.b)
        return lambda env, cache: iv.powr(fa(env, cache), fb(env, cache))
    if isinstance(n, Exp):
        fa = build(n.a)
        return lambda env, cache: iv.exp(fa(env, cache))
    if isinstance(n, Ln):
        fa = build(n.a)
        return lambda env, cache: iv.log(fa(env, cache))
    if isinstance(n, Log2):
        fa = build(n.a)
        return lambda env, cache: iv.log2(fa(env, cache))
    if isinstance(n, Min):
        fa, fb = build(n.a), build(n.b)
        return lambda env, cache: iv.iv_min(fa(env, cache), fb(env, cache))
    if isinstance(n, Max):
        fa, fb = build(n.a), build(n.b)
        return lambda env, cache: iv.iv_max(fa(env, cache), fb(env, cache))
    if isinstance(n, Piecewise):
        fbelow, fabove = build(n.below), build(n.above)
        t = Interval.exact(n.threshold)
        t_lo, t_hi = t.lo, t.hi
        var = n.var

        def f(env, cache):
            try:
                x = env[var]
            except KeyError:
                raise ExprError(f"variable {var!r} not covered by the box") from None
            if x.hi < t_lo:
                return fbelow(env, cache)
            if x.lo >= t_hi:
                return fabove(env, cache)
            return fbelow(env, cache).hull(fabove(env, cache))

        return f
    raise ExprError(f"unknown node {n!r}")


def as_interval(v) -> Interval:
    if isinstance(v, Interval):
        return v
    if isinstance(v, (tuple, list)):
        lo, hi = v
        return Interval(iv.fraction_dn(Fraction(lo)), iv.fraction_up(Fraction(hi)))
    return Interval.exact(Fraction(v))


def check_bits(precision_bits: int) -> None:
    if not 2 <= precision_bits <= MAX_BITS:
        raise ValueError(f"precision_bits must lie in [2, {MAX_BITS}], got {precision_bits}")


def eval_interval(e: Expr, env: Mapping[str, object], precision_bits: int = MAX_BITS) -> Interval:
    """Enclosure of the range of ``e`` over the box ``env``.

    ``env`` values may be :class:`Interval`, ``(lo, hi)`` pairs or numbers.
    The result is widened to ``precision_bits`` significant bits.
    Domain violations (log of a negative, division by an interval holding
    zero) yield infinite endpoints rather than exceptions.
    """
    check_bits(precision_bits)
    f, nslots = compile_expr(e)
    box = {k: as_interval(v) for k, v in env.items()}
    return iv.round_out(f(box, [None] * nslots), precision_bits)
