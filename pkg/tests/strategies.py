"""Random expression trees for property tests and fuzzing."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from bookramsey.numerics.expr import (
    Add, Const, Div, Exp, Ln, Log2, Max, Min, Mul, Neg, Pow, Powr, Sub, Var,
)

VARS = ("x", "y")

consts = st.fractions(min_value=-4, max_value=4, max_denominator=16).map(Const)
leaves = st.one_of(st.sampled_from([Var(v) for v in VARS]), consts)


def _extend(children):
    return st.one_of(
        st.builds(Add, children, children),
        st.builds(Sub, children, children),
        st.builds(Mul, children, children),
        st.builds(Div, children, children),
        st.builds(Neg, children),
        st.builds(Pow, children, st.integers(0, 4)),
        st.builds(Exp, children),
        st.builds(Ln, children),
        st.builds(Log2, children),
        st.builds(Min, children, children),
        st.builds(Max, children, children),
        st.builds(Powr, children, consts),
    )


exprs = st.recursive(leaves, _extend, max_leaves=8)


def _smooth(children):
    # differentiable everywhere the value is defined
    return st.one_of(
        st.builds(Add, children, children),
        st.builds(Sub, children, children),
        st.builds(Mul, children, children),
        st.builds(Div, children, children),
        st.builds(Neg, children),
        st.builds(Pow, children, st.integers(0, 3)),
        st.builds(Exp, children),
        st.builds(Ln, children),
        st.builds(Log2, children),
    )


smooth_exprs = st.recursive(leaves, _smooth, max_leaves=6)


def random_expr(rng: random.Random, depth: int = 4):
    """Plain-random generator used by the bulk soundness fuzzer."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return Var(rng.choice(VARS))
        return Const(Fraction(rng.randint(-40, 40), rng.randint(1, 10)))
    kind = rng.randrange(13)
    a = random_expr(rng, depth - 1)
    if kind == 0:
        return Add(a, random_expr(rng, depth - 1))
    if kind == 1:
        return Sub(a, random_expr(rng, depth - 1))
    if kind == 2:
        return Mul(a, random_expr(rng, depth - 1))
    if kind == 3:
        return Div(a, random_expr(rng, depth - 1))
    if kind == 4:
        return Neg(a)
    if kind == 5:
        return Pow(a, rng.randint(0, 5))
    if kind == 6:
        return Exp(a)
    if kind == 7:
        return Ln(a)
    if kind == 8:
        return Log2(a)
    if kind == 9:
        return Min(a, random_expr(rng, depth - 1))
    if kind == 10:
        return Max(a, random_expr(rng, depth - 1))
    if kind == 11:
        return Powr(a, Const(Fraction(rng.randint(-12, 12), rng.randint(1, 4))))
    # entropy-shaped products exercise the special enclosures
    u = random_expr(rng, depth - 1)
    if rng.random() < 0.5:
        return Mul(u, rng.choice([Ln, Log2])(u))
    return Mul(u, rng.choice([Ln, Log2])(Div(a, u)))
