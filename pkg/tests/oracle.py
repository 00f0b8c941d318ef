"""High-precision point evaluation of expression trees with mpmath.

Independent of the interval code: it walks the tree and uses mpmath's own
elementary functions. Returns None where the value is undefined or not real.
"""

import mpmath

from bookramsey.numerics.expr import (
    Add, Const, Div, Exp, Ln, Log2, Max, Min, Mul, Neg, Piecewise, Pow, Powr, Sub, Var,
)

mpmath.mp.dps = 40


class Undefined(Exception):
    pass


def _log(x):
    if x < 0:
        raise Undefined
    if x == 0:
        return mpmath.ninf
    return mpmath.log(x)


def _exp(t):
    # beyond +-1e6 the result is far outside binary64, and mpmath would
    # spend minutes on ln 2 at the working precision the exponent needs
    if t > 10**6:
        return mpmath.inf
    if t < -(10**6):
        return mpmath.mpf(0)
    return mpmath.exp(t)


def _is_log_of(node, u):
    return isinstance(node, (Ln, Log2)) and (node.a == u or (isinstance(node.a, Div) and node.a.b == u))


def mp_eval(e, env):
    if isinstance(e, Var):
        return mpmath.mpf(env[e.name])
    if isinstance(e, Const):
        return mpmath.mpf(e.value.numerator) / e.value.denominator
    if isinstance(e, Piecewise):
        x = mpmath.mpf(env[e.var])
        t = mpmath.mpf(e.threshold.numerator) / e.threshold.denominator
        return mp_eval(e.below if x < t else e.above, env)
    if isinstance(e, Mul):
        # u*log(u) and u*log(v/u) are continuous at u = 0 with value 0
        for u, other in ((e.a, e.b), (e.b, e.a)):
            if _is_log_of(other, u) and mp_eval(u, env) == 0:
                return mpmath.mpf(0)
        a, b = mp_eval(e.a, env), mp_eval(e.b, env)
        if (mpmath.isinf(a) and b == 0) or (mpmath.isinf(b) and a == 0):
            raise Undefined
        return a * b
    if isinstance(e, Pow):
        if e.n == 0:
            return mpmath.mpf(1)  # IEEE pow: inf^0 = 1
        return mp_eval(e.a, env) ** e.n
    if isinstance(e, Neg):
        return -mp_eval(e.a, env)
    if isinstance(e, Exp):
        return _exp(mp_eval(e.a, env))
    if isinstance(e, Ln):
        return _log(mp_eval(e.a, env))
    if isinstance(e, Log2):
        v = _log(mp_eval(e.a, env))
        return v if mpmath.isinf(v) else v / mpmath.log(2)
    a, b = mp_eval(e.a, env), mp_eval(e.b, env)
    if mpmath.isnan(a) or mpmath.isnan(b):
        raise Undefined
    if isinstance(e, Add):
        if mpmath.isinf(a) and mpmath.isinf(b) and a != b:
            raise Undefined
        return a + b
    if isinstance(e, Sub):
        if mpmath.isinf(a) and mpmath.isinf(b) and a == b:
            raise Undefined
        return a - b
    if isinstance(e, Div):
        if b == 0:
            raise Undefined
        return a / b
    if isinstance(e, Min):
        return min(a, b)
    if isinstance(e, Max):
        return max(a, b)
    if isinstance(e, Powr):
        if a < 0:
            raise Undefined
        if a == 0:
            if b > 0:
                return mpmath.mpf(0)
            raise Undefined
        return _exp(b * mpmath.log(a))
    raise TypeError(e)


def value(e, env):
    """Real value at the point, or None if undefined there."""
    try:
        v = mp_eval(e, env)
    except (Undefined, ZeroDivisionError, OverflowError, ValueError):
        return None
    if isinstance(v, mpmath.mpc) or mpmath.isnan(v):
        return None
    return v


def contains(iv, v) -> bool:
    """Whether the interval holds the mpmath value exactly."""
    lo = mpmath.mpf(iv.lo) if iv.lo != float("-inf") else mpmath.ninf
    hi = mpmath.mpf(iv.hi) if iv.hi != float("inf") else mpmath.inf
    return lo <= v <= hi
