"""Named formulas of the Ramsey upper-bound optimisation and the checks
built on them.

Variables are ``x`` and ``y`` throughout; ``mu`` parameters are exact
rationals baked into the trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .enclose import MAX_BITS
from .expr import (
    Const,
    Div,
    Exp,
    Expr,
    Goal,
    Log2,
    Max,
    Min,
    Mul,
    Neg,
    Piecewise,
    Sub,
    Var,
    as_expr,
    parse,
    parse_goal,
)
from .prover import Certificate, concavity_certificate, prove_ineq

X = Var("x")
Y = Var("y")
ONE = Const(Fraction(1))
TWO = Const(Fraction(2))

F_SEAM = Fraction(3, 4)
FLOOR = Fraction(19, 10)
LEMMA_DELTA = Fraction(1, 2**11)


def _c(q) -> Const:
    return Const(Fraction(q))


def entropy(p: Expr) -> Expr:
    """Binary entropy -p log2 p - (1-p) log2 (1-p)."""
    q = Sub(ONE, p)
    return Sub(Neg(Mul(p, Log2(p))), Mul(q, Log2(q)))


def f1() -> Expr:
    return X + Y + (TWO - X) * entropy(Div(ONE, Sub(TWO, X)))


def f2() -> Expr:
    log2e = Log2(Exp(ONE))
    return Sub(f1(), Mul(Div(log2e, _c(40)), Div(Sub(ONE, X), Sub(TWO, X))))


def f() -> Expr:
    """f1 for x < 3/4, f2 from 3/4 on."""
    return Piecewise("x", F_SEAM, f1(), f2())


def G(mu) -> Expr:
    mu = Fraction(mu)
    if not 0 < mu < 1:
        raise ValueError("mu must lie in (0, 1)")
    m = _c(mu)
    # y * log2(mu (x + y) / y) is kept in this shape so it extends by 0 at y = 0
    last = Mul(Y, Log2(Div(Mul(m, X + Y), Y)))
    return Log2(Div(ONE, m)) + X * Log2(Div(ONE, Sub(ONE, m))) + last


def g() -> Expr:
    return G(Fraction(2, 5))


def ffGG(mu) -> Expr:
    return Max(_c(FLOOR), Min(f(), G(mu)))


def function_library(mu=Fraction(2, 5)) -> dict[str, Expr]:
    return {
        "h": entropy(Var("p")),
        "f1": f1(),
        "f2": f2(),
        "f": f(),
        "G": G(mu),
        "g": g(),
        "ffGG": ffGG(mu),
    }


G_BRANCH_GOAL = (
    "log2(5/2) + (3*y/5 + 5454/10^4) * log2(5/3)"
    " + y * log2(2*(3*y/5 + 5454/10^4 + y)/(5*y)) <= 2 - 1/2^11"
)
G_BRANCH_BOX = {"y": (Fraction(1, 10), Fraction(3, 4))}


def g_branch_check(depth: int = 12, precision_bits: int = 24) -> Certificate:
    """g along the line x = 3y/5 + 0.5454 stays below 2 - 2^-11."""
    return prove_ineq(G_BRANCH_GOAL, G_BRANCH_BOX, {"y": depth}, precision_bits)


@dataclass
class LemmaBudget:
    split_x: int = 18
    split_y: int = 18
    max_boxes: int = 2_000_000


def lemma_12_3_goal(delta=LEMMA_DELTA) -> Goal:
    delta = Fraction(delta)
    if not 0 < delta <= LEMMA_DELTA:
        raise ValueError("delta must satisfy 0 < delta <= 2^-11")
    return Goal(Min(f(), g()), "<", as_expr(2 - delta))


def lemma_12_3_check(
    delta=LEMMA_DELTA,
    budget: LemmaBudget | None = None,
    precision_bits: int = MAX_BITS,
    box: dict | None = None,
) -> Certificate:
    """min(f, g) < 2 - delta on [0,1] x [0,3/4] (or a sub-box).

    A box is discharged as soon as either f or g is certainly small there;
    the f seam at x = 3/4 is cut before any adaptive splitting.
    """
    budget = budget or LemmaBudget()
    box = box or {"x": (0, 1), "y": (0, Fraction(3, 4))}
    return prove_ineq(
        lemma_12_3_goal(delta),
        box,
        {"x": budget.split_x, "y": budget.split_y},
        precision_bits,
        max_boxes=budget.max_boxes,
        seams={"x": [F_SEAM]},
    )


def concave_example() -> Expr:
    return 1 - 1 / (200 * X)


@dataclass
class CorpusEntry:
    name: str
    kind: str  # "derivative", "concave", "goal", "value"
    text: str
    expected: str = ""


def corpus() -> list[CorpusEntry]:
    """Regression set of certified-calculus obligations."""
    return [
        CorpusEntry("d_concave_example", "derivative", "1 - 1/(200*x)", "1/(200*x^2)"),
        CorpusEntry("dd_concave_example", "derivative", "1/(200*x^2)", "-1/(100*x^3)"),
        CorpusEntry("concave_on_tenth_fifth", "concave", "1 - 1/(200*x)", "x=[1/10,1/5]"),
        CorpusEntry("g_branch", "goal", G_BRANCH_GOAL, "y=[1/10,3/4];split y=12;bits 24"),
        CorpusEntry("entropy_half", "value", "-(1/2)*log2(1/2) - (1/2)*log2(1/2)", "1"),
        CorpusEntry("log2_two", "value", "log2(2)", "1"),
    ]


def run_corpus_entry(entry: CorpusEntry) -> tuple[bool, dict]:
    """Check one corpus entry; returns (passed, details)."""
    from .enclose import eval_interval
    from .expr import differentiate, simplify, sub

    if entry.kind == "derivative":
        d = differentiate(parse(entry.text), "x")
        want = parse(entry.expected)
        diff = simplify(sub(d, want))
        # symbolic agreement, falling back to a rigorous zero check on a box
        ok = isinstance(diff, Const) and diff.value == 0
        if not ok:
            cert_hi = prove_ineq(Goal(diff, "<=", _c(0)), {"x": (Fraction(1, 10), 1)}, {"x": 6})
            cert_lo = prove_ineq(Goal(diff, ">=", _c(0)), {"x": (Fraction(1, 10), 1)}, {"x": 6})
            ok = cert_hi.proved and cert_lo.proved
        return ok, {"derivative": str(d)}
    if entry.kind == "concave":
        lo, hi = entry.expected.split("=", 1)[1].strip("[]").split(",")
        cert = concavity_certificate(parse(entry.text), "x", (Fraction(lo), Fraction(hi)))
        return cert.proved, cert.to_dict()
    if entry.kind == "goal":
        cert = g_branch_check()
        return cert.proved, cert.to_dict()
    if entry.kind == "value":
        enc = eval_interval(parse(entry.text), {})
        return Fraction(entry.expected) in enc, {"enclosure": [enc.lo, enc.hi]}
    raise ValueError(f"unknown corpus kind {entry.kind!r}")


__all__ = [
    "G",
    "G_BRANCH_GOAL",
    "LemmaBudget",
    "concave_example",
    "corpus",
    "entropy",
    "f",
    "f1",
    "f2",
    "ffGG",
    "function_library",
    "g",
    "g_branch_check",
    "lemma_12_3_check",
    "lemma_12_3_goal",
    "parse_goal",
    "run_corpus_entry",
]
