from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bookramsey.numerics.enclose import eval_interval
from bookramsey.numerics.expr import ExprError, Var, parse
from bookramsey.numerics.interval import Interval
from bookramsey.numerics.library import concave_example
from bookramsey.numerics.prover import PROVED, REFUTED, UNKNOWN, concavity_certificate, prove_ineq


def test_square_nonnegative():
    cert = prove_ineq("x^2 >= 0", {"x": (-1, 1)}, {"x": 1})
    assert cert.verdict == PROVED


def test_positive_refuted_with_witness():
    cert = prove_ineq("x > 0", {"x": (-1, 1)}, {"x": 8})
    assert cert.verdict == REFUTED
    assert -1 <= cert.witness["x"] < 0


def test_unknown_when_budget_runs_out():
    # true, but the unsplit enclosure of x*(1-x) is [0, 1]
    cert = prove_ineq("x*(1-x) <= 1/4 + 1/1000", {"x": (0, 1)}, {"x": 3})
    assert cert.verdict == UNKNOWN
    assert cert.undischarged


def test_missing_variable_rejected():
    with pytest.raises(ValueError):
        prove_ineq("x + y <= 3", {"x": (0, 1)})


def test_precision_cap():
    with pytest.raises(ValueError):
        prove_ineq("x <= 1", {"x": (0, 1)}, precision_bits=60)
    with pytest.raises(ValueError):
        eval_interval(parse("x"), {"x": (0, 1)}, precision_bits=1)


def test_uncovered_variable_in_eval():
    with pytest.raises((ValueError, ExprError, KeyError)):
        eval_interval(parse("x + y"), {"x": (0, 1)})


def test_log2_point_width():
    for bits in (8, 24, 53):
        z = eval_interval(parse("log2(x)"), {"x": Interval(2)}, bits)
        assert 1 in z and z.width <= 2.0 ** (1 - bits)


def test_entropy_half():
    z = eval_interval(parse("-p*log2(p) - (1-p)*log2(1-p)"), {"p": Fraction(1, 2)})
    assert 1 in z


def test_deterministic():
    goal = "x*ln(x) + y >= -1/2"
    box = {"x": (0, 2), "y": (0, 1)}
    a = prove_ineq(goal, box, {"x": 6, "y": 6})
    b = prove_ineq(goal, box, {"x": 6, "y": 6})
    assert a.to_dict() == b.to_dict()


GOALS = [
    ("x*(1-x) <= 1/4 + 1/1000", {"x": (0, 1)}, 9, 24),
    ("exp(x) >= 1 + x - 1/100", {"x": (-1, 1)}, 8, 30),
    ("log2(1 + x) >= x/2 - 1/100", {"x": (0, 1)}, 6, 24),
]


@pytest.mark.parametrize("goal,box,depth,bits", GOALS)
def test_certificate_monotone_in_precision_and_depth(goal, box, depth, bits):
    base = prove_ineq(goal, box, {"x": depth}, bits)
    assert base.proved
    assert prove_ineq(goal, box, {"x": depth}, min(bits + 8, 53)).proved
    assert prove_ineq(goal, box, {"x": depth + 1}, bits).proved


@settings(max_examples=30)
@given(st.integers(1, 20), st.integers(0, 6))
def test_random_quadratic_monotone(c, depth):
    # (x - c/20)^2 >= -1/100 on [0, 1]
    goal = f"(x - {c}/20)^2 >= -1/100"
    a = prove_ineq(goal, {"x": (0, 1)}, {"x": depth}, 24)
    if a.proved:
        assert prove_ineq(goal, {"x": (0, 1)}, {"x": depth + 1}, 24).proved
        assert prove_ineq(goal, {"x": (0, 1)}, {"x": depth}, 32).proved


def test_concavity_example():
    cert = concavity_certificate(concave_example(), "x", (Fraction(1, 10), Fraction(1, 5)))
    assert cert.verdict == PROVED


@pytest.mark.parametrize("lo,hi", [(-5, 5), (0, 1), (Fraction(1, 3), 100)])
def test_linear_concave(lo, hi):
    assert concavity_certificate(Var("x"), "x", (lo, hi)).verdict == PROVED


def test_square_not_concave():
    assert concavity_certificate(parse("x^2"), "x", (0, 1)).verdict == REFUTED


def test_certificate_json_has_no_clock():
    d = prove_ineq("x <= 2", {"x": (0, 1)}).to_dict()
    assert "elapsed" not in d and d["verdict"] == PROVED
