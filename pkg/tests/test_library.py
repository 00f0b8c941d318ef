import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bookramsey.numerics.enclose import eval_interval
from bookramsey.numerics.expr import evaluate, parse
from bookramsey.numerics.library import (
    FLOOR, G, LemmaBudget, corpus, entropy, f, f1, f2, ffGG, function_library, g, lemma_12_3_check,
    lemma_12_3_goal, run_corpus_entry, X,
)
from bookramsey.numerics.prover import PROVED

mpmath.mp.dps = 30


def mp_h(p):
    p = mpmath.mpf(p)
    t = lambda u: 0 if u == 0 else -u * mpmath.log(u, 2)
    return t(p) + t(1 - p)


def mp_f1(x, y):
    x, y = mpmath.mpf(x), mpmath.mpf(y)
    return x + y + (2 - x) * mp_h(1 / (2 - x))


def mp_G(mu, x, y):
    mu = mpmath.mpf(mu.numerator) / mu.denominator
    x, y = mpmath.mpf(x), mpmath.mpf(y)
    tail = 0 if y == 0 else y * mpmath.log(mu * (x + y) / y, 2)
    return mpmath.log(1 / mu, 2) + x * mpmath.log(1 / (1 - mu), 2) + tail


def test_f1_example():
    z = eval_interval(f1(), {"x": 1, "y": Fraction(1, 2)})
    assert Fraction(3, 2) in z


def test_G_cancels_at_x_zero():
    z = eval_interval(G(Fraction(2, 5)), {"x": 0, "y": 1})
    assert 0 in z and z.width < 1e-14


def test_entropy_half():
    assert 1 in eval_interval(entropy(parse("p")), {"p": Fraction(1, 2)})


def test_entropy_endpoints_are_zero():
    for p in (0, 1):
        assert 0 in eval_interval(entropy(parse("p")), {"p": p})


def test_g_on_branch_line_at_three_quarters():
    y = Fraction(3, 4)
    x = 3 * y / 5 + Fraction(5454, 10**4)
    z = eval_interval(g(), {"x": x, "y": y})
    assert abs(z.mid - 1.978) <= 0.01
    assert z.width < 1e-12


@given(st.floats(0, 1), st.floats(0, 0.75))
def test_library_matches_high_precision(x, y):
    env = {"x": x, "y": y}
    z1 = eval_interval(f1(), env)
    assert z1.lo <= mp_f1(x, y) <= z1.hi
    zg = eval_interval(g(), env)
    assert zg.lo <= mp_G(Fraction(2, 5), x, y) <= zg.hi


@given(st.floats(0, 1), st.floats(0, 0.75))
def test_f_is_piecewise_at_three_quarters(x, y):
    env = {"x": x, "y": y}
    branch = f1() if x < 0.75 else f2()
    assert evaluate(f(), env) == pytest.approx(evaluate(branch, env))


def test_f2_subtracts_the_log_e_term():
    env = {"x": 0.8, "y": 0.3}
    gap = evaluate(f1(), env) - evaluate(f2(), env)
    assert gap == pytest.approx(math.log2(math.e) / 40 * (0.2 / 1.2))


@given(st.floats(0, 1), st.floats(0, 0.75), st.floats(0, 1), st.floats(0, 0.75))
def test_ffGG_floor(a, b, c, d):
    box = {"x": (min(a, c), max(a, c)), "y": (min(b, d), max(b, d))}
    assert eval_interval(ffGG(Fraction(2, 5)), box).lo >= float(FLOOR) - 1e-15


def test_function_library_names():
    assert set(function_library()) >= {"h", "f1", "f2", "f", "G", "g", "ffGG"}


def test_lemma_sub_box_discharged_quickly():
    cert = lemma_12_3_check(box={"x": (0, Fraction(1, 10)), "y": (Fraction(1, 2), Fraction(3, 4))})
    assert cert.verdict == PROVED
    assert cert.boxes_examined < 200


def test_lemma_delta_precondition():
    with pytest.raises(ValueError):
        lemma_12_3_goal(-1)
    with pytest.raises(ValueError):
        lemma_12_3_goal(Fraction(1, 2))
    lemma_12_3_goal(Fraction(1, 2**12))


@pytest.mark.slow
def test_lemma_weaker_delta_proved():
    cert = lemma_12_3_check(Fraction(1, 2**12), precision_bits=24)
    assert cert.verdict == PROVED


def test_tight_budget_reports_unknown():
    cert = lemma_12_3_check(budget=LemmaBudget(split_x=3, split_y=3))
    assert cert.verdict == "unknown"
    assert cert.undischarged


@pytest.mark.parametrize("entry", corpus(), ids=lambda e: e.name)
def test_corpus(entry):
    ok, details = run_corpus_entry(entry)
    assert ok, details


def test_linear_x_var():
    assert X.name == "x"
