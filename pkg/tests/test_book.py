import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bookramsey.book import (
    Book, BookParams, BookState, ConfigError, HeightScale, StepKind, Trace, ceil_root_power, halves, init,
    run, step_class, trace_violations,
)
from bookramsey.graph import Colouring, gen_density, RED, random_colouring


def params(k=4, l=4, mu=Fraction(2, 5), threshold="lower", **kw):
    return BookParams(k, l, mu, Fraction(1, 100), threshold, **kw)


def book_for(c, p, X, Y):
    return Book(p, c, HeightScale(p.k, float(gen_density(c, RED, X, Y)) or 0.5))


def test_ceil_root_power():
    for l in range(1, 300):
        for num, den in ((3, 4), (2, 3), (1, 4)):
            m = ceil_root_power(l, num, den)
            assert m**den >= l**num and (m - 1) ** den < l**num


def test_params_validation_names_the_locale():
    for kw in ({"k": 3, "l": 4}, {"mu": 1}, {"mu": 0}):
        with pytest.raises(ConfigError, match="locale"):
            params(**kw)
    with pytest.raises(ConfigError, match="P0_min"):
        BookParams(4, 4, Fraction(2, 5), Fraction(0))


def test_init_all_red_split():
    bk, s = init(BookParams(4, 4, Fraction(2, 5), Fraction(1, 2)), Colouring.all_red(8), range(4), range(4, 8))
    assert bk.scale.p0 == 1.0 and s.sizes() == {"X": 4, "Y": 4, "A": 0, "B": 0}


def test_init_p0_is_density():
    c = random_colouring(40, 0.7, 0)
    X, Y = halves(40)
    bk, _ = init(params(), c, X, Y)
    assert bk.scale.p0 == float(gen_density(c, RED, X, Y))


def test_init_rejects_low_density_and_overlap():
    with pytest.raises(ConfigError):
        init(params(), Colouring.all_blue(8), range(4), range(4, 8))
    with pytest.raises(ConfigError):
        init(params(), Colouring.all_red(8), range(5), range(4, 8))


def test_termination_examples():
    c = Colouring.all_red(20)
    bk = book_for(c, params(), set(), set(range(10, 20)))
    assert bk.termination_condition(BookState(0, frozenset(), frozenset(range(10, 20))))
    big = BookState(0, frozenset(range(10)), frozenset(range(10, 20)))
    assert bk.density(big) == 1
    assert bk.termination_condition(big) == (10 <= params().size_threshold())


def test_degree_reg_examples():
    c = Colouring.all_red(12)
    s = BookState(0, frozenset(range(6)), frozenset(range(6, 12)))
    assert book_for(c, params(), s.X, s.Y).degree_reg(s).X == s.X
    s0 = BookState(0, frozenset(range(6)), frozenset())
    assert book_for(c, params(), s0.X, s0.Y).degree_reg(s0).X == s0.X


def test_degree_reg_recount():
    c = random_colouring(30, 0.6, 0)
    X, Y = halves(30)
    bk, s = init(params(), c, X, Y)
    p = sum(c.is_red(x, y) for x in X for y in Y) / (15 * 15)
    keep = {x for x in X if sum(c.is_red(x, y) for y in Y) >= (p - math.sqrt(4 ** -0.25)) * 15}
    assert bk.degree_reg(s).X == keep


def test_many_bluish_examples():
    red, blue = Colouring.all_red(10), Colouring.all_blue(10)
    s = BookState(1, frozenset(range(10)), frozenset())
    p = params(threshold="const:1")
    assert not book_for(red, p, s.X, s.Y).many_bluish(s)
    assert book_for(blue, p, s.X, s.Y).many_bluish(s)
    one = BookState(1, frozenset({3}), frozenset())
    assert book_for(blue, p, one.X, one.Y).bluish(one) == []


def test_blue_book_all_blue_ten():
    p = BookParams(4, 4, Fraction(1, 2), Fraction(1, 100), "const:1")
    c = Colouring.all_blue(10)
    s = BookState(1, frozenset(range(10)), frozenset())
    b = book_for(c, p, s.X, s.Y).choose_blue_book(s)
    # spine cap ceil(4^(1/4)) + 2 = 4; every prefix is good here
    assert b.spine == {0, 1, 2, 3} and b.pages == set(range(4, 10)) and b.good


def test_blue_book_single_bluish_vertex():
    # vertex 0 blue to everything, all else red: only 0 is bluish
    c = Colouring.from_predicate(8, lambda i, j: i != 0)
    p = params(threshold="const:1")
    s = BookState(1, frozenset(range(8)), frozenset())
    b = book_for(c, p, s.X, s.Y).choose_blue_book(s)
    assert b.spine == {0} and b.pages == c.blue_neighbours(0)


@settings(max_examples=40)
@given(st.integers(4, 12), st.floats(0.1, 0.9), st.integers(0, 1000))
def test_blue_book_is_a_book_and_never_worse_than_empty(n, rho, seed):
    from bookramsey.graph import BLUE, is_book, BookPair

    c = random_colouring(n, rho, seed)
    s = BookState(1, frozenset(range(n)), frozenset())
    bk = book_for(c, params(threshold="const:1"), s.X, s.Y)
    b = bk.choose_blue_book(s)
    assert is_book(c, BookPair(b.spine, b.pages, BLUE)) and b.good
    assert b.pages == {t for t in s.X - b.spine if all(not c.is_red(t, v) for v in b.spine)}


def test_central_vertex_examples():
    c = Colouring.all_red(10)
    s = BookState(1, frozenset(range(5)), frozenset(range(5, 10)))
    assert book_for(c, params(), s.X, s.Y).choose_central_vertex(s) == 0
    one = BookState(1, frozenset({7}), frozenset(range(3)))
    assert book_for(c, params(), one.X, one.Y).choose_central_vertex(one) == 7


def test_central_vertex_recount():
    c = random_colouring(24, 0.5, 0)
    X, Y = set(range(12)), set(range(12, 24))
    s = BookState(1, frozenset(X), frozenset(Y))
    p = params()
    cands = [x for x in sorted(X) if sum(not c.is_red(x, z) for z in X - {x}) <= p.mu * len(X)]
    want = max(cands, key=lambda x: (sum(c.is_red(x, y) for y in Y), -x))
    assert book_for(c, p, X, Y).choose_central_vertex(s) == want


def test_reddish_examples():
    c = Colouring.all_red(10)
    s = BookState(1, frozenset(range(5)), frozenset(range(5, 10)))
    assert book_for(c, params(), s.X, s.Y).reddish(s, 0)
    # x has no red neighbour in Y: inner density 0
    d = Colouring.from_predicate(10, lambda i, j: not (i == 0 and j >= 5))
    bk = book_for(d, params(), s.X, s.Y)
    p = bk.density(s)
    assert p - bk.scale.alpha(bk.scale.hgt(p)) > 0 and not bk.reddish(s, 0)


def test_reddish_recount():
    c = random_colouring(24, 0.5, 3)
    X, Y = frozenset(range(12)), frozenset(range(12, 24))
    s = BookState(1, X, Y)
    bk = book_for(c, params(), X, Y)
    p = sum(c.is_red(x, y) for x in X for y in Y) / 144
    for x in X:
        nx = [v for v in X if v != x and c.is_red(x, v)]
        ny = [v for v in Y if c.is_red(x, v)]
        inner = sum(c.is_red(a, b) for a in nx for b in ny) / (len(nx) * len(ny)) if nx and ny else 0
        thr = p - bk.scale.alpha(bk.scale.hgt(p))
        if abs(inner - thr) > 1e-12:
            assert bk.reddish(s, x) == (inner >= thr)


def test_height_scale():
    hs = HeightScale(16, 0.3)
    for p in (0.0, 0.3, 0.31, 0.5, 0.9, 1.0):
        h = hs.hgt(p)
        assert hs.q(h) >= p and (h == 1 or hs.q(h - 1) < p)
        assert hs.alpha(h) == pytest.approx(hs.q(h) - hs.q(h - 1))


def test_next_state_all_red_is_red_step():
    c = Colouring.all_red(16)
    X, Y = halves(16)
    bk, s = init(params(), c, X, Y)
    s1 = bk.degree_reg(s)
    s2, kind, info = bk.next_state(s1)
    assert kind is StepKind.RED and info["x"] == 0
    assert s2.A == {0} and s2.X == s1.X - {0} and s2.Y == s1.Y


def test_next_state_all_blue_is_big_blue():
    c = Colouring.all_blue(10)
    p = BookParams(4, 4, Fraction(1, 2), Fraction(1, 100), "const:1")
    s = BookState(1, frozenset(range(10)), frozenset())
    bk = book_for(c, p, s.X, s.Y)
    s2, kind, info = bk.next_state(s)
    assert kind is StepKind.BIG_BLUE
    assert s2.B == {0, 1, 2, 3} and s2.X == set(range(4, 10))


def test_run_halts_immediately():
    t = run(params(threshold="es"), Colouring.all_red(8), range(4), range(4, 8))
    assert t.records == [] and t.halted_point == 0


def test_run_all_red_alternates_d_and_r():
    t = run(params(), Colouring.all_red(16), *halves(16))
    kinds = [r["kind"] for r in t.records]
    assert kinds == ["D", "R"] * 4 and t.halted_point == 8
    assert [r["X"] for r in t.records] == [8, 8, 7, 7, 6, 6, 5, 5]
    sc = step_class(t)
    assert not sc.B and not sc.S and sc.R == {1, 3, 5, 7} and sc.D == {0, 2, 4, 6}


def test_run_deterministic():
    c = random_colouring(60, 0.55, 0)
    a = run(params(8, 8), c, *halves(60)).dumps()
    b = run(params(8, 8), random_colouring(60, 0.55, 0), *halves(60)).dumps()
    assert a == b


def test_budget_exhausted():
    t = run(params(max_steps=2), Colouring.all_red(16), *halves(16))
    assert t.final["status"] == "budget_exhausted" and t.halted_point is None


def test_trace_round_trip():
    t = run(params(), Colouring.all_red(16), *halves(16))
    back = Trace.load(t.dumps().splitlines())
    assert back.dumps() == t.dumps()


def test_step_class_empty_trace():
    t = run(params(threshold="es"), Colouring.all_red(8), range(4), range(4, 8))
    sc = step_class(t, horizon=5)
    assert sc.halted_point == 0 and sc.H == set(range(5)) and not (sc.D | sc.R | sc.B | sc.S)


@settings(max_examples=30)
@given(st.integers(8, 24), st.floats(0.3, 0.9), st.integers(0, 10**6), st.sampled_from(["lower", "const:1", "const:2"]))
def test_step_class_partition(n, rho, seed, thr):
    c = random_colouring(n, rho, seed)
    try:
        t = run(params(threshold=thr), c, *halves(n))
    except ConfigError:
        return
    horizon = len(t.records) + 4
    sc = step_class(t, horizon)
    parts = [sc.D, sc.R, sc.B, sc.S, sc.H]
    union = set().union(*parts)
    assert sum(map(len, parts)) == len(union)
    if t.halted_point is not None:
        assert union == set(range(horizon))


# --- independent stepper --------------------------------------------------


def oracle_run(c, p, X, Y):
    """Plain-set re-implementation of the stepper and its policies."""
    n = c.n
    red = lambda a, b: c.is_red(a, b)
    blue_nb = lambda v, S: {w for w in S if w != v and not red(v, w)}
    red_nb = lambda v, S: {w for w in S if w != v and red(v, w)}

    def dens(S, T):
        return Fraction(sum(red(a, b) for a in S for b in T), len(S) * len(T)) if S and T else Fraction(0)

    X, Y, A, B = set(X), set(Y), set(), set()
    p0 = float(dens(X, Y))
    eps = p.k ** -0.25
    q = lambda h: p0 + ((1 + eps) ** h - 1) / p.k

    def hgt(v):
        h = 1
        while float(v) > q(h):
            h += 1
        return h

    alpha = lambda h: eps * (1 + eps) ** (h - 1) / p.k
    kinds = []
    i = 0
    while True:
        d = dens(X, Y)
        if len(X) <= p.size_threshold() or d <= Fraction(1, p.k):
            return kinds, (X, Y, A, B), "halted"
        if i >= p.max_steps:
            return kinds, (X, Y, A, B), "budget"
        if i % 2 == 0:
            X = {x for x in X if len(red_nb(x, Y)) >= (float(d) - math.sqrt(eps)) * len(Y)}
            kinds.append("D")
        else:
            bl = [x for x in sorted(X) if len(blue_nb(x, X)) >= p.mu * len(X)]
            if len(bl) >= p.bluish_threshold():
                cands = sorted(bl, key=lambda x: (-len(blue_nb(x, X)), x))
                S, T, found = [], set(X), [((), set(X))]
                while len(S) < p.spine_cap():
                    best = None
                    for rank, v in enumerate(cands):
                        if v not in T:
                            continue
                        t1 = blue_nb(v, T)
                        ahead = max((len(blue_nb(w, t1)) for w in cands if w in t1), default=-1)
                        key = (ahead, len(t1), -rank)
                        if best is None or key > best[0]:
                            best = (key, v, t1)
                    if best is None:
                        break
                    S.append(best[1])
                    T = best[2]
                    found.append((tuple(sorted(S)), T))
                good = [f for f in found if len(f[1]) >= p.mu ** len(f[0]) * len(X) / 2]
                spine, pages = min(good or found, key=lambda f: (-len(f[0]), -len(f[1]), f[0]))
                B |= set(spine)
                X = set(pages)
                kinds.append("B")
            else:
                cands = [x for x in sorted(X) if len(blue_nb(x, X)) <= p.mu * len(X)]
                if not cands:
                    return kinds, (X, Y, A, B), "no_central"
                x = max(cands, key=lambda v: (len(red_nb(v, Y)), -v))
                nx, ny = red_nb(x, X), red_nb(x, Y)
                if dens(nx, ny) >= float(d) - alpha(hgt(d)):
                    X, Y, A = nx, ny, A | {x}
                    kinds.append("R")
                else:
                    X, Y, B = blue_nb(x, X), ny, B | {x}
                    kinds.append("S")
        i += 1


@settings(max_examples=80)
@given(
    st.integers(6, 12),
    st.floats(0.2, 0.95),
    st.integers(0, 10**6),
    st.sampled_from(["lower", "const:1", "const:2", "const:0"]),
    st.sampled_from([Fraction(1, 5), Fraction(2, 5), Fraction(3, 5)]),
    st.integers(1, 4),
)
def test_stepper_matches_independent_oracle(n, rho, seed, thr, mu, l):
    c = random_colouring(n, rho, seed)
    p = BookParams(4, l, mu, Fraction(1, 100), thr)
    X, Y = halves(n)
    try:
        t = run(p, c, X, Y)
    except ConfigError:
        return
    kinds, (ox, oy, oa, ob), status = oracle_run(c, p, X, Y)
    assert [r["kind"] for r in t.records] == kinds
    last = t.states[-1]
    assert (last.X, last.Y, last.A, last.B) == (ox, oy, oa, ob)
    assert trace_violations(c, t) == []
