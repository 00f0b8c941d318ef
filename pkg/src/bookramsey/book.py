"""The book algorithm as an explicit state machine.

State is (X, Y, A, B). Even steps prune X (degree regularisation); odd
steps are a big blue step, a red step or a density-boost step. Every step
is recorded so traces can be replayed and checked independently.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable

from .graph import (
    BLUE,
    RED,
    BookPair,
    Colouring,
    is_clique,
    mask_of,
    members,
    popcount,
    red_density,
)
from .ramsey import ThresholdFn, threshold_function

CENTRAL_POLICY = "argmax-red-Y-degree"
BOOK_POLICY = "greedy-lookahead"
DEGREE_POLICY = "p-minus-sqrt-eps"


class ConfigError(ValueError):
    pass


class AlgorithmError(RuntimeError):
    pass


class StepKind(str, enum.Enum):
    DEGREE_REG = "D"
    BIG_BLUE = "B"
    RED = "R"
    DENSITY_BOOST = "S"
    HALTED = "H"


def ceil_root_power(l: int, num: int, den: int) -> int:
    """ceil(l^(num/den)) in exact integer arithmetic."""
    if l <= 0:
        return 0
    target = l**num
    m = max(1, int(round(l ** (num / den))) - 1)
    while m**den < target:
        m += 1
    while m > 1 and (m - 1) ** den >= target:
        m -= 1
    return m


@dataclass
class BookParams:
    k: int
    l: int
    mu: Fraction
    p0_min: Fraction
    threshold: str = "es"
    max_steps: int | None = None
    threshold_fn: ThresholdFn | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.mu = Fraction(self.mu)
        self.p0_min = Fraction(self.p0_min)
        if self.k < 1 or self.l < 1:
            raise ConfigError("k and l must be positive (locale Book)")
        if self.l > self.k:
            raise ConfigError("need l <= k (locale Book)")
        if not 0 < self.mu < 1:
            raise ConfigError("need 0 < mu < 1 (locale Book)")
        if not 0 < self.p0_min < 1:
            raise ConfigError("need 0 < p0_min < 1 (locale P0_min)")
        if self.max_steps is None:
            self.max_steps = 4 * (self.k + self.l)
        if self.threshold_fn is None:
            self.threshold_fn = threshold_function(self.threshold)

    @property
    def eps(self) -> float:
        return self.k ** -0.25

    def size_threshold(self) -> int:
        return self.threshold_fn(self.k, ceil_root_power(self.l, 3, 4))

    def bluish_threshold(self) -> int:
        return self.threshold_fn(self.k, ceil_root_power(self.l, 2, 3))

    def spine_cap(self) -> int:
        return ceil_root_power(self.l, 1, 4) + 2

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "mu": str(self.mu),
            "p0_min": str(self.p0_min),
            "threshold": self.threshold,
            "max_steps": self.max_steps,
        }


@dataclass(frozen=True)
class HeightScale:
    """Density ladder q(h) = p0 + ((1+eps)^h - 1)/k."""

    k: int
    p0: float

    @property
    def eps(self) -> float:
        return self.k ** -0.25

    def q(self, h: int) -> float:
        return self.p0 + ((1 + self.eps) ** h - 1) / self.k

    def hgt(self, p) -> int:
        p = float(p)
        h = 1
        while p > self.q(h):
            h += 1
        return h

    def alpha(self, h: int) -> float:
        return self.eps * (1 + self.eps) ** (h - 1) / self.k


@dataclass(frozen=True)
class BookState:
    i: int
    X: frozenset[int]
    Y: frozenset[int]
    A: frozenset[int] = frozenset()
    B: frozenset[int] = frozenset()
    halted: bool = False

    def sizes(self) -> dict[str, int]:
        return {"X": len(self.X), "Y": len(self.Y), "A": len(self.A), "B": len(self.B)}


@dataclass
class Book:
    """A colouring plus parameters; the operations of the algorithm."""

    params: BookParams
    c: Colouring
    scale: HeightScale

    def density(self, s: BookState) -> Fraction:
        return red_density(self.c, s.X, s.Y)

    def blue_deg(self, x: int, X: int) -> int:
        return popcount(self.c.blue_mask(x) & X)

    def termination_condition(self, s: BookState) -> bool:
        if len(s.X) <= self.params.size_threshold():
            return True
        return self.density(s) <= Fraction(1, self.params.k)

    def degree_reg(self, s: BookState) -> BookState:
        p = float(self.density(s))
        cut = (p - math.sqrt(self.scale.eps)) * len(s.Y)
        ym = mask_of(s.Y)
        X = frozenset(x for x in s.X if popcount(self.c.red_mask(x) & ym) >= cut)
        return BookState(s.i + 1, X, s.Y, s.A, s.B)

    def bluish(self, s: BookState) -> list[int]:
        xm, need = mask_of(s.X), self.params.mu * len(s.X)
        return [x for x in sorted(s.X) if self.blue_deg(x, xm) >= need]

    def many_bluish(self, s: BookState) -> bool:
        return len(self.bluish(s)) >= self.params.bluish_threshold()

    def is_good_book(self, s: BookState, S, T) -> bool:
        return len(T) >= self.params.mu ** len(S) * len(s.X) / 2

    def choose_blue_book(self, s: BookState) -> BookPair:
        if not s.X:
            raise AlgorithmError("choose_blue_book on empty X")
        xm = mask_of(s.X)
        cands = sorted(self.bluish(s), key=lambda x: (-self.blue_deg(x, xm), x))
        S: list[int] = []
        T = xm
        found = [((), T)]
        while len(S) < self.params.spine_cap():
            best = None
            for rank, v in enumerate(cands):
                if not (T >> v) & 1:
                    continue
                t1 = T & self.c.blue_mask(v)
                ahead = max((popcount(t1 & self.c.blue_mask(w)) for w in cands if (t1 >> w) & 1), default=-1)
                key = (ahead, popcount(t1), -rank)
                if best is None or key > best[0]:
                    best = (key, v, t1)
            if best is None:
                break
            _, v, T = best
            S.append(v)
            found.append((tuple(sorted(S)), T))

        def rank(entry):
            spine, pages = entry
            return (-len(spine), -popcount(pages), spine)

        good = [e for e in found if self.is_good_book(s, e[0], members(e[1]))]
        spine, pages = min(good or found, key=rank)
        return BookPair(frozenset(spine), frozenset(members(pages)), BLUE, good=bool(good))

    def central_candidates(self, s: BookState) -> list[int]:
        xm, cap = mask_of(s.X), self.params.mu * len(s.X)
        return [x for x in sorted(s.X) if self.blue_deg(x, xm) <= cap]

    def choose_central_vertex(self, s: BookState) -> int:
        cands = self.central_candidates(s)
        if not cands:
            raise AlgorithmError("no central vertex: every x in X has more than mu|X| blue neighbours in X")
        ym = mask_of(s.Y)
        return max(cands, key=lambda x: (popcount(self.c.red_mask(x) & ym), -x))

    def reddish(self, s: BookState, x: int) -> bool:
        p = self.density(s)
        nr = self.c.red_mask(x)
        inner = red_density(self.c, nr & mask_of(s.X), nr & mask_of(s.Y))
        return inner >= float(p) - self.scale.alpha(self.scale.hgt(p))

    def next_state(self, s: BookState) -> tuple[BookState, StepKind, dict]:
        """One odd step; returns the new state, its kind and step details."""
        if self.many_bluish(s):
            book = self.choose_blue_book(s)
            new = BookState(s.i + 1, book.pages, s.Y, s.A, s.B | book.spine)
            info = {"S_size": len(book.spine), "T_size": len(book.pages), "good": book.good}
            return new, StepKind.BIG_BLUE, info
        x = self.choose_central_vertex(s)
        nr = self.c.red_neighbours(x)
        if self.reddish(s, x):
            new = BookState(s.i + 1, nr & s.X, nr & s.Y, s.A | {x}, s.B)
            return new, StepKind.RED, {"x": x}
        nbx = self.c.blue_neighbours(x) & s.X
        new = BookState(s.i + 1, nbx, nr & s.Y, s.A, s.B | {x})
        info = {"x": x, "nbx": len(nbx), "beta": len(nbx) / len(s.X)}
        return new, StepKind.DENSITY_BOOST, info


def init(params: BookParams, c: Colouring, X0: Iterable[int], Y0: Iterable[int]) -> tuple[Book, BookState]:
    X, Y = frozenset(X0), frozenset(Y0)
    if X & Y:
        raise ConfigError("X0 and Y0 must be disjoint (locale Book)")
    if any(not 0 <= v < c.n for v in X | Y):
        raise ConfigError("X0 and Y0 must be vertex subsets (locale Book_Basis)")
    p0 = red_density(c, X, Y)
    if p0 < params.p0_min:
        raise ConfigError(f"red density {p0} below p0_min {params.p0_min} (locale P0_min)")
    return Book(params, c, HeightScale(params.k, float(p0))), BookState(0, X, Y)


def halves(n: int) -> tuple[range, range]:
    return range(n // 2), range(n // 2, n)


# --- traces ---------------------------------------------------------------


@dataclass
class Trace:
    header: dict
    records: list[dict]
    final: dict
    states: list[BookState] = field(default_factory=list, repr=False)

    @property
    def halted_point(self) -> int | None:
        return self.final.get("halted_point")

    def state_at(self, i: int) -> BookState:
        """State after i steps; a fixed point once halted."""
        if i < len(self.states):
            return self.states[i]
        if self.halted_point is None:
            raise IndexError("run stopped without halting")
        last = self.states[-1]
        return BookState(i, last.X, last.Y, last.A, last.B, True)

    def kind_at(self, i: int) -> StepKind:
        if i < len(self.records):
            return StepKind(self.records[i]["kind"])
        return StepKind.HALTED

    def lines(self) -> list[str]:
        out = [{"header": self.header}] + self.records + [self.final]
        return [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in out]

    def dump(self, fh: IO[str]) -> None:
        for line in self.lines():
            fh.write(line + "\n")

    def dumps(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    @classmethod
    def load(cls, fh: IO[str] | Iterable[str]) -> "Trace":
        rows = [json.loads(line) for line in fh if line.strip()]
        if len(rows) < 2 or "header" not in rows[0] or "status" not in rows[-1]:
            raise ValueError("trace needs a header line and a terminal line")
        return cls(rows[0]["header"], rows[1:-1], rows[-1])


def _p_fields(p: Fraction) -> dict:
    return {"p": float(p), "p_exact": f"{p.numerator}/{p.denominator}"}


def run(
    params: BookParams,
    c: Colouring,
    X0: Iterable[int],
    Y0: Iterable[int],
    meta: dict | None = None,
) -> Trace:
    """Run to termination or budget exhaustion, keeping every state."""
    book, s = init(params, c, X0, Y0)
    header = {
        "params": params.to_dict(),
        "p0": book.scale.p0,
        "n": c.n,
        "policies": {"central": CENTRAL_POLICY, "book": BOOK_POLICY, "degree": DEGREE_POLICY},
        "thresholds": {"size": params.size_threshold(), "bluish": params.bluish_threshold()},
    }
    header.update(meta or {})
    records: list[dict] = []
    states = [s]
    while True:
        if book.termination_condition(s):
            status = "halted"
            break
        if s.i >= params.max_steps:
            status = "budget_exhausted"
            break
        rec = {"i": s.i, **s.sizes(), **_p_fields(book.density(s))}
        if s.i % 2 == 0:
            nxt, kind, info = book.degree_reg(s), StepKind.DEGREE_REG, {}
        else:
            try:
                nxt, kind, info = book.next_state(s)
            except AlgorithmError as exc:
                status = "no_central_vertex"
                header["diagnostic"] = str(exc)
                break
        rec["kind"] = kind.value
        rec.update(info)
        records.append(rec)
        s = nxt
        states.append(s)
    if status == "halted":
        states[-1] = BookState(s.i, s.X, s.Y, s.A, s.B, True)
    final = {
        "halted_point": s.i if status == "halted" else None,
        "status": status,
        "i": s.i,
        **s.sizes(),
        **_p_fields(book.density(s)),
    }
    return Trace(header, records, final, states)


@dataclass
class StepClasses:
    D: set[int]
    R: set[int]
    B: set[int]
    S: set[int]
    H: set[int]
    halted_point: int | None

    @property
    def t(self) -> int:
        return len(self.R)

    @property
    def s(self) -> int:
        return len(self.S)


def step_class(trace: Trace, horizon: int | None = None) -> StepClasses:
    """Partition of step indices by kind; H holds halted indices below ``horizon``."""
    parts: dict[str, set[int]] = {k.value: set() for k in StepKind}
    for r in trace.records:
        parts[r["kind"]].add(r["i"])
    hp = trace.halted_point
    if hp is not None and horizon is not None:
        parts["H"] = set(range(hp, max(hp, horizon)))
    return StepClasses(parts["D"], parts["R"], parts["B"], parts["S"], parts["H"], hp)


# --- invariant checking ----------------------------------------------------


def state_violations(c: Colouring, s: BookState) -> list[str]:
    out = []
    sets = {"X": s.X, "Y": s.Y, "A": s.A, "B": s.B}
    names = list(sets)
    for a_i, a in enumerate(names):
        for b in names[a_i + 1 :]:
            if sets[a] & sets[b]:
                out.append(f"{a} and {b} overlap at step {s.i}")
    if not is_clique(c, s.A, RED):
        out.append(f"A is not a red clique at step {s.i}")
    if not is_clique(c, s.B, BLUE):
        out.append(f"B is not a blue clique at step {s.i}")
    xy = mask_of(s.X | s.Y)
    if any(c.red_mask(a) & xy != xy for a in s.A):
        out.append(f"an A-(X u Y) edge is blue at step {s.i}")
    xm = mask_of(s.X)
    if any(c.blue_mask(b) & xm != xm for b in s.B):
        out.append(f"a B-X edge is red at step {s.i}")
    return out


def trace_violations(c: Colouring, trace: Trace, extra: int = 3) -> list[str]:
    """Every invariant of a run that does not depend on bigness assumptions."""
    out: list[str] = []
    for s in trace.states:
        out += state_violations(c, s)
    for r, before, after in zip(trace.records, trace.states, trace.states[1:]):
        i, kind = r["i"], StepKind(r["kind"])
        if i != before.i or after.i != i + 1:
            out.append(f"step numbering broken at {i}")
        if (i % 2 == 0) != (kind is StepKind.DEGREE_REG):
            out.append(f"parity: step {i} has kind {kind.value}")
        if not (after.X <= before.X and after.Y <= before.Y):
            out.append(f"X or Y grew at step {i}")
        dA, dB = after.A - before.A, after.B - before.B
        if not (before.A <= after.A and before.B <= after.B):
            out.append(f"A or B lost vertices at step {i}")
        expect = {
            StepKind.DEGREE_REG: (0, 0, True),
            StepKind.RED: (1, 0, False),
            StepKind.DENSITY_BOOST: (0, 1, False),
        }
        if kind in expect:
            na, nb, only_x = expect[kind]
            if len(dA) != na or len(dB) != nb:
                out.append(f"step {i} ({kind.value}) changed A/B by {len(dA)}/{len(dB)}")
            if only_x and after.Y != before.Y:
                out.append(f"degree regularisation touched Y at step {i}")
        elif kind is StepKind.BIG_BLUE:
            if dA or len(dB) != r["S_size"]:
                out.append(f"big blue step {i} changed A or B wrongly")
        if kind is StepKind.DENSITY_BOOST:
            # beta > 0 needs the bigness hypothesis; beta < 1 always holds
            if not 0 <= r["beta"] < 1 or r["nbx"] != len(after.X):
                out.append(f"beta outside [0,1) or inconsistent at step {i}")
    if trace.halted_point is not None:
        hp = trace.halted_point
        last = trace.states[-1]
        for j in range(hp, hp + extra + 1):
            s = trace.state_at(j)
            if (s.X, s.Y, s.A, s.B) != (last.X, last.Y, last.A, last.B) or trace.kind_at(j) is not StepKind.HALTED:
                out.append(f"state moved after halting at {j}")
    return out

