"""Numeric monitors over book-algorithm traces.

Each monitor recomputes what it needs from the raw trace fields and
reports ``lhs``, ``rhs`` and whether the lemma-shaped inequality holds.
The underlying inequalities are only guaranteed for very large l, so
most reports are ``report-only``: they are recorded, never enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .book import HeightScale, Trace

FULL = "full"
REPORT_ONLY = "report-only"


@dataclass
class MonitorReport:
    lemma_id: str
    lhs: float
    rhs: float
    satisfied: bool
    applicability: str = REPORT_ONLY
    notes: str = ""
    step: int | None = None

    @property
    def hard_failure(self) -> bool:
        return self.applicability == FULL and not self.satisfied

    def to_dict(self) -> dict:
        def num(v):
            # JSON has no inf/nan
            return v if v is None or math.isfinite(v) else str(v)

        return {
            "lemma_id": self.lemma_id,
            "step": self.step,
            "lhs": num(self.lhs),
            "rhs": num(self.rhs),
            "satisfied": self.satisfied,
            "applicability": self.applicability,
            "notes": self.notes,
        }


# --- o(k) functions ----------------------------------------------------------


def eps(k) -> float:
    return k ** -0.25


def ok_fun_61_applicable(k: int, p0_min) -> bool:
    """1 - 2 sqrt(eps(k)) / p0_min > 0, decided exactly: k (p0_min/2)^8 > 1."""
    return k * (Fraction(p0_min) / 2) ** 8 > 1


def ok_fun_61(k: int, p0_min) -> float | None:
    """(2k / ln 2) ln(1 - 2 eps(k)^(1/2) / p0_min), or None off its domain."""
    p0_min = Fraction(p0_min)
    if k <= 0 or not ok_fun_61_applicable(k, p0_min):
        return None
    arg = -2 * math.sqrt(eps(k)) / float(p0_min)
    if arg <= -1.0:
        # exactly inside the domain but within rounding of its edge, where the value tends to -inf
        return -math.inf
    return (2 * k / math.log(2)) * math.log1p(arg)


def ok_fun_72(mu, k: int) -> float | None:
    """(k / ln 2) ln(1 - 1/(k (1 - mu))), or None off its domain."""
    mu = Fraction(mu)
    if not (mu < 1 and k * (1 - mu) > 1):
        return None
    return (k / math.log(2)) * math.log1p(-1 / float(k * (1 - mu)))


@dataclass
class OkCheck:
    verdict: str  # "consistent" or "inconsistent"
    ratios: list[tuple[int, float]]
    inapplicable: list[int] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"


def empirical_o_of_k(f: Callable[[int], float | None], k_grid: Sequence[int], tol: float) -> OkCheck:
    """Falsification check for f in o(k): |f(k)|/k must be non-increasing
    over the second half of the grid and end below ``tol``."""
    ks = list(k_grid)
    if len(ks) < 3 or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("k_grid must be strictly increasing with at least 3 points")
    ratios, bad = [], []
    for k in ks:
        try:
            v = f(k)
        except (ValueError, ZeroDivisionError, OverflowError):
            v = None
        if v is None or not math.isfinite(v):
            bad.append(k)
        else:
            ratios.append((k, abs(v) / k))
    tail = [r for _, r in ratios[len(ratios) // 2 :]]
    ok = len(tail) >= 2 and all(b <= a for a, b in zip(tail, tail[1:])) and tail[-1] < tol
    return OkCheck("consistent" if ok else "inconsistent", ratios, bad)


# --- bigness predicates ------------------------------------------------------


@dataclass(frozen=True)
class Conjunct:
    name: str
    holds: Callable[[Fraction, int], bool]


def _blue_size(mu: Fraction, l: int) -> bool:
    # l >= (6/mu)^(12/5)  <=>  l^5 >= (6/mu)^12
    return l > 0 and Fraction(l) ** 5 >= (6 / mu) ** 12


def _blue_sigma(mu: Fraction, l: int) -> bool:
    # 2 l^(-5/12) <= mu - 2/k at k = l  <=>  l^5 (mu - 2/l)^12 >= 2^12
    if l <= 0:
        return False
    gap = mu - Fraction(2, l)
    return gap > 0 and Fraction(l) ** 5 * gap**12 >= 2**12


@dataclass
class BignessPredicate:
    name: str
    conjuncts: list[Conjunct]

    def __call__(self, mu, l: int) -> bool:
        mu = Fraction(mu)
        return all(c.holds(mu, l) for c in self.conjuncts)

    def minimal_l(self, mu) -> int:
        """Least l with the predicate true (all conjuncts are monotone in l)."""
        mu = Fraction(mu)
        if not 0 < mu < 1:
            raise ValueError("mu must lie in (0, 1)")
        if self(mu, 1):
            return 1
        lo, hi = 1, 2
        while not self(mu, hi):
            lo, hi = hi, hi * 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self(mu, mid):
                hi = mid
            else:
                lo = mid
        return hi


BIGNESS: dict[str, BignessPredicate] = {
    "Big_Blue_4_1": BignessPredicate(
        "Big_Blue_4_1",
        [Conjunct("l >= (6/mu)^(12/5)", _blue_size), Conjunct("2 l^(-5/12) <= mu - 2/l", _blue_sigma)],
    ),
}


def _predicate(name: str) -> BignessPredicate:
    try:
        return BIGNESS[name]
    except KeyError:
        raise ValueError(f"unknown bigness predicate {name!r}") from None


def bigness(name: str, mu, l: int) -> bool:
    return _predicate(name)(mu, l)


def minimal_l(name: str, mu) -> int:
    return _predicate(name).minimal_l(mu)


# --- trace monitors ----------------------------------------------------------


def _params(trace: Trace) -> dict:
    return trace.header["params"]


def _p(row: dict) -> Fraction:
    return Fraction(row["p_exact"])


def _row_after(trace: Trace, i: int) -> dict:
    nxt = [r for r in trace.records if r["i"] == i + 1]
    return nxt[0] if nxt else trace.final


def _record(trace: Trace, i: int) -> dict:
    for r in trace.records:
        if r["i"] == i:
            return r
    raise ValueError(f"no step {i} in trace")


def _s_steps(trace: Trace) -> list[dict]:
    return [r for r in trace.records if r["kind"] == "S"]


def _count(trace: Trace, kind: str) -> int:
    return sum(1 for r in trace.records if r["kind"] == kind)


def _initial(trace: Trace) -> dict:
    return trace.records[0] if trace.records else trace.final


def beta(trace: Trace, i: int) -> float:
    """|N_B(x_i) n X_i| / |X_i| at density-boost step i."""
    r = _record(trace, i)
    if r["kind"] != "S":
        raise ValueError(f"step {i} is not a density-boost step")
    return r["nbx"] / r["X"]


def check_boost(trace: Trace, i: int) -> MonitorReport:
    """p_{i+1} - p_i >= (1 - eps)((1 - beta)/beta) alpha(hgt(p_i))."""
    b = beta(trace, i)
    k = int(_params(trace)["k"])
    scale = HeightScale(k, float(trace.header["p0"]))
    p_i = _p(_record(trace, i))
    lhs = float(_p(_row_after(trace, i)) - p_i)
    rhs = math.inf if b == 0 else (1 - scale.eps) * ((1 - b) / b) * scale.alpha(scale.hgt(p_i))
    return MonitorReport("red52", lhs, rhs, lhs >= rhs, REPORT_ONLY, "bigness hypothesis not met at this scale", i)


def check_boosts(trace: Trace) -> list[MonitorReport]:
    return [check_boost(trace, r["i"]) for r in _s_steps(trace)]


def check_beta_range(trace: Trace) -> list[MonitorReport]:
    """beta < 1 at every density-boost step (always true, enforced) and
    beta > 0 (true only under the bigness hypothesis, recorded)."""
    bs = [r["nbx"] / r["X"] for r in _s_steps(trace)]
    lo, hi = float(min(bs, default=0.5)), float(max(bs, default=0.5))
    zero = sum(1 for b in bs if b <= 0)
    return [
        MonitorReport("beta_lt_1", hi, 1.0, hi < 1, FULL, f"{len(bs)} density-boost steps"),
        MonitorReport(
            "beta_gt_0", lo, 0.0, zero == 0, REPORT_ONLY,
            f"{zero} density-boost steps with beta = 0; positivity needs the bigness hypothesis",
        ),
    ]


def check_Y61(trace: Trace, waive_bigness: bool = False) -> MonitorReport:
    """|Y_halt| / |Y_0| >= 2^ok_fun_61(k) * p0^(|R| + |S|)."""
    prm = _params(trace)
    k, p0_min = int(prm["k"]), Fraction(prm["p0_min"])
    y0, yh = _initial(trace)["Y"], trace.final["Y"]
    lhs = yh / y0 if y0 else 0.0
    ok = ok_fun_61(k, p0_min)
    st = _count(trace, "R") + _count(trace, "S")
    p0 = float(trace.header["p0"])
    if ok is None:
        return MonitorReport("y61", lhs, math.nan, True, REPORT_ONLY, "ok_fun_61 inapplicable: p0_min <= 2 sqrt(eps(k))")
    rhs = 2.0**ok * p0**st
    full = waive_bigness
    note = "bigness hypothesis waived" if full else "bigness hypothesis not met at this scale"
    return MonitorReport("y61", lhs, rhs, lhs >= rhs, FULL if full else REPORT_ONLY, note)


def check_X71(trace: Trace, ok_fun_71: float = 0.0) -> MonitorReport:
    """|X_halt| >= 2^ok_fun_71 mu^l (1-mu)^|R| (bigbeta/mu)^|S| |X_0|, with
    bigbeta replaced by the mean beta over density-boost steps."""
    prm = _params(trace)
    mu, l = float(Fraction(prm["mu"])), int(prm["l"])
    bs = [r["nbx"] / r["X"] for r in _s_steps(trace)]
    bigbeta = sum(bs) / len(bs) if bs else mu
    rhs = 2.0**ok_fun_71 * mu**l * (1 - mu) ** _count(trace, "R") * (bigbeta / mu) ** len(bs) * _initial(trace)["X"]
    lhs = float(trace.final["X"])
    note = "bigbeta substituted by the mean beta over density-boost steps"
    return MonitorReport("x71", lhs, rhs, lhs >= rhs, REPORT_ONLY, note)


def check_zigzag(trace: Trace) -> MonitorReport:
    """sum over density-boost steps of (1-beta)/beta <= |R| + k^(19/20)."""
    k = int(_params(trace)["k"])
    lhs = 0.0
    for r in _s_steps(trace):
        b = r["nbx"] / r["X"]
        lhs += math.inf if b == 0 else (1 - b) / b
    rhs = _count(trace, "R") + k ** (19 / 20)
    note = "sum taken over all density-boost steps, a superset of the lemma's index set"
    return MonitorReport("zz81", lhs, rhs, lhs <= rhs, REPORT_ONLY, note)


MONITORS = ("beta", "red52", "y61", "x71", "zz81")


def run_monitors(trace: Trace, names: Iterable[str] = MONITORS) -> list[MonitorReport]:
    out: list[MonitorReport] = []
    for name in names:
        if name == "beta":
            out.extend(check_beta_range(trace))
        elif name == "red52":
            out.extend(check_boosts(trace))
        elif name == "y61":
            out.append(check_Y61(trace))
        elif name == "x71":
            out.append(check_X71(trace))
        elif name == "zz81":
            out.append(check_zigzag(trace))
        else:
            raise ValueError(f"unknown monitor {name!r}")
    return out
