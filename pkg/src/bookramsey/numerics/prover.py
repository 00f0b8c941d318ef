"""Branch-and-bound proving of inequalities over boxes.

The prover keeps a priority queue of undecided boxes ordered by how badly
the enclosure misses the goal, so refutations surface early and the
hardest region is refined first. A box is

* discharged when the enclosure of the small side lies below the large side,
* refuted when the whole box certainly violates the goal, or when its
  midpoint does,
* split along the widest variable that still has depth budget otherwise.

Running out of budget on any box ends the search with ``unknown`` and
reports that box.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .enclose import MAX_BITS, as_interval, check_bits, compile_expr
from .expr import ZERO, Expr, Goal, differentiate, parse_goal, variables
from .interval import Interval, round_out

PROVED = "proved"
REFUTED = "refuted"
UNKNOWN = "unknown"

# boxes kept in an unknown certificate
_MAX_REPORTED = 20


@dataclass
class Certificate:
    goal: str
    verdict: str
    boxes_examined: int = 0
    max_depth_used: dict[str, int] = field(default_factory=dict)
    precision_bits: int = MAX_BITS
    witness: dict[str, float] | None = None
    undischarged: list[dict[str, list[float]]] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def proved(self) -> bool:
        return self.verdict == PROVED

    def to_dict(self) -> dict:
        """JSON form; wall-clock time is left out so output is reproducible."""
        return {
            "goal": self.goal,
            "verdict": self.verdict,
            "boxes_examined": self.boxes_examined,
            "max_depth_used": dict(sorted(self.max_depth_used.items())),
            "precision_bits": self.precision_bits,
            "witness": self.witness,
            "undischarged": self.undischarged,
        }


def _box_dict(box: Mapping[str, Interval]) -> dict[str, list[float]]:
    return {k: [v.lo, v.hi] for k, v in sorted(box.items())}


def _cut(box: dict[str, Interval], seams: Mapping[str, list]) -> list[dict[str, Interval]]:
    boxes = [box]
    for var, points in sorted(seams.items()):
        for p in sorted(float(Fraction(q)) for q in points):
            nxt = []
            for b in boxes:
                x = b[var]
                if x.lo < p < x.hi:
                    nxt.append({**b, var: Interval(x.lo, p)})
                    nxt.append({**b, var: Interval(p, x.hi)})
                else:
                    nxt.append(b)
            boxes = nxt
    return boxes


def prove_ineq(
    goal: Goal | str,
    box: Mapping[str, object],
    split: Mapping[str, int] | None = None,
    precision_bits: int = MAX_BITS,
    max_boxes: int = 1_000_000,
    seams: Mapping[str, list] | None = None,
) -> Certificate:
    """Try to prove ``goal`` for every point of ``box``.

    ``split`` maps a variable to the number of times any box may be halved
    along it (so at most ``2**depth`` pieces); unlisted variables are never
    split. ``seams`` pre-cuts the box at the given coordinates, e.g. where
    a piecewise definition switches branch.
    """
    check_bits(precision_bits)
    if isinstance(goal, str):
        goal = parse_goal(goal)
    small, large, strict = goal.normalised()
    missing = (set(variables(small)) | set(variables(large))) - set(box)
    if missing:
        raise ValueError(f"box does not cover variables {sorted(missing)}")
    split = dict(split or {})
    f_small, n_small = compile_expr(small)
    f_large, n_large = compile_expr(large)
    names = sorted(box)

    def enclose(b):
        s = round_out(f_small(b, [None] * n_small), precision_bits)
        g = round_out(f_large(b, [None] * n_large), precision_bits)
        return s, g

    def holds(s, g):
        return s.hi < g.lo if strict else s.hi <= g.lo

    def fails(s, g):
        return s.lo >= g.hi if strict else s.lo > g.hi

    cert = Certificate(goal=str(goal), verdict=PROVED, precision_bits=precision_bits)
    cert.max_depth_used = {v: 0 for v in split}
    start = time.perf_counter()
    root = {k: as_interval(v) for k, v in box.items()}
    counter = itertools.count()
    heap: list = []

    def push(b, depth):
        s, g = enclose(b)
        cert.boxes_examined += 1
        if holds(s, g):
            return None
        # larger violation first
        heapq.heappush(heap, (g.lo - s.hi, next(counter), b, depth, s, g))
        return None

    for b in _cut(root, seams or {}):
        push(b, {v: 0 for v in split})

    while heap:
        _, _, b, depth, s, g = heapq.heappop(heap)
        mid = {k: Interval(b[k].mid) for k in names}
        ms, mg = enclose(mid)
        choices = [v for v in split if depth[v] < split[v] and b[v].width > 0]
        # a midpoint sitting exactly on the boundary is only used as a
        # witness once the box cannot be split further
        if fails(s, g) or ms.lo > mg.hi or (fails(ms, mg) and not choices):
            cert.verdict = REFUTED
            cert.witness = {k: mid[k].lo for k in names}
            break
        if not choices or cert.boxes_examined >= max_boxes:
            cert.verdict = UNKNOWN
            cert.undischarged = [_box_dict(b)] + [
                _box_dict(item[2]) for item in heapq.nsmallest(_MAX_REPORTED - 1, heap)
            ]
            break
        v = max(choices, key=lambda name: (b[name].width, name))
        left, right = b[v].bisect()
        d = {**depth, v: depth[v] + 1}
        cert.max_depth_used[v] = max(cert.max_depth_used[v], d[v])
        push({**b, v: left}, d)
        push({**b, v: right}, d)

    cert.elapsed = time.perf_counter() - start
    return cert


def concavity_certificate(
    e: Expr,
    v: str,
    interval,
    precision_bits: int = MAX_BITS,
    depth: int = 12,
) -> Certificate:
    """Prove ``e`` concave in ``v`` on ``interval`` via ``e'' <= 0``.

    A refuted certificate means the second derivative is certainly positive
    somewhere, so ``e`` is not concave there.
    """
    d2 = differentiate(differentiate(e, v), v)
    return prove_ineq(Goal(d2, "<=", ZERO), {v: interval}, {v: depth}, precision_bits)
