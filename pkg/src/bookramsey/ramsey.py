"""Small Ramsey numbers, the classic clique-extraction loop, first-moment
lower-bound certificates and Paley colourings.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .graph import BLUE, RED, Colour, Colouring, is_clique, mask_of, members, popcount
from .numerics.enclose import eval_interval
from .numerics.expr import Const, Exp, Mul, Neg, Pow, Powr, Expr
from .numerics.interval import Interval


class InvariantViolation(AssertionError):
    """An algorithm invariant that the theory guarantees was broken."""


# --- exhaustive oracle -----------------------------------------------------


def _has_clique(adj: list[int], cand: int, size: int) -> bool:
    if size <= 0:
        return True
    if popcount(cand) < size:
        return False
    if size == 1:
        return cand != 0
    while cand and popcount(cand) >= size:
        low = cand & -cand
        v = low.bit_length() - 1
        cand ^= low
        if _has_clique(adj, cand & adj[v], size - 1):
            return True
    return False


@dataclass
class OracleResult:
    k: int
    l: int
    n_cap: int
    value: int | None  # None when R(k, l) > n_cap
    witness: Colouring | None  # good colouring on value - 1 vertices
    nodes: list[int] = field(default_factory=list)  # good partial colourings per order

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "n_cap": self.n_cap,
            "value": self.value,
            "exceeds_cap": self.value is None,
            "witness": None if self.witness is None else self.witness.to_json(),
            "nodes_per_order": self.nodes,
        }


class _Search:
    """Vertex-by-vertex extension of colourings with no red k-clique and no
    blue l-clique. Vertex v chooses its red neighbours among 0..v-1.

    Symmetry: relabelling the vertices other than 0 lets us assume the red
    neighbours of vertex 0 form a prefix 1..d, so once some vertex is blue
    to 0 every later vertex is too. Every good colouring is isomorphic to
    one reached this way, and prefixes of good colourings are good, so the
    search is exhaustive up to isomorphism.
    """

    def __init__(self, k: int, l: int, n_cap: int):
        self.k, self.l, self.n_cap = k, l, n_cap
        self.best_order = 0
        self.best: list[int] = []
        self.nodes = [0] * (n_cap + 1)
        self.nodes[0] = 1

    def options(self, red: list[int], blue: list[int]) -> list[int]:
        v = len(red)
        prev = (1 << v) - 1
        out = []
        for nb in range(1 << v):
            if v >= 2 and not (red[v - 1] & 1) and nb & 1:
                continue
            if _has_clique(red, nb, self.k - 1):
                continue
            if _has_clique(blue, prev & ~nb, self.l - 1):
                continue
            out.append(nb)
        return out

    def extend(self, red: list[int], blue: list[int]) -> bool:
        """DFS; returns True as soon as a good colouring on n_cap vertices exists."""
        v = len(red)
        if v > self.best_order:
            self.best_order, self.best = v, list(red)
        if v == self.n_cap:
            return True
        bit = 1 << v
        prev = bit - 1
        for nb in self.options(red, blue):
            self.nodes[v + 1] += 1
            red2 = [m | bit if (nb >> i) & 1 else m for i, m in enumerate(red)] + [nb]
            bnb = prev & ~nb
            blue2 = [m | bit if (bnb >> i) & 1 else m for i, m in enumerate(blue)] + [bnb]
            if self.extend(red2, blue2):
                return True
        return False


def _frontier(search: _Search, depth: int) -> list[tuple[list[int], list[int]]]:
    level = [([], [])]
    for _ in range(depth):
        nxt = []
        for red, blue in level:
            v = len(red)
            bit, prev = 1 << v, (1 << v) - 1
            for nb in search.options(red, blue):
                red2 = [m | bit if (nb >> i) & 1 else m for i, m in enumerate(red)] + [nb]
                bnb = prev & ~nb
                blue2 = [m | bit if (bnb >> i) & 1 else m for i, m in enumerate(blue)] + [bnb]
                nxt.append((red2, blue2))
        level = nxt
    return level


def _subtree(args):
    k, l, n_cap, red, blue = args
    s = _Search(k, l, n_cap)
    s.best_order, s.best = len(red), list(red)
    s.extend(red, blue)
    return s.best_order, s.best, s.nodes


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("RAMSEY_THREADS", "1")))
    except ValueError:
        return 1


def ramsey_oracle(k: int, l: int, n_cap: int, workers: int | None = None) -> OracleResult:
    """Exact R(k, l) when it is at most ``n_cap``, by exhaustive search.

    The witness is a colouring of K_{R-1} with neither clique; the absence
    of any good colouring of K_R is the exhaustive part.
    """
    if k < 1 or l < 1:
        raise ValueError("clique sizes must be at least 1")
    if n_cap < 0:
        raise ValueError("n_cap must be non-negative")
    workers = _workers() if workers is None else max(1, workers)
    s = _Search(k, l, n_cap)
    split = min(4, n_cap)
    if workers > 1 and n_cap > split + 2:
        tasks = [(k, l, n_cap, r, b) for r, b in _frontier(s, split)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_subtree, tasks))
        for order, red, _ in results:
            if order > s.best_order:
                s.best_order, s.best = order, red
        s.nodes = [0] * (n_cap + 1)  # per-order counts are not merged across workers
    else:
        s.extend([], [])
    good = s.best_order
    value = None if good >= n_cap else good + 1
    witness = Colouring(good, s.best) if value is not None else None
    return OracleResult(k, l, n_cap, value, witness, s.nodes)


def find_good_colouring(k: int, l: int, n: int) -> Colouring | None:
    """A colouring of K_n with no red k-clique and no blue l-clique, if any."""
    s = _Search(k, l, n)
    if s.extend([], []) or s.best_order >= n:
        return Colouring(n, s.best)
    return None


# --- classic extraction ----------------------------------------------------


@dataclass(frozen=True)
class RamseyWitness:
    kind: Colour
    vertices: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "vertices": list(self.vertices)}


@dataclass(frozen=True)
class ExtractionFailure:
    red_clique: tuple[int, ...]
    blue_clique: tuple[int, ...]
    steps: int
    reason: str = "candidate set exhausted"


def lowest_vertex(x_mask: int) -> int:
    return (x_mask & -x_mask).bit_length() - 1


def classic_extract(
    c: Colouring, k: int, l: int, pick: Callable[[int], int] = lowest_vertex
) -> RamseyWitness | ExtractionFailure:
    """Greedy majority-neighbourhood search for a red k-clique or blue l-clique.

    Repeatedly take a vertex x of X; if x has at least as many red as blue
    neighbours in X it joins A and X shrinks to its red neighbours,
    otherwise it joins B and X shrinks to its blue neighbours. Stops when
    |A| = k or |B| = l. On K_n with n >= 2^(k+l) this always succeeds.
    """
    if k < 1 or l < 1:
        raise ValueError("clique sizes must be at least 1")
    guaranteed = c.n >= 2 ** (k + l)
    X = (1 << c.n) - 1
    A: list[int] = []
    B: list[int] = []
    steps = 0
    while len(A) < k and len(B) < l:
        if not X:
            if guaranteed:
                raise InvariantViolation("extraction failed on a graph of order >= 2^(k+l)")
            return ExtractionFailure(tuple(A), tuple(B), steps)
        x = pick(X)
        if not (X >> x) & 1:
            raise ValueError("pick policy returned a vertex outside X")
        X &= ~(1 << x)
        nr, nb = c.red_mask(x) & X, c.blue_mask(x) & X
        size_before = popcount(X) + 1
        if popcount(nr) >= popcount(nb):
            A.append(x)
            X = nr
        else:
            B.append(x)
            X = nb
        steps += 1
        if 2 * popcount(X) < size_before - 1:
            raise InvariantViolation("majority branch lost more than half of X")
        _check_extract(c, A, B, X)
    if guaranteed and steps > k + l - 1:
        raise InvariantViolation("more than k + l - 1 acquisitions")
    if len(A) == k:
        return RamseyWitness(RED, tuple(A))
    return RamseyWitness(BLUE, tuple(B))


def _check_extract(c: Colouring, A: list[int], B: list[int], X: int) -> None:
    if not is_clique(c, A, RED) or not is_clique(c, B, BLUE):
        raise InvariantViolation("A must stay a red clique and B a blue clique")
    if any(c.red_mask(a) & X != X for a in A):
        raise InvariantViolation("an A-X edge is blue")
    if any(c.blue_mask(b) & X != X for b in B):
        raise InvariantViolation("a B-X edge is red")


def verify_witness(c: Colouring, w: RamseyWitness, k: int, l: int) -> bool:
    size = k if w.kind is RED else l
    return len(set(w.vertices)) == size and is_clique(c, w.vertices, w.kind)


# --- first-moment certificate ----------------------------------------------


@dataclass
class LowerBoundCertificate:
    k: int
    l: int
    n: int
    p: Fraction
    lhs_enclosure: Interval

    @property
    def valid(self) -> bool:
        """True means R(k, l) > n is certified."""
        return self.lhs_enclosure.hi < 1

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "n": self.n,
            "p": str(self.p),
            "lhs": [self.lhs_enclosure.lo, self.lhs_enclosure.hi],
            "valid": self.valid,
        }


def first_moment_lhs(k: int, l: int, n: int, p) -> Expr:
    """n^k p^(k^2/4) + n^l exp(-p l^2/4) as an expression tree."""
    p = Const(Fraction(p))
    nn = Const(Fraction(n))
    red_term = Mul(Pow(nn, k), Powr(p, Const(Fraction(k * k, 4))))
    blue_term = Mul(Pow(nn, l), Exp(Neg(Mul(p, Const(Fraction(l * l, 4))))))
    return red_term + blue_term


def lower_bound_certificate(k: int, l: int, n: int, p) -> LowerBoundCertificate:
    p = Fraction(p)
    if not (k > 1 and l > 1 and 0 < p < 1):
        raise ValueError("need k > 1, l > 1 and 0 < p < 1")
    if n < 0:
        raise ValueError("n must be non-negative")
    enc = eval_interval(first_moment_lhs(k, l, n, p), {})
    return LowerBoundCertificate(k, l, n, p, enc)


def best_certificate(k: int, l: int, n: int, grid=None) -> LowerBoundCertificate:
    """Certificate with the smallest upper enclosure over a grid of p."""
    grid = grid or [Fraction(i, 10) for i in range(1, 10)]
    certs = [lower_bound_certificate(k, l, n, p) for p in grid]
    return min(certs, key=lambda c: (c.lhs_enclosure.hi, c.p))


# --- Paley colourings ------------------------------------------------------


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, math.isqrt(q) + 1))


def paley_witness(q: int) -> Colouring:
    """K_q with {i, j} red iff i - j is a nonzero square mod q."""
    if not _is_prime(q) or q % 4 != 1:
        raise ValueError("q must be a prime congruent to 1 mod 4")
    squares = {(x * x) % q for x in range(1, q)}
    return Colouring.from_predicate(q, lambda i, j: (i - j) % q in squares)


# --- thresholds standing in for R(a, b) -----------------------------------


def erdos_szekeres(a: int, b: int) -> int:
    """Upper bound binom(a+b-2, a-1) on R(a, b)."""
    if a < 1 or b < 1:
        raise ValueError("clique sizes must be at least 1")
    return math.comb(a + b - 2, a - 1)


@lru_cache(maxsize=None)
def exact_small(a: int, b: int) -> int | None:
    """R(a, b) where it is trivial or quick to search (a + b <= 6), else None."""
    a, b = min(a, b), max(a, b)
    if a == 1:
        return 1
    if a == 2:
        return b
    if a + b <= 6:
        return ramsey_oracle(a, b, erdos_szekeres(a, b), workers=1).value
    return None


ThresholdFn = Callable[[int, int], int]


def threshold_function(mode: str) -> ThresholdFn:
    """Surrogate for R(a, b) used by the book algorithm.

    * ``es``      Erdos-Szekeres upper bound
    * ``exact``   exact value when cheap, otherwise the upper bound
    * ``lower``   trivial lower bound max(a, b), for runs that should take steps
    * ``const:N`` the constant N
    """
    if mode == "es":
        return erdos_szekeres
    if mode == "exact":
        return lambda a, b: exact_small(a, b) or erdos_szekeres(a, b)
    if mode == "lower":
        return lambda a, b: max(a, b)
    if mode.startswith("const:"):
        value = int(mode.split(":", 1)[1])
        if value < 0:
            raise ValueError("constant threshold must be non-negative")
        return lambda a, b: value
    raise ValueError(f"unknown threshold mode {mode!r}")


THRESHOLD_MODES = ("es", "exact", "lower", "const:N")
