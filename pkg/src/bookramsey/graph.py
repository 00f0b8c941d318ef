"""Red/blue colourings of complete graphs.

A colouring stores one integer bitmask of red neighbours per vertex, so an
edge test is a shift and neighbourhood intersection is a single ``&``.
Blue is the complement of red on edges; there are no self-loops.
"""

from __future__ import annotations

import enum
import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class Colour(enum.Enum):
    RED = "red"
    BLUE = "blue"

    @property
    def other(self) -> "Colour":
        return Colour.BLUE if self is Colour.RED else Colour.RED


RED = Colour.RED
BLUE = Colour.BLUE


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Colouring:
    """Immutable red/blue colouring of K_n."""

    __slots__ = ("n", "_red", "_all")

    def __init__(self, n: int, red_masks: Sequence[int]):
        if n < 0 or len(red_masks) != n:
            raise ValueError("need one red mask per vertex")
        full = (1 << n) - 1
        for v, m in enumerate(red_masks):
            if m & ~full or (m >> v) & 1:
                raise ValueError(f"bad red mask for vertex {v}")
            for u in members(m):
                if not (red_masks[u] >> v) & 1:
                    raise ValueError(f"red relation not symmetric at {{{u},{v}}}")
        self.n = n
        self._red = tuple(red_masks)
        self._all = full

    # construction

    @classmethod
    def from_edges(cls, n: int, red_edges: Iterable[Sequence[int]]) -> "Colouring":
        masks = [0] * n
        for i, j in red_edges:
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"bad edge ({i}, {j}) for n={n}")
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        return cls(n, masks)

    @classmethod
    def from_predicate(cls, n: int, red) -> "Colouring":
        return cls.from_edges(n, ((i, j) for i, j in itertools.combinations(range(n), 2) if red(i, j)))

    @classmethod
    def all_red(cls, n: int) -> "Colouring":
        full = (1 << n) - 1
        return cls(n, [full & ~(1 << v) for v in range(n)])

    @classmethod
    def all_blue(cls, n: int) -> "Colouring":
        return cls(n, [0] * n)

    # queries

    def _check(self, x: int) -> None:
        if not 0 <= x < self.n:
            raise IndexError(f"vertex {x} out of range for n={self.n}")

    def is_red(self, i: int, j: int) -> bool:
        self._check(i)
        self._check(j)
        if i == j:
            raise ValueError("no self-loops")
        return bool((self._red[i] >> j) & 1)

    def red_mask(self, x: int) -> int:
        self._check(x)
        return self._red[x]

    def blue_mask(self, x: int) -> int:
        self._check(x)
        return self._all & ~self._red[x] & ~(1 << x)

    def mask(self, x: int, colour: Colour) -> int:
        return self.red_mask(x) if colour is RED else self.blue_mask(x)

    def red_neighbours(self, x: int) -> frozenset[int]:
        return frozenset(members(self.red_mask(x)))

    def blue_neighbours(self, x: int) -> frozenset[int]:
        return frozenset(members(self.blue_mask(x)))

    def neighbours(self, x: int, colour: Colour) -> frozenset[int]:
        return frozenset(members(self.mask(x, colour)))

    def red_edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in members(self._red[i] >> (i + 1) << (i + 1))]

    def complement(self) -> "Colouring":
        return Colouring(self.n, [self.blue_mask(v) for v in range(self.n)])

    def induced(self, vertices: Sequence[int]) -> "Colouring":
        vs = list(vertices)
        return Colouring.from_predicate(len(vs), lambda a, b: self.is_red(vs[a], vs[b]))

    def __eq__(self, other) -> bool:
        return isinstance(other, Colouring) and self.n == other.n and self._red == other._red

    def __hash__(self) -> int:
        return hash((self.n, self._red))

    def __repr__(self) -> str:
        return f"Colouring(n={self.n}, red_edges={len(self.red_edges())})"

    # serialisation

    def to_json(self) -> dict:
        return {"n": self.n, "red_edges": [list(e) for e in self.red_edges()]}

    @classmethod
    def from_json(cls, obj: dict | str) -> "Colouring":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls.from_edges(int(obj["n"]), obj["red_edges"])

    def to_hex(self) -> str:
        """Upper-triangle edge bits in (0,1),(0,2),...,(n-2,n-1) order,
        first edge as the least significant bit, as ``"<n>:<hex>"``."""
        bits = 0
        for idx, (i, j) in enumerate(itertools.combinations(range(self.n), 2)):
            if (self._red[i] >> j) & 1:
                bits |= 1 << idx
        return f"{self.n}:{bits:x}"

    @classmethod
    def from_hex(cls, text: str) -> "Colouring":
        n_txt, hex_txt = text.strip().split(":", 1)
        n, bits = int(n_txt), int(hex_txt, 16)
        pairs = list(itertools.combinations(range(n), 2))
        if bits >> len(pairs):
            raise ValueError("hex bitset longer than the edge count")
        return cls.from_edges(n, (p for idx, p in enumerate(pairs) if (bits >> idx) & 1))


def random_colouring(n: int, rho, seed: int) -> Colouring:
    """Each edge red independently with probability ``rho``.

    Edges are drawn in (0,1),(0,2),... order from ``random.Random(seed)``,
    so a (n, rho, seed) triple always gives the same colouring.
    """
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    rng = random.Random(seed)
    return Colouring.from_predicate(n, lambda i, j: rng.random() < rho)


def _as_mask(c: Colouring, vs) -> int:
    if isinstance(vs, int):
        return vs
    m = mask_of(vs)
    if m >> c.n:
        raise IndexError("vertex set exceeds the colouring")
    return m


def count_edges(c: Colouring, colour: Colour, X, Y) -> int:
    """Number of ordered pairs (x, y) in X x Y, x != y, joined in ``colour``."""
    ym = _as_mask(c, Y)
    return sum(popcount(c.mask(x, colour) & ym) for x in members(_as_mask(c, X)))


def gen_density(c: Colouring, colour: Colour, X, Y) -> Fraction:
    """Colour-edges between X and Y over |X||Y|; 0 when either side is empty."""
    xm, ym = _as_mask(c, X), _as_mask(c, Y)
    denom = popcount(xm) * popcount(ym)
    if denom == 0:
        return Fraction(0)
    return Fraction(count_edges(c, colour, xm, ym), denom)


def red_density(c: Colouring, X, Y) -> Fraction:
    return gen_density(c, RED, X, Y)


def is_clique(c: Colouring, S, colour: Colour) -> bool:
    sm = _as_mask(c, S)
    for v in members(sm):
        rest = sm & ~(1 << v)
        if c.mask(v, colour) & rest != rest:
            return False
    return True


@dataclass(frozen=True)
class BookPair:
    spine: frozenset[int]
    pages: frozenset[int]
    colour: Colour = BLUE
    good: bool = field(default=True, compare=False)


def is_book(c: Colouring, b: BookPair) -> bool:
    if b.spine & b.pages:
        return False
    if not is_clique(c, b.spine, b.colour):
        return False
    pm = _as_mask(c, b.pages)
    return all(c.mask(s, b.colour) & pm == pm for s in b.spine)


def find_clique(c: Colouring, size: int, colour: Colour, within: int | None = None) -> list[int] | None:
    """Some ``colour`` clique of ``size`` vertices (lexicographically first), or None."""
    cand = c._all if within is None else within
    if size <= 0:
        return []

    def grow(chosen: list[int], cand: int) -> list[int] | None:
        if len(chosen) == size:
            return chosen
        need = size - len(chosen)
        while cand and popcount(cand) >= need:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            r = grow(chosen + [v], cand & c.mask(v, colour))
            if r is not None:
                return r
        return None

    return grow([], cand)


def clique_number(c: Colouring, colour: Colour) -> int:
    """Size of a largest ``colour`` clique (simple branch and bound)."""
    best = 0

    def expand(size: int, cand: int) -> None:
        nonlocal best
        if not cand:
            best = max(best, size)
            return
        while cand:
            if size + popcount(cand) <= best:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            expand(size + 1, cand & c.mask(v, colour))

    expand(0, c._all)
    return best
