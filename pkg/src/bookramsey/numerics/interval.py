"""Outward-rounded interval arithmetic over IEEE doubles.

Every basic operation is rounded in the safe direction using error-free
transformations (TwoSum, Dekker's TwoProduct), so results that happen to be
exact stay exact: ``1 - 1`` is ``[0, 0]``, not a one-ulp blur around zero.
``exp`` and ``log`` are evaluated from argument-reduced series whose
truncation remainder is bounded explicitly and carried as an interval, so
no enclosure relies on the accuracy of the platform libm.

Endpoints are extended reals: ``-inf``/``inf`` are legal and signal that
nothing useful is known in that direction.
"""

from __future__ import annotations

import math
from fractions import Fraction

INF = math.inf
_MAX = 1.7976931348623157e308
_SPLITTER = 134217729.0  # 2**27 + 1
# outside this band the error-free transforms may overflow or underflow
_SAFE_HI = 2.0**900
_SAFE_LO = 2.0**-900

_nextafter = math.nextafter


def _down(x: float) -> float:
    return _nextafter(x, -INF)


def _up(x: float) -> float:
    return _nextafter(x, INF)


def add_dn(a: float, b: float) -> float:
    s = a + b
    if s - s != 0.0:  # inf or nan
        if s == INF and a != INF and b != INF:
            return _MAX
        return s
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _down(s) if err < 0.0 else s


def add_up(a: float, b: float) -> float:
    s = a + b
    if s - s != 0.0:
        if s == -INF and a != -INF and b != -INF:
            return -_MAX
        return s
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _up(s) if err > 0.0 else s


def _two_prod_err(a: float, b: float, p: float) -> float:
    c = _SPLITTER * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLITTER * b
    bh = c - (c - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _mul_err_sign(a: float, b: float, p: float) -> float:
    """Sign of (a*b - p), or nan when the transform is unsafe."""
    if a == 0.0 or b == 0.0:
        return 0.0
    ap = abs(p)
    if ap > _SAFE_HI or ap < _SAFE_LO or abs(a) > _SAFE_HI or abs(b) > _SAFE_HI:
        return math.nan
    return _two_prod_err(a, b, p)


def mul_dn(a: float, b: float) -> float:
    p = a * b
    if p != p:  # 0 * inf
        return 0.0
    if p - p != 0.0:
        if math.isinf(a) or math.isinf(b):
            return p
        return p if p < 0 else _MAX
    e = _mul_err_sign(a, b, p)
    if e != e:
        # underflow: a positive product never needs a bound below zero
        return max(_down(p), 0.0) if (a > 0) == (b > 0) else _down(p)
    return _down(p) if e < 0.0 else p


def mul_up(a: float, b: float) -> float:
    p = a * b
    if p != p:
        return 0.0
    if p - p != 0.0:
        if math.isinf(a) or math.isinf(b):
            return p
        return p if p > 0 else -_MAX
    e = _mul_err_sign(a, b, p)
    if e != e:
        return min(_up(p), 0.0) if (a > 0) != (b > 0) else _up(p)
    return _up(p) if e > 0.0 else p


def _div_rem_sign(a: float, b: float, q: float) -> float:
    """Sign of the exact a/b - q, or nan when unsafe."""
    if a == 0.0:
        return 0.0
    if abs(a) > _SAFE_HI or abs(a) < _SAFE_LO or abs(b) > _SAFE_HI or abs(b) < _SAFE_LO:
        return math.nan
    if abs(q) > _SAFE_HI or abs(q) < _SAFE_LO:
        return math.nan
    p = q * b
    err = _two_prod_err(q, b, p)
    r = (a - p) - err  # a - q*b, sign-exact
    if r == 0.0:
        return 0.0
    return r if b > 0 else -r


def div_dn(a: float, b: float) -> float:
    q = a / b
    if q - q != 0.0 or (q == 0.0 and a != 0.0):
        if math.isinf(a) or math.isinf(b) or q != q:
            return q
        if q == 0.0:
            return 0.0 if (a > 0) == (b > 0) else -5e-324
        return q if q < 0 else _MAX
    s = _div_rem_sign(a, b, q)
    if s != s:
        return _down(q)
    return _down(q) if s < 0.0 else q


def div_up(a: float, b: float) -> float:
    q = a / b
    if q - q != 0.0 or (q == 0.0 and a != 0.0):
        if math.isinf(a) or math.isinf(b) or q != q:
            return q
        if q == 0.0:
            return 5e-324 if (a > 0) == (b > 0) else -0.0
        return q if q > 0 else -_MAX
    s = _div_rem_sign(a, b, q)
    if s != s:
        return _up(q)
    return _up(q) if s > 0.0 else q


def fraction_dn(q: Fraction) -> float:
    """Largest double <= q."""
    f = float(q)
    if f != INF and Fraction(f) > q:
        f = _down(f)
    return f


def fraction_up(q: Fraction) -> float:
    f = float(q)
    if f != -INF and Fraction(f) < q:
        f = _up(f)
    return f


class Interval:
    """Closed interval ``[lo, hi]`` of extended reals."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if not lo <= hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def _raw(cls, lo: float, hi: float) -> "Interval":
        # nan endpoints come from inf - inf or inf / inf: the bound is unknown
        if lo != lo:
            lo = -INF
        if hi != hi:
            hi = INF
        iv = object.__new__(cls)
        iv.lo = lo
        iv.hi = hi
        return iv

    @classmethod
    def exact(cls, value) -> "Interval":
        """Tightest enclosure of an exact rational (int, Fraction, or float)."""
        if isinstance(value, float):
            return cls._raw(value, value)
        q = Fraction(value)
        return cls._raw(fraction_dn(q), fraction_up(q))

    @classmethod
    def entire(cls) -> "Interval":
        return cls._raw(-INF, INF)

    # --- queries -------------------------------------------------------
    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        if math.isinf(self.lo) or math.isinf(self.hi):
            if self.lo == -INF and self.hi == INF:
                return 0.0
            return self.hi if math.isinf(self.lo) else self.lo
        m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def is_finite(self) -> bool:
        return -INF < self.lo and self.hi < INF

    def hull(self, other: "Interval") -> "Interval":
        return Interval._raw(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "Interval") -> "Interval | None":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        return Interval._raw(lo, hi) if lo <= hi else None

    def bisect(self) -> tuple["Interval", "Interval"]:
        m = self.mid
        return Interval._raw(self.lo, m), Interval._raw(m, self.hi)

    # --- arithmetic ----------------------------------------------------
    def __neg__(self) -> "Interval":
        return Interval._raw(-self.hi, -self.lo)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval._raw(add_dn(self.lo, other.lo), add_up(self.hi, other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval._raw(add_dn(self.lo, -other.hi), add_up(self.hi, -other.lo))

    def __mul__(self, other: "Interval") -> "Interval":
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        if a == b and c == d:
            return Interval._raw(mul_dn(a, c), mul_up(a, c))
        if a >= 0.0:
            if c >= 0.0:
                return Interval._raw(mul_dn(a, c), mul_up(b, d))
            if d <= 0.0:
                return Interval._raw(mul_dn(b, c), mul_up(a, d))
            return Interval._raw(mul_dn(b, c), mul_up(b, d))
        if b <= 0.0:
            if c >= 0.0:
                return Interval._raw(mul_dn(a, d), mul_up(b, c))
            if d <= 0.0:
                return Interval._raw(mul_dn(b, d), mul_up(a, c))
            return Interval._raw(mul_dn(a, d), mul_up(a, c))
        # self straddles zero
        if c >= 0.0:
            return Interval._raw(mul_dn(a, d), mul_up(b, d))
        if d <= 0.0:
            return Interval._raw(mul_dn(b, c), mul_up(a, c))
        return Interval._raw(
            min(mul_dn(a, d), mul_dn(b, c)), max(mul_up(a, c), mul_up(b, d))
        )

    def recip(self) -> "Interval":
        a, b = self.lo, self.hi
        if a > 0.0 or b < 0.0:
            return Interval._raw(div_dn(1.0, b), div_up(1.0, a))
        return Interval.entire()

    def __truediv__(self, other: "Interval") -> "Interval":
        c, d = other.lo, other.hi
        if c <= 0.0 <= d:
            return Interval.entire()
        a, b = self.lo, self.hi
        if c > 0.0:
            lo = div_dn(a, d) if a >= 0.0 else div_dn(a, c)
            hi = div_up(b, c) if b >= 0.0 else div_up(b, d)
        else:
            lo = div_dn(b, d) if b >= 0.0 else div_dn(b, c)
            hi = div_up(a, c) if a >= 0.0 else div_up(a, d)
        return Interval._raw(lo, hi)

    def __pow__(self, n: int) -> "Interval":
        if not isinstance(n, int) or n < 0:
            raise ValueError("natural exponent required")
        if n == 0:
            return Interval._raw(1.0, 1.0)
        if n == 1:
            return self
        a, b = self.lo, self.hi
        if a >= 0.0:
            return Interval._raw(_pow_dn(a, n), _pow_up(b, n))
        if b <= 0.0:
            if n % 2 == 0:
                return Interval._raw(_pow_dn(-b, n), _pow_up(-a, n))
            return Interval._raw(-_pow_up(-a, n), -_pow_dn(-b, n))
        if n % 2 == 0:
            return Interval._raw(0.0, max(_pow_up(-a, n), _pow_up(b, n)))
        return Interval._raw(-_pow_up(-a, n), _pow_up(b, n))

    def __abs__(self) -> "Interval":
        if self.lo >= 0.0:
            return self
        if self.hi <= 0.0:
            return -self
        return Interval._raw(0.0, max(-self.lo, self.hi))


def _pow_dn(x: float, n: int) -> float:
    # x >= 0
    r = 1.0
    while n:
        if n & 1:
            r = mul_dn(r, x)
        n >>= 1
        if n:
            x = mul_dn(x, x)
    return r


def _pow_up(x: float, n: int) -> float:
    r = 1.0
    while n:
        if n & 1:
            r = mul_up(r, x)
        n >>= 1
        if n:
            x = mul_up(x, x)
    return r


def iv_min(a: Interval, b: Interval) -> Interval:
    return Interval._raw(min(a.lo, b.lo), min(a.hi, b.hi))


def iv_max(a: Interval, b: Interval) -> Interval:
    return Interval._raw(max(a.lo, b.lo), max(a.hi, b.hi))


def round_out(iv: Interval, bits: int) -> Interval:
    """Widen ``iv`` so both endpoints carry at most ``bits`` significant bits."""
    if bits >= 53:
        return iv
    return Interval._raw(_round_bits(iv.lo, bits, False), _round_bits(iv.hi, bits, True))


def _round_bits(x: float, bits: int, upward: bool) -> float:
    if x == 0.0 or math.isinf(x):
        return x
    m, e = math.frexp(x)  # x = m * 2**e, 0.5 <= |m| < 1
    scaled = math.ldexp(m, bits)  # exact
    r = math.ceil(scaled) if upward else math.floor(scaled)
    return math.ldexp(r, e - bits)


# --- elementary functions ----------------------------------------------

_ONE = Interval._raw(1.0, 1.0)
_EXP_TERMS = 18
_INV_FACT = [Interval.exact(Fraction(1, math.factorial(j))) for j in range(_EXP_TERMS + 1)]
_LOG_TERMS = 13
_INV_ODD = [Interval.exact(Fraction(1, 2 * j + 1)) for j in range(24)]


def _atanh_series(t: Interval, terms: int = _LOG_TERMS) -> Interval:
    """Enclosure of atanh(t) = sum t^(2j+1)/(2j+1) for |t| < 1."""
    t2 = t * t
    s = _INV_ODD[terms - 1]
    for j in range(terms - 2, -1, -1):
        s = s * t2 + _INV_ODD[j]
    s = t * s
    tm = max(abs(t.lo), abs(t.hi))
    # tail: |t|^(2N+1)/((2N+1)(1-t^2))
    n2 = 2 * terms + 1
    tail = _pow_up(tm, n2)
    tail = div_up(tail, mul_dn(float(n2), add_dn(1.0, -mul_up(tm, tm))))
    return s + Interval._raw(-tail, tail)


# ln 2 = 2 atanh(1/3)
LN2 = Interval._raw(2.0, 2.0) * _atanh_series(Interval.exact(Fraction(1, 3)), 22)
_SQRT_HALF = 0.7071067811865476


def _log_point(x: float) -> Interval:
    """Enclosure of ln(x) for a finite double x > 0."""
    if x == 1.0:
        return Interval._raw(0.0, 0.0)
    m, e = math.frexp(x)
    if m < _SQRT_HALF:
        m *= 2.0
        e -= 1
    # m in [0.707, 1.415); m - 1 is exact (Sterbenz)
    num = Interval._raw(m - 1.0, m - 1.0)
    den = Interval._raw(add_dn(m, 1.0), add_up(m, 1.0))
    r = Interval._raw(2.0, 2.0) * _atanh_series(num / den)
    if e != 0:
        r = r + Interval._raw(float(e), float(e)) * LN2
    # ln(x) <= x - 1 and the sign of ln(x) is known exactly
    lo, hi = r.lo, min(r.hi, add_up(x, -1.0))
    if x > 1.0:
        lo = max(lo, 0.0)
    else:
        hi = min(hi, 0.0)
    return Interval._raw(lo, hi)


def _exp_point(x: float) -> Interval:
    """Enclosure of exp(x) for a finite double x."""
    if x == 0.0:
        return _ONE
    if x > 709.0:
        return Interval._raw(_exp_point(709.0).lo, INF)
    if x < -700.0:
        return Interval._raw(0.0, _exp_point(-700.0).hi)
    k = round(x / 0.6931471805599453)
    r = Interval._raw(x, x) - Interval._raw(float(k), float(k)) * LN2
    p = _INV_FACT[_EXP_TERMS]
    for j in range(_EXP_TERMS - 1, -1, -1):
        p = p * r + _INV_FACT[j]
    rm = max(abs(r.lo), abs(r.hi))
    # Lagrange remainder, e^|r| <= 2 for |r| <= 0.35
    tail = mul_up(2.0, div_up(_pow_up(rm, _EXP_TERMS + 1), float(math.factorial(_EXP_TERMS + 1))))
    p = p + Interval._raw(-tail, tail)
    lo = math.ldexp(max(p.lo, 0.0), k)
    hi = math.ldexp(p.hi, k)
    # exp(x) >= 1 + x and the sign of x fixes which side of 1 we are on;
    # this keeps endpoint enclosures consistent across neighbouring points
    if x > 0.0:
        lo = max(lo, add_dn(1.0, x))
    else:
        hi = min(hi, 1.0)
    return Interval._raw(lo, hi)


def exp(iv: Interval) -> Interval:
    lo = 0.0 if iv.lo == -INF else _exp_point(iv.lo).lo
    hi = INF if iv.hi == INF else _exp_point(iv.hi).hi
    return Interval._raw(lo, hi)


def log(iv: Interval) -> Interval:
    """Natural log; ``ln 0 = -inf``; any negative part gives the entire line."""
    if iv.lo < 0.0:
        return Interval.entire()
    lo = -INF if iv.lo == 0.0 else (INF if iv.lo == INF else _log_point(iv.lo).lo)
    if iv.hi == 0.0:
        return Interval._raw(-INF, -INF) if lo == -INF else Interval.entire()
    hi = INF if iv.hi == INF else _log_point(iv.hi).hi
    return Interval._raw(lo, hi)


def _log2_point(x: float) -> Interval:
    m, e = math.frexp(x)
    if m == 0.5:
        return Interval._raw(float(e - 1), float(e - 1))
    return _log_point(x) / LN2


def log2(iv: Interval) -> Interval:
    if iv.lo < 0.0:
        return Interval.entire()
    lo = -INF if iv.lo == 0.0 else (INF if iv.lo == INF else _log2_point(iv.lo).lo)
    if iv.hi == 0.0:
        return Interval._raw(-INF, -INF)
    hi = INF if iv.hi == INF else _log2_point(iv.hi).hi
    return Interval._raw(lo, hi)


def powr(base: Interval, expo: Interval) -> Interval:
    """``base ** expo`` for real exponents, as exp(expo * ln base); 0^r = 0 for r > 0."""
    if base.lo < 0.0:
        return Interval.entire()
    if base.hi == 0.0:
        if expo.lo > 0.0:
            return Interval._raw(0.0, 0.0)
        return Interval.entire()
    if base.lo == 0.0 and expo.lo <= 0.0:
        return Interval.entire()
    return exp(expo * log(base))


_INV_E = _exp_point(-1.0)
_INV_E_LO, _INV_E_HI = _INV_E.lo, _INV_E.hi


def xlogx(u: Interval) -> Interval:
    """Enclosure of u*ln(u), continuously extended by 0 at u = 0.

    Decreasing on [0, 1/e], increasing afterwards, minimum -1/e.
    """
    a, b = u.lo, u.hi
    if a < 0.0:
        return Interval.entire()

    def at(t: float) -> Interval:
        if t == 0.0:
            return Interval._raw(0.0, 0.0)
        if t == INF:
            return Interval._raw(INF, INF)
        return Interval._raw(t, t) * _log_point(t)

    fa, fb = at(a), at(b)
    hi = max(fa.hi, fb.hi)
    if a <= _INV_E_HI and b >= _INV_E_LO:
        lo = -_INV_E_HI
    else:
        lo = min(fa.lo, fb.lo)
    # global minimum is -1/e and the function is non-positive on [0, 1]
    lo = max(lo, -_INV_E_HI)
    if b <= 1.0:
        hi = min(hi, 0.0)
    return Interval._raw(lo, hi)


def xlog_ratio(u: Interval, v: Interval) -> Interval:
    """Enclosure of u*ln(v/u) for u, v >= 0, extended by 0 at u = 0.

    For fixed u the map is increasing in v; for fixed v it is concave in u
    with maximum v/e at u = v/e.
    """
    a, b = u.lo, u.hi
    c, d = v.lo, v.hi
    if a < 0.0 or c < 0.0:
        return Interval.entire()

    def at(t: float, w: float) -> Interval:
        if t == 0.0:
            return Interval._raw(0.0, 0.0)
        if w == 0.0:
            return Interval._raw(-INF, -INF)
        if t == INF or w == INF:
            return Interval.entire()
        return Interval._raw(t, t) * (_log_point(w) - _log_point(t))

    if d == INF or b == INF:
        hi = INF
    elif d == 0.0:
        hi = 0.0 if a == 0.0 else -INF
    else:
        hi = max(at(a, d).hi, at(b, d).hi)
        # interior maximum d/e if the peak may lie inside [a, b]
        if mul_up(d, _INV_E_HI) >= a and mul_dn(d, _INV_E_LO) <= b:
            hi = max(hi, mul_up(d, _INV_E_HI))
    lo = min(at(a, c).lo, at(b, c).lo)
    if hi < lo:
        hi = lo
    return Interval._raw(lo, hi)
