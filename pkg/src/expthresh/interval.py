"""Outward-rounded interval arithmetic over rationals, plus exact symbolic constants.

Endpoints are :class:`fractions.Fraction`.  Operations on point intervals stay
exact as long as the operands are small; once an endpoint grows past the
working precision it is rounded outward to a dyadic rational with ``prec``
significant bits.  Irrational quantities (``e``, k-th roots) are enclosed by
exact integer computations, so every enclosure is rigorous.

The working precision lives in a context variable so concurrent callers do
not interfere with each other.
"""

import contextlib
import contextvars
import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .errors import IndeterminateAtPrecision

DEFAULT_PREC = 128
MAX_PREC = 2048

_prec = contextvars.ContextVar("expthresh_prec", default=DEFAULT_PREC)


def get_prec() -> int:
    return _prec.get()


@contextlib.contextmanager
def precision(bits: int):
    token = _prec.set(int(bits))
    try:
        yield
    finally:
        _prec.reset(token)


def precision_ladder(start: Optional[int] = None, stop: int = MAX_PREC):
    bits = start or get_prec()
    while bits <= stop:
        yield bits
        bits *= 2


def _bits(x: Fraction) -> int:
    return max(x.numerator.bit_length(), x.denominator.bit_length())


def _round(x: Fraction, up: bool, prec: int) -> Fraction:
    if x == 0 or _bits(x) <= 2 * prec + 8:
        return x
    # keep `prec` significant bits
    mag = x.numerator.bit_length() - x.denominator.bit_length() if x > 0 else (
        (-x.numerator).bit_length() - x.denominator.bit_length())
    s = prec - mag
    num, den = x.numerator, x.denominator
    if s >= 0:
        num <<= s
    else:
        den <<= -s
    q = -((-num) // den) if up else num // den
    return Fraction(q << -s, 1) if s < 0 else Fraction(q, 1 << s)


def iroot_floor(a: int, k: int) -> int:
    """Largest integer r with r**k <= a (a >= 0)."""
    if a < 0:
        raise ValueError("negative radicand")
    if a < 2:
        return a
    if k == 1:
        return a
    r = 1 << ((a.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * r + a // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > a:
        r -= 1
    while (r + 1) ** k <= a:
        r += 1
    return r


def exact_root(x: Fraction, k: int) -> Optional[Fraction]:
    """The rational k-th root of ``x`` if it exists."""
    if x < 0:
        return None
    a = iroot_floor(x.numerator, k)
    b = iroot_floor(x.denominator, k)
    if a ** k == x.numerator and b ** k == x.denominator:
        return Fraction(a, b)
    return None


def _root_bound(x: Fraction, k: int, up: bool, prec: int) -> Fraction:
    ex = exact_root(x, k)
    if ex is not None:
        return ex
    mag = (x.numerator.bit_length() - x.denominator.bit_length()) // k
    s = prec + 2 - mag
    scale = Fraction(2) ** (k * s)
    scaled = x * scale
    if up:
        a = math.ceil(scaled)
        r = iroot_floor(a, k)
        if r ** k < a:
            r += 1
    else:
        r = iroot_floor(math.floor(scaled), k)
    return Fraction(r) / (Fraction(2) ** s)


@lru_cache(maxsize=None)
def _e_enclosure(prec: int) -> tuple[Fraction, Fraction]:
    # sum_{j<=N} 1/j! <= e <= that + 2/(N+1)!
    total = Fraction(0)
    fact = 1
    j = 0
    while True:
        total += Fraction(1, fact)
        j += 1
        fact *= j
        if fact > 2 ** (prec + 4):
            break
    lo = total
    hi = total + Fraction(2, fact)
    return _round(lo, False, prec), _round(hi, True, prec)


class Interval:
    """Closed interval [lo, hi] with rational endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = Fraction(lo)
        hi = lo if hi is None else Fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    @staticmethod
    def _make(lo: Fraction, hi: Fraction) -> "Interval":
        prec = get_prec()
        out = Interval.__new__(Interval)
        out.lo = _round(lo, False, prec)
        out.hi = _round(hi, True, prec)
        return out

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        x = to_interval(x)
        return self.lo <= x.lo and x.hi <= self.hi

    def __repr__(self):
        if self.is_exact:
            return f"Interval({self.lo})"
        return f"Interval([{float(self.lo)!r}, {float(self.hi)!r}])"

    def __add__(self, other):
        o = to_interval(other)
        return Interval._make(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval._make(-self.hi, -self.lo)

    def __sub__(self, other):
        o = to_interval(other)
        return Interval._make(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return to_interval(other) - self

    def __mul__(self, other):
        o = to_interval(other)
        if self.lo >= 0 and o.lo >= 0:
            return Interval._make(self.lo * o.lo, self.hi * o.hi)
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval._make(min(c), max(c))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return Interval._make(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * to_interval(other).reciprocal()

    def __rtruediv__(self, other):
        return to_interval(other) * self.reciprocal()

    def __pow__(self, k):
        if isinstance(k, int):
            if k < 0:
                return (self ** (-k)).reciprocal()
            if k == 0:
                return Interval(1)
            if self.lo >= 0:
                return Interval._make(_ipow(self.lo, k, False), _ipow(self.hi, k, True))
            out = Interval(1)
            for _ in range(k):
                out = out * self
            return out
        return rpow(self, Fraction(k))

    def root(self, k: int) -> "Interval":
        if self.lo < 0:
            raise ValueError("root of negative interval")
        prec = get_prec()
        return Interval(_root_bound(self.lo, k, False, prec), _root_bound(self.hi, k, True, prec))

    def ceil_exact(self) -> int:
        """ceil of the enclosed value; raises if the enclosure straddles an integer."""
        a, b = math.ceil(self.lo), math.ceil(self.hi)
        if a != b:
            raise IndeterminateAtPrecision(f"ceil undetermined for {self!r}")
        return a

    def to_json(self):
        return {"lower": decimal_str(self.lo, up=False), "upper": decimal_str(self.hi, up=True)}


def _ipow(x: Fraction, k: int, up: bool) -> Fraction:
    prec = get_prec()
    result = Fraction(1)
    base = x
    while k:
        if k & 1:
            result = _round(result * base, up, prec)
        k >>= 1
        if k:
            base = _round(base * base, up, prec)
    return result


def rpow(x: Interval, q: Fraction) -> Interval:
    """x ** q for a rational exponent, x >= 0."""
    q = Fraction(q)
    if q.denominator == 1:
        return x ** int(q)
    if q < 0:
        return rpow(x, -q).reciprocal()
    return (x ** q.numerator).root(q.denominator)


@lru_cache(maxsize=4096)
def _radical(base: Fraction, exp: Fraction, prec: int) -> Interval:
    return rpow(Interval(base), exp)


def e_interval() -> Interval:
    lo, hi = _e_enclosure(get_prec())
    return Interval(lo, hi)


Number = Union[int, Fraction, "Const", Interval]


def to_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, Const):
        return x.interval()
    if isinstance(x, (int, Fraction)):
        return Interval(x)
    if isinstance(x, float):
        return Interval(Fraction(x))
    if isinstance(x, str):
        return Interval(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Interval")


def decimal_str(x: Fraction, up: bool, digits: int = 40) -> str:
    """Decimal rendering of ``x`` rounded outward (down if not ``up``)."""
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    ax = -x if x < 0 else x
    up_abs = up if x > 0 else not up
    mag = len(str(ax.numerator)) - len(str(ax.denominator))
    scale = digits - mag
    scaled = ax * Fraction(10) ** scale
    n = math.ceil(scaled) if up_abs else math.floor(scaled)
    if scaled == n:
        n = int(scaled)
    s = str(n)
    if scale > 0:
        s = s.rjust(scale + 1, "0")
        s = s[:-scale] + "." + s[-scale:]
        s = s.rstrip("0").rstrip(".")
    else:
        s = s + "0" * (-scale)
    return sign + s


class Const:
    """Exact positive constant ``coef * e**e_pow * prod(base**exp)``.

    Used for loss factors such as ``4e`` or ``4 n**(1/k)`` and for probabilities
    like ``(sum g)**(-1/k)``; stays symbolic so that exact cancellations (``e/e``)
    are never lost to rounding.
    """

    __slots__ = ("coef", "e_pow", "radicals")

    def __init__(self, coef=1, e_pow=0, radicals=()):
        self.coef = Fraction(coef)
        self.e_pow = int(e_pow)
        merged: dict[Fraction, Fraction] = {}
        for base, exp in radicals:
            base, exp = Fraction(base), Fraction(exp)
            if exp == 0 or base == 1:
                continue
            merged[base] = merged.get(base, Fraction(0)) + exp
        coef = self.coef
        rads = []
        for base, exp in sorted(merged.items()):
            if exp == 0:
                continue
            if exp.denominator == 1:
                coef *= base ** int(exp)
                continue
            whole = exp.numerator // exp.denominator
            frac = exp - whole
            coef *= base ** whole
            r = exact_root(base, frac.denominator)
            if r is not None:
                coef *= r ** frac.numerator
                continue
            rads.append((base, frac))
        self.coef = coef
        self.radicals = tuple(rads)

    @classmethod
    def of(cls, x) -> "Const":
        if isinstance(x, Const):
            return x
        return cls(Fraction(x))

    def exact(self) -> Optional[Fraction]:
        if self.e_pow == 0 and not self.radicals:
            return self.coef
        return None

    def interval(self) -> Interval:
        out = Interval(self.coef)
        if self.e_pow:
            out = out * (e_interval() ** self.e_pow)
        for base, exp in self.radicals:
            out = out * _radical(base, exp, get_prec())
        return out

    def __mul__(self, other):
        if isinstance(other, Interval):
            return self.interval() * other
        o = Const.of(other)
        return Const(self.coef * o.coef, self.e_pow + o.e_pow, self.radicals + o.radicals)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Interval):
            return self.interval() / other
        return self * Const.of(other).inverse()

    def __rtruediv__(self, other):
        if isinstance(other, Interval):
            return other / self.interval()
        return Const.of(other) * self.inverse()

    def inverse(self) -> "Const":
        if self.coef == 0:
            raise ZeroDivisionError("inverse of zero constant")
        return Const(1 / self.coef, -self.e_pow, tuple((b, -x) for b, x in self.radicals))

    def __pow__(self, q):
        q = Fraction(q)
        if self.coef < 0:
            raise ValueError("power of negative constant")
        rads = tuple((b, x * q) for b, x in self.radicals)
        if q.denominator == 1:
            return Const(self.coef ** int(q), self.e_pow * int(q), rads)
        if (self.e_pow * q).denominator != 1:
            raise ValueError("fractional power of e is not representable")
        return Const(1, int(self.e_pow * q), ((self.coef, q),) + rads)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Const(other)
        if not isinstance(other, Const):
            return NotImplemented
        return (self.coef, self.e_pow, self.radicals) == (other.coef, other.e_pow, other.radicals)

    def __hash__(self):
        return hash((self.coef, self.e_pow, self.radicals))

    def __repr__(self):
        return f"Const({self})"

    def __str__(self):
        bare = self.e_pow or self.radicals
        s = "" if self.coef == 1 and bare else str(self.coef)
        if self.e_pow == 1:
            s += "e"
        elif self.e_pow:
            s += f"e^{self.e_pow}"
        for base, exp in self.radicals:
            b = f"({base})" if Fraction(base).denominator != 1 else str(base)
            s += ("*" if s else "") + f"{b}^({exp})"
        return s

    def to_json(self):
        return {
            "coef": str(self.coef),
            "e_pow": self.e_pow,
            "radicals": [[str(b), str(x)] for b, x in self.radicals],
            "text": str(self),
        }

    @classmethod
    def from_json(cls, obj) -> "Const":
        if isinstance(obj, (str, int)):
            return cls(Fraction(obj))
        return cls(Fraction(obj["coef"]), obj.get("e_pow", 0),
                   tuple((Fraction(b), Fraction(x)) for b, x in obj.get("radicals", ())))


def le(a, b, max_prec: int = MAX_PREC) -> bool:
    """Certified ``a <= b``; escalates precision, raises if still undecided."""
    r = compare(a, b, max_prec)
    return r <= 0


def compare(a, b, max_prec: int = MAX_PREC) -> int:
    """Sign of ``a - b``, certified.  Raises :class:`IndeterminateAtPrecision`."""
    ea = _exact(a)
    eb = _exact(b)
    if ea is not None and eb is not None:
        return (ea > eb) - (ea < eb)
    if isinstance(a, (Const, int, Fraction)) and isinstance(b, (Const, int, Fraction)):
        ratio = (Const.of(a) / Const.of(b)).exact()
        if ratio is not None:
            return (ratio > 1) - (ratio < 1)
    for bits in precision_ladder(max(get_prec(), DEFAULT_PREC), max_prec):
        with precision(bits):
            ia, ib = to_interval(a), to_interval(b)
        if ia.hi < ib.lo:
            return -1
        if ia.lo > ib.hi:
            return 1
        if ia.is_exact and ib.is_exact and ia.lo == ib.lo:
            return 0
        if isinstance(a, Interval) and isinstance(b, Interval):
            break
    raise IndeterminateAtPrecision(f"cannot order {a!r} and {b!r} at {max_prec} bits")


def _exact(x) -> Optional[Fraction]:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, Const):
        return x.exact()
    if isinstance(x, Interval) and x.is_exact:
        return x.lo
    return None


def tri_le(a: Interval, b: Interval) -> Optional[bool]:
    """True if certainly a <= b, False if certainly a > b, None otherwise."""
    if a.hi <= b.lo:
        return True
    if a.lo > b.hi:
        return False
    return None


def to_fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
