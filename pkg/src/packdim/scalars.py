"""Scalar arithmetic in three realizations: fast floats, outward-rounded
intervals, and exact elements of Q(sqrt 2).

All packing formulas are written against plain Python arithmetic operators,
so they accept any mix of float, :class:`Interval` and :class:`QuadSurd`
operands.  Mixing rules: an exact operand entering a float computation
degrades to float; anything entering an interval computation is enclosed
first.  Interval endpoints are binary64 and every operation widens outward
by one ulp per endpoint (two ulps for transcendental ops, which libm only
guarantees faithfully rounded).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Scalar = Union[float, int, "Interval", "QuadSurd"]

_INF = math.inf

# sqrt(2) enclosure: SQRT2_LO**2 < 2 < SQRT2_HI**2
SQRT2_LO = math.nextafter(math.sqrt(2.0), 0.0)
SQRT2_HI = math.nextafter(math.sqrt(2.0), _INF)


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _frac_to_float_down(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) > q:
        f = _down(f)
    return f


def _frac_to_float_up(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) < q:
        f = _up(f)
    return f


class Interval:
    """Closed interval [lo, hi] with outward-rounded binary64 endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        if hi < lo:
            raise ValueError(f"interval endpoints out of order: [{lo}, {hi}]")
        self.lo = float(lo)
        self.hi = float(hi)

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def from_fraction(q: Fraction) -> "Interval":
        return Interval(_frac_to_float_down(q), _frac_to_float_up(q))

    @staticmethod
    def enclose(x: Scalar) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, QuadSurd):
            return x.to_interval()
        if isinstance(x, int):
            return Interval(float(x), float(x))
        return Interval(x, x)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = Interval.enclose(other)
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-Interval.enclose(other))

    def __rsub__(self, other):
        return Interval.enclose(other) + (-self)

    def __mul__(self, other):
        o = Interval.enclose(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_down(min(ps)), _up(max(ps)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval.enclose(other)
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError(f"division by interval containing zero: {o}")
        ps = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_down(min(ps)), _up(max(ps)))

    def __rtruediv__(self, other):
        return Interval.enclose(other) / self

    def __pow__(self, e):
        if isinstance(e, int) and e >= 0:
            out = Interval(1.0, 1.0)
            for _ in range(e):
                out = out * self
            return out
        return pow_scalar(self, e)

    # -- queries ---------------------------------------------------------

    def sqrt(self) -> "Interval":
        if self.hi < 0:
            raise ValueError("sqrt of negative interval")
        lo = max(self.lo, 0.0)
        return Interval(max(_down(math.sqrt(lo)), 0.0), _up(math.sqrt(self.hi)))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: Scalar) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, QuadSurd):
            ix = x.to_interval()
            return self.lo <= ix.lo and ix.hi <= self.hi
        return self.lo <= float(x) <= self.hi

    # comparisons are certain only when intervals do not overlap
    def __lt__(self, other):
        o = Interval.enclose(other)
        if self.hi < o.lo:
            return True
        if self.lo >= o.hi:
            return False
        raise ArithmeticError(f"ambiguous interval comparison: {self} < {o}")

    def __gt__(self, other):
        return Interval.enclose(other) < self

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __float__(self):
        return self.mid


class QuadSurd:
    """Exact element p + q*sqrt(2) of Q(sqrt 2), with rational p, q."""

    __slots__ = ("p", "q")

    def __init__(self, p, q=0):
        self.p = p if isinstance(p, Fraction) else Fraction(p)
        self.q = q if isinstance(q, Fraction) else Fraction(q)

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QuadSurd):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadSurd(other)
        return None

    @staticmethod
    def _is_float(other) -> bool:
        return isinstance(other, float)

    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        o = self._coerce(other)
        if o is None:
            return _degrade(self, other, "add")
        return QuadSurd(self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.p, -self.q)

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        o = self._coerce(other)
        if o is None:
            return _degrade(self, other, "sub")
        return QuadSurd(self.p - o.p, self.q - o.q)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        o = self._coerce(other)
        if o is None:
            return _degrade(self, other, "mul")
        return QuadSurd(self.p * o.p + 2 * self.q * o.q, self.p * o.q + self.q * o.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        o = self._coerce(other)
        if o is None:
            return _degrade(self, other, "div")
        nrm = o.p * o.p - 2 * o.q * o.q
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        return self * QuadSurd(o.p / nrm, -o.q / nrm)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return _degrade(other, self, "div")
        return o / self

    def __pow__(self, e):
        if isinstance(e, int) and e >= 0:
            out = QuadSurd(1)
            base = self
            k = e
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        return pow_scalar(self, e)

    # -- exact square root ---------------------------------------------------

    def sqrt_exact(self) -> "QuadSurd | None":
        """Exact square root in Q(sqrt 2), or None if not representable."""
        if self.q == 0:
            r = _frac_sqrt(self.p)
            if r is not None:
                return QuadSurd(r)
            r = _frac_sqrt(self.p / 2)
            if r is not None:
                return QuadSurd(0, r)
            return None
        # (u + v*sqrt2)^2 = u^2 + 2 v^2 + 2uv sqrt2
        disc = self.p * self.p - 2 * self.q * self.q
        rdisc = _frac_sqrt(disc)
        if rdisc is None:
            return None
        for u2 in ((self.p + rdisc) / 2, (self.p - rdisc) / 2):
            if u2 < 0:
                continue
            u = _frac_sqrt(u2)
            if u is None or u == 0:
                continue
            v = self.q / (2 * u)
            cand = QuadSurd(u, v)
            if cand * cand == self and cand.sign() >= 0:
                return cand
        return None

    # -- conversions & comparisons -------------------------------------------

    def sign(self) -> int:
        if self.p == 0 and self.q == 0:
            return 0
        if self.p >= 0 and self.q >= 0:
            return 1
        if self.p <= 0 and self.q <= 0:
            return -1
        # p, q of opposite signs: compare p^2 with 2 q^2
        big_p = self.p * self.p > 2 * self.q * self.q
        if self.p > 0:
            return 1 if big_p else -1
        return -1 if big_p else 1

    def to_interval(self) -> Interval:
        pl = Interval.from_fraction(self.p)
        if self.q == 0:
            return pl
        ql = Interval.from_fraction(self.q)
        return pl + ql * Interval(SQRT2_LO, SQRT2_HI)

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(2.0)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.p == o.p and self.q == o.q

    def __hash__(self):
        return hash((self.p, self.q))

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) < other
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) <= other
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) > other
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return float(self) >= other
        return (self - o).sign() >= 0

    def __repr__(self):
        if self.q == 0:
            return f"QuadSurd({self.p})"
        return f"QuadSurd({self.p}, {self.q})"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        return f"{self.p}+{self.q}*sqrt2"


SQRT8 = QuadSurd(0, 2)  # sqrt(8) = 2*sqrt(2)


def _degrade(a, b, _op):
    """Exact value meeting an inexact operand: move to the operand's realization."""
    if isinstance(b, Interval) or isinstance(a, Interval):
        return NotImplemented  # Interval.__radd__ etc. pick it up
    return NotImplemented


def _frac_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    if q == 0:
        return Fraction(0)
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


class NotRepresentable(ArithmeticError):
    """Square root left the quadratic ring and strict mode was requested."""


def sqrt_scalar(x: Scalar, strict: bool = False) -> Scalar:
    """Square root in the realization of ``x``.

    QuadSurd inputs stay exact when the argument is a perfect square of the
    ring; otherwise the value degrades to an outward-rounded interval
    (or raises :class:`NotRepresentable` when ``strict``).
    """
    if isinstance(x, QuadSurd):
        r = x.sqrt_exact()
        if r is not None:
            return r
        if strict:
            raise NotRepresentable(f"sqrt({x}) is not in Q(sqrt 2)")
        return x.to_interval().sqrt()
    if isinstance(x, Interval):
        return x.sqrt()
    return math.sqrt(x)


def pow_scalar(x: Scalar, e: Scalar) -> Scalar:
    """x**e for positive x and real exponent; intervals stay enclosures."""
    if isinstance(x, QuadSurd):
        x = x.to_interval()
    if isinstance(x, Interval):
        ef = float(e)
        if x.lo <= 0:
            raise ValueError("interval power needs a positive base")
        vals = (math.pow(x.lo, ef), math.pow(x.hi, ef))
        # libm pow is faithful, not correctly rounded: widen by 2 ulps
        return Interval(_down(_down(min(vals))), _up(_up(max(vals))))
    return math.pow(x, float(e))


def to_float(x: Scalar) -> float:
    return float(x)


def as_exact(x) -> QuadSurd:
    """Coerce ints/Fractions (and QuadSurds) to QuadSurd; floats are refused."""
    if isinstance(x, QuadSurd):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadSurd(x)
    raise TypeError(f"cannot treat {x!r} as exact")
