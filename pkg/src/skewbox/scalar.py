"""Certified real intervals with dyadic endpoints.

A :class:`Scalar` is a closed interval ``[lo, hi]`` whose endpoints are dyadic
rationals.  Every operation rounds outward, so the true result of the exact
real operation on any points of the inputs lies inside the output.  Mantissas
are kept to the current working precision (see :func:`working_precision`).

Comparisons return a :class:`Tri` value instead of a bool: an interval
comparison can be undecidable when enclosures overlap.
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
from fractions import Fraction
from typing import Iterator, Union

from . import _kernel as K

DEFAULT_PRECISION = 192

_prec: contextvars.ContextVar[int] = contextvars.ContextVar("prec", default=DEFAULT_PRECISION)


def get_precision() -> int:
    return _prec.get()


@contextlib.contextmanager
def working_precision(bits: int) -> Iterator[int]:
    """Temporarily set the mantissa precision (in bits) for new results."""
    if bits < 8:
        raise ValueError("precision must be at least 8 bits")
    token = _prec.set(int(bits))
    try:
        yield int(bits)
    finally:
        _prec.reset(token)


class Tri(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNDECIDED = "undecided"

    def __bool__(self) -> bool:  # guard against silent truthiness
        raise TypeError("Tri values must be compared explicitly")

    @staticmethod
    def of(flag: bool) -> "Tri":
        return Tri.TRUE if flag else Tri.FALSE

    def and_(self, other: "Tri") -> "Tri":
        if self is Tri.FALSE or other is Tri.FALSE:
            return Tri.FALSE
        if self is Tri.TRUE and other is Tri.TRUE:
            return Tri.TRUE
        return Tri.UNDECIDED


class PrecisionError(ArithmeticError):
    """An enclosure is too wide to decide the requested question."""


Number = Union[int, Fraction, "Scalar"]


def _frac_to_dyadic(q: Fraction, prec: int, up: bool) -> tuple[int, int]:
    p, d = q.numerator, q.denominator
    if d & (d - 1) == 0:
        return K.round_dyadic(p, -(d.bit_length() - 1), prec, up)
    return K.div_dyadic(p, 0, d, 0, prec, up)


def dyadic_to_fraction(m: int, e: int) -> Fraction:
    if e >= 0:
        return Fraction(m << e)
    return Fraction(m, 1 << (-e))


def _dyadic_floor(m: int, e: int) -> int:
    return m << e if e >= 0 else m >> (-e)


def _dyadic_ceil(m: int, e: int) -> int:
    return m << e if e >= 0 else -((-m) >> (-e))


class Scalar:
    """Closed interval with dyadic endpoints ``lm*2**le <= x <= hm*2**he``."""

    __slots__ = ("lm", "le", "hm", "he")

    def __init__(self, lm: int, le: int, hm: int, he: int):
        self.lm = lm
        self.le = le
        self.hm = hm
        self.he = he

    # ----------------------------------------------------------- construction
    @staticmethod
    def exact(x: Union[int, Fraction]) -> "Scalar":
        """Exact value when dyadic, otherwise a tight enclosure."""
        if isinstance(x, int):
            return Scalar(x, 0, x, 0)
        q = Fraction(x)
        d = q.denominator
        if d & (d - 1) == 0:
            e = -(d.bit_length() - 1)
            return Scalar(q.numerator, e, q.numerator, e)
        prec = _prec.get()
        lm, le = _frac_to_dyadic(q, prec, False)
        hm, he = _frac_to_dyadic(q, prec, True)
        return Scalar(lm, le, hm, he)

    @staticmethod
    def interval(lo: Union[int, Fraction], hi: Union[int, Fraction]) -> "Scalar":
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("empty interval")
        prec = _prec.get()
        lm, le = _frac_to_dyadic(lo, prec, False)
        hm, he = _frac_to_dyadic(hi, prec, True)
        return Scalar(lm, le, hm, he)

    @staticmethod
    def coerce(x: Number) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        return Scalar.exact(x)

    # ----------------------------------------------------------- inspection
    @property
    def lo(self) -> Fraction:
        return dyadic_to_fraction(self.lm, self.le)

    @property
    def hi(self) -> Fraction:
        return dyadic_to_fraction(self.hm, self.he)

    def width(self) -> Fraction:
        return self.hi - self.lo

    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_exact(self) -> bool:
        return K.cmp_dyadic(self.lm, self.le, self.hm, self.he) == 0

    def __float__(self) -> float:
        return float(self.mid())

    def __repr__(self) -> str:
        if self.is_exact():
            return f"Scalar({float(self.lo)!r})"
        return f"Scalar([{float(self.lo)!r}, {float(self.hi)!r}], w={float(self.width()):.3g})"

    def contains(self, x: Number) -> bool:
        """True when ``x`` (a point or interval) is certainly inside ``self``."""
        o = Scalar.coerce(x)
        return (K.cmp_dyadic(self.lm, self.le, o.lm, o.le) <= 0
                and K.cmp_dyadic(o.hm, o.he, self.hm, self.he) <= 0)

    def overlaps(self, x: Number) -> bool:
        o = Scalar.coerce(x)
        return (K.cmp_dyadic(self.lm, self.le, o.hm, o.he) <= 0
                and K.cmp_dyadic(o.lm, o.le, self.hm, self.he) <= 0)

    def same_as(self, x: "Scalar") -> bool:
        return (K.cmp_dyadic(self.lm, self.le, x.lm, x.le) == 0
                and K.cmp_dyadic(self.hm, self.he, x.hm, x.he) == 0)

    # ----------------------------------------------------------- comparisons
    def lt(self, x: Number) -> Tri:
        o = Scalar.coerce(x)
        if K.cmp_dyadic(self.hm, self.he, o.lm, o.le) < 0:
            return Tri.TRUE
        if K.cmp_dyadic(self.lm, self.le, o.hm, o.he) >= 0:
            return Tri.FALSE
        return Tri.UNDECIDED

    def le_(self, x: Number) -> Tri:
        o = Scalar.coerce(x)
        if K.cmp_dyadic(self.hm, self.he, o.lm, o.le) <= 0:
            return Tri.TRUE
        if K.cmp_dyadic(self.lm, self.le, o.hm, o.he) > 0:
            return Tri.FALSE
        return Tri.UNDECIDED

    def gt(self, x: Number) -> Tri:
        return Scalar.coerce(x).lt(self)

    def ge(self, x: Number) -> Tri:
        return Scalar.coerce(x).le_(self)

    def certainly_lt(self, x: Number) -> bool:
        return self.lt(x) is Tri.TRUE

    def certainly_le(self, x: Number) -> bool:
        return self.le_(x) is Tri.TRUE

    def sign(self) -> int:
        """Certified sign, or raise :class:`PrecisionError` if 0 is inside."""
        if self.lm > 0:
            return 1
        if self.hm < 0:
            return -1
        if self.lm == 0 and self.hm == 0:
            return 0
        raise PrecisionError(f"sign undecided for {self!r}")

    def excludes_zero(self) -> bool:
        return self.lm > 0 or self.hm < 0

    # ----------------------------------------------------------- arithmetic
    def __neg__(self) -> "Scalar":
        return Scalar(-self.hm, self.he, -self.lm, self.le)

    def __add__(self, x: Number) -> "Scalar":
        o = Scalar.coerce(x)
        prec = _prec.get()
        lm, le = K.add_dyadic(self.lm, self.le, o.lm, o.le, prec, False)
        hm, he = K.add_dyadic(self.hm, self.he, o.hm, o.he, prec, True)
        return Scalar(lm, le, hm, he)

    __radd__ = __add__

    def __sub__(self, x: Number) -> "Scalar":
        return self + (-Scalar.coerce(x))

    def __rsub__(self, x: Number) -> "Scalar":
        return Scalar.coerce(x) + (-self)

    def __mul__(self, x: Number) -> "Scalar":
        o = Scalar.coerce(x)
        prec = _prec.get()
        if self.lm >= 0 and o.lm >= 0:
            lo = K.mul_dyadic(self.lm, self.le, o.lm, o.le, prec, False)
            hi = K.mul_dyadic(self.hm, self.he, o.hm, o.he, prec, True)
            return Scalar(lo[0], lo[1], hi[0], hi[1])
        ends = []
        for am, ae in ((self.lm, self.le), (self.hm, self.he)):
            for bm, be in ((o.lm, o.le), (o.hm, o.he)):
                ends.append((am * bm, ae + be))
        lo = ends[0]
        hi = ends[0]
        for c in ends[1:]:
            if K.cmp_dyadic(c[0], c[1], lo[0], lo[1]) < 0:
                lo = c
            if K.cmp_dyadic(c[0], c[1], hi[0], hi[1]) > 0:
                hi = c
        lm, le = K.round_dyadic(lo[0], lo[1], prec, False)
        hm, he = K.round_dyadic(hi[0], hi[1], prec, True)
        return Scalar(lm, le, hm, he)

    __rmul__ = __mul__

    def __truediv__(self, x: Number) -> "Scalar":
        o = Scalar.coerce(x)
        if not o.excludes_zero():
            raise PrecisionError("division by an enclosure containing 0")
        prec = _prec.get()
        best_lo = best_hi = None
        for am, ae in ((self.lm, self.le), (self.hm, self.he)):
            for bm, be in ((o.lm, o.le), (o.hm, o.he)):
                ql = K.div_dyadic(am, ae, bm, be, prec, False)
                qh = K.div_dyadic(am, ae, bm, be, prec, True)
                if best_lo is None or K.cmp_dyadic(ql[0], ql[1], best_lo[0], best_lo[1]) < 0:
                    best_lo = ql
                if best_hi is None or K.cmp_dyadic(qh[0], qh[1], best_hi[0], best_hi[1]) > 0:
                    best_hi = qh
        return Scalar(best_lo[0], best_lo[1], best_hi[0], best_hi[1])

    def __rtruediv__(self, x: Number) -> "Scalar":
        return Scalar.coerce(x) / self

    def scale2(self, k: int) -> "Scalar":
        """Exact multiplication by ``2**k``."""
        return Scalar(self.lm, self.le + k, self.hm, self.he + k)

    def __abs__(self) -> "Scalar":
        if self.lm >= 0:
            return self
        if self.hm <= 0:
            return -self
        # straddles zero
        if K.cmp_dyadic(-self.lm, self.le, self.hm, self.he) > 0:
            return Scalar(0, 0, -self.lm, self.le)
        return Scalar(0, 0, self.hm, self.he)

    def square(self) -> "Scalar":
        a = abs(self)
        return a * a

    def hull(self, x: Number) -> "Scalar":
        o = Scalar.coerce(x)
        if K.cmp_dyadic(o.lm, o.le, self.lm, self.le) < 0:
            lm, le = o.lm, o.le
        else:
            lm, le = self.lm, self.le
        if K.cmp_dyadic(o.hm, o.he, self.hm, self.he) > 0:
            hm, he = o.hm, o.he
        else:
            hm, he = self.hm, self.he
        return Scalar(lm, le, hm, he)

    def intersect(self, x: "Scalar") -> "Scalar":
        if not self.overlaps(x):
            raise ValueError("empty intersection")
        lm, le = (x.lm, x.le) if K.cmp_dyadic(x.lm, x.le, self.lm, self.le) > 0 else (self.lm, self.le)
        hm, he = (x.hm, x.he) if K.cmp_dyadic(x.hm, x.he, self.hm, self.he) < 0 else (self.hm, self.he)
        return Scalar(lm, le, hm, he)

    def widen(self, r: Union[int, Fraction]) -> "Scalar":
        """Interval ``[lo - r, hi + r]`` (outward rounded)."""
        rr = Scalar.exact(r) if not isinstance(r, Scalar) else r
        return self + Scalar(-rr.hm, rr.he, rr.hm, rr.he)

    def lower(self) -> "Scalar":
        return Scalar(self.lm, self.le, self.lm, self.le)

    def upper(self) -> "Scalar":
        return Scalar(self.hm, self.he, self.hm, self.he)

    # ----------------------------------------------------------- transcendental
    def sin(self) -> "Scalar":
        return _sin_interval(self)

    def cos(self) -> "Scalar":
        return _sin_interval(self + pi().scale2(-1))


def hull_all(values) -> Scalar:
    it = iter(values)
    out = next(it)
    for v in it:
        out = out.hull(v)
    return out


def smin(a: Scalar, b: Scalar) -> Scalar:
    """Enclosure of ``min(x, y)`` over ``x in a, y in b``."""
    lm, le = (a.lm, a.le) if K.cmp_dyadic(a.lm, a.le, b.lm, b.le) <= 0 else (b.lm, b.le)
    hm, he = (a.hm, a.he) if K.cmp_dyadic(a.hm, a.he, b.hm, b.he) <= 0 else (b.hm, b.he)
    return Scalar(lm, le, hm, he)


def smax(a: Scalar, b: Scalar) -> Scalar:
    return -smin(-a, -b)


# --------------------------------------------------------------------- pi
_pi_cache: dict[str, tuple[int, int, int]] = {}


def _pi_fixed(bits: int) -> tuple[int, int, int]:
    """``(p, err, w)`` with pi in ``[(p-err)/2**w, (p+err)/2**w]``, w >= bits."""
    cached = _pi_cache.get("pi")
    if cached is not None and cached[2] >= bits + 16:
        return cached
    w = max(bits + 32, 2 * (cached[2] if cached else 0), 256)
    p, err = K.pi_fixed(w)
    _pi_cache["pi"] = (p, err, w)
    return p, err, w


def pi(bits: int | None = None) -> Scalar:
    """Enclosure of pi with mantissas rounded to the working precision."""
    prec = _prec.get() if bits is None else bits
    p, err, w = _pi_fixed(prec + 8)
    lm, le = K.round_dyadic(p - err, -w, prec, False)
    hm, he = K.round_dyadic(p + err, -w, prec, True)
    return Scalar(lm, le, hm, he)


# --------------------------------------------------------------------- sine
def _top(m: int, e: int) -> int:
    """Exponent of the leading bit of ``|m|*2**e`` (``-inf`` treated as huge negative)."""
    if m == 0:
        return -(1 << 30)
    return e + (m if m > 0 else -m).bit_length()


def _sin_point(m: int, e: int, prec: int) -> Scalar:
    """Enclosure of sin(m*2**e)."""
    if m == 0:
        return Scalar(0, 0, 0, 0)
    top = _top(m, e)
    extra = max(0, top) + 16
    wprec = prec + extra
    with working_precision(wprec):
        x = Scalar(m, e, m, e)
        half_pi = pi().scale2(-1)
        t = x / half_pi
        k = _dyadic_floor(t.lm, t.le)
        # nearest integer to t: refine from the floor of the lower end
        frac = t - k
        if frac.lo > Fraction(1, 2):
            k += 1
        r = x - half_pi * k
    return _reduced_sincos(r, k % 4, prec)


def _reduced_sincos(r: Scalar, quadrant: int, prec: int) -> Scalar:
    """sin(r + quadrant*pi/2) for |r| <= pi/4 + tiny."""
    w = prec + 24
    if quadrant in (0, 2):
        rl = _dyadic_floor(r.lm, r.le + w)
        rh = _dyadic_ceil(r.hm, r.he + w)
        sl, el = K.sin_fixed(rl, w)
        sh, eh = K.sin_fixed(rh, w)
        lo, hi = sl - el, sh + eh
        if quadrant == 2:
            lo, hi = -hi, -lo
    else:
        al = abs_dyadic_interval(r)
        amin, amax = al
        ah = _dyadic_ceil(amax[0], amax[1] + w)
        alo = _dyadic_floor(amin[0], amin[1] + w)
        cl, el = K.cos_fixed(ah, w)
        ch, eh = K.cos_fixed(alo, w)
        lo, hi = cl - el, ch + eh
        if quadrant == 3:
            lo, hi = -hi, -lo
    lo = max(lo, -(1 << w))
    hi = min(hi, 1 << w)
    lm, le = K.round_dyadic(lo, -w, prec, False)
    hm, he = K.round_dyadic(hi, -w, prec, True)
    return Scalar(lm, le, hm, he)


def abs_dyadic_interval(r: Scalar) -> tuple[tuple[int, int], tuple[int, int]]:
    """(min|x|, max|x|) over the interval, as dyadic pairs."""
    if r.lm >= 0:
        return (r.lm, r.le), (r.hm, r.he)
    if r.hm <= 0:
        return (-r.hm, r.he), (-r.lm, r.le)
    if K.cmp_dyadic(-r.lm, r.le, r.hm, r.he) > 0:
        return (0, 0), (-r.lm, r.le)
    return (0, 0), (r.hm, r.he)


def _sin_interval(x: Scalar) -> Scalar:
    prec = _prec.get()
    if x.is_exact():
        return _sin_point(x.lm, x.le, prec)
    if x.width() >= 7:
        return Scalar(-1, 0, 1, 0)
    top = max(_top(x.lm, x.le), _top(x.hm, x.he))
    with working_precision(prec + max(0, top) + 16):
        p = pi()
        u_lo = (x.lower() - p.scale2(-1)) / p
        u_hi = (x.upper() - p.scale2(-1)) / p
    k_first = _dyadic_ceil(u_lo.lm, u_lo.le)
    k_last = _dyadic_floor(u_hi.hm, u_hi.he)
    if k_last - k_first >= 1:
        return Scalar(-1, 0, 1, 0)
    out = _sin_point(x.lm, x.le, prec).hull(_sin_point(x.hm, x.he, prec))
    for k in range(k_first, k_last + 1):
        out = out.hull(Scalar.exact(1 if k % 2 == 0 else -1))
    return out
