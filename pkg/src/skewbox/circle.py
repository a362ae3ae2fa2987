"""Exact geometry on the circle for the golden rotation.

Every angle that the construction touches is an orbit point shifted by a
rational: ``k*omega + q (mod 1)`` with ``omega = (sqrt(5) - 1)/2``.  Such numbers
are stored exactly as the pair ``(k, q)``.  Because ``omega`` is irrational,
``k*omega + q`` vanishes only when ``k == 0`` and ``q == 0``, so every sign
question (and therefore every arc membership or disjointness question) is
decidable: we refine a certified enclosure of ``omega`` until the sign shows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .scalar import Scalar, Tri, working_precision

Rational = Union[int, Fraction]

OMEGA_TAG = "golden"
OMEGA_FLOAT = (math.sqrt(5.0) - 1.0) / 2.0


# --------------------------------------------------------------------- omega
@lru_cache(maxsize=None)
def _fib_bracket(bits: int) -> tuple[Fraction, Fraction]:
    """Consecutive Fibonacci convergents bracketing omega, gap <= 2**-bits."""
    a, b = 1, 1  # F(n), F(n+1)
    target = Fraction(1, 1 << bits)
    while True:
        c = a + b
        # F(n)/F(n+1) and F(n+1)/F(n+2) lie on opposite sides of omega
        # and differ by exactly 1/(F(n+1) F(n+2))
        if Fraction(1, b * c) <= target:
            x, y = Fraction(a, b), Fraction(b, c)
            return (x, y) if x < y else (y, x)
        a, b = b, c


@lru_cache(maxsize=None)
def omega(precision_bits: int) -> Scalar:
    """Enclosure of (sqrt(5)-1)/2 of width at most ``2**-precision_bits``.

    Enclosures are nested: a higher precision gives a sub-interval.
    """
    if precision_bits < 1:
        raise ValueError("precision_bits must be >= 1")
    lo, hi = _fib_bracket(precision_bits + 2)
    with working_precision(precision_bits + 8):
        out = Scalar.interval(lo, hi)
    if precision_bits > 1:
        out = out.intersect(omega(precision_bits - 1))
    return out


# ------------------------------------------------------------ exact numbers
class OmegaAffine:
    """The real number ``k*omega + q`` (not reduced mod 1)."""

    __slots__ = ("k", "q")

    def __init__(self, k: int, q: Rational = 0):
        self.k = int(k)
        self.q = Fraction(q)

    def __add__(self, other: Union["OmegaAffine", Rational]) -> "OmegaAffine":
        if isinstance(other, OmegaAffine):
            return OmegaAffine(self.k + other.k, self.q + other.q)
        return OmegaAffine(self.k, self.q + Fraction(other))

    __radd__ = __add__

    def __neg__(self) -> "OmegaAffine":
        return OmegaAffine(-self.k, -self.q)

    def __sub__(self, other: Union["OmegaAffine", Rational]) -> "OmegaAffine":
        return self + (-other if isinstance(other, OmegaAffine) else -Fraction(other))

    def __rsub__(self, other: Rational) -> "OmegaAffine":
        return (-self) + other

    def __eq__(self, other: object) -> bool:
        if isinstance(other, OmegaAffine):
            return self.k == other.k and self.q == other.q
        if isinstance(other, (int, Fraction)):
            return self.k == 0 and self.q == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.k, self.q))

    def __repr__(self) -> str:
        return f"OmegaAffine({self.k}, {self.q})"

    def is_rational(self) -> bool:
        return self.k == 0

    def enclosure(self, bits: int = 0) -> Scalar:
        """Enclosure of the value; ``bits`` sets the omega width (default: working precision)."""
        if self.k == 0:
            return Scalar.exact(self.q)
        from .scalar import get_precision

        b = bits or get_precision()
        b += abs(self.k).bit_length() + 2
        return omega(b) * self.k + self.q

    def sign(self) -> int:
        if self.k == 0:
            return (self.q > 0) - (self.q < 0)
        approx = self.k * OMEGA_FLOAT + float(self.q)
        tol = 1e-12 * (abs(self.k) + abs(float(self.q)) + 1.0)
        if abs(approx) > tol:
            return 1 if approx > 0 else -1
        bits = 96
        while True:
            e = self.enclosure(bits)
            if e.excludes_zero():
                return e.sign()
            bits *= 2

    def floor(self) -> int:
        if self.k == 0:
            return math.floor(self.q)
        guess = math.floor(self.k * OMEGA_FLOAT + float(self.q))
        for c in (guess, guess - 1, guess + 1):
            if (self - c).sign() >= 0 and (self - (c + 1)).sign() < 0:
                return c
        bits = 96
        while True:  # pragma: no cover - float guess is off by more than 1
            e = self.enclosure(bits)
            lo, hi = math.floor(e.lo), math.floor(e.hi)
            if lo == hi:
                return lo
            bits *= 2

    def cmp(self, other: Union["OmegaAffine", Rational]) -> int:
        return (self - other).sign()

    def __lt__(self, other) -> bool:
        return self.cmp(other) < 0

    def __le__(self, other) -> bool:
        return self.cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self.cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self.cmp(other) >= 0

    def __abs__(self) -> "OmegaAffine":
        return -self if self.sign() < 0 else self

    def __float__(self) -> float:
        return self.k * OMEGA_FLOAT + float(self.q)


# --------------------------------------------------------------------- angles
class Angle:
    """A point of the circle R/Z stored exactly as ``k*omega + q`` mod 1.

    The representation is canonical (``0 <= q < 1``), so equality is exact.
    """

    __slots__ = ("k", "q", "_hash")

    def __init__(self, k: int = 0, q: Rational = 0):
        q = Fraction(q)
        self.k = int(k)
        self.q = q - math.floor(q)
        self._hash = hash((self.k, self.q))

    @staticmethod
    def of(x: Union["Angle", Rational]) -> "Angle":
        if isinstance(x, Angle):
            return x
        return Angle(0, x)

    def key(self) -> tuple[int, Fraction]:
        return (self.k, self.q)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Angle) and self.k == other.k and self.q == other.q

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if self.k == 0:
            return f"Angle({self.q})"
        return f"Angle({self.k}*w + {self.q})"

    def label(self) -> str:
        if self.k == 0:
            return str(self.q)
        return f"{self.k}*"+ (f"+{self.q}" if self.q else "")

    def shift(self, t: Union[OmegaAffine, Rational]) -> "Angle":
        if isinstance(t, OmegaAffine):
            return Angle(self.k + t.k, self.q + t.q)
        return Angle(self.k, self.q + Fraction(t))

    def rotate(self, times: int = 1) -> "Angle":
        """The rotation by ``omega`` applied ``times`` times."""
        return Angle(self.k + times, self.q)

    def lift(self) -> OmegaAffine:
        """Representative in [0, 1)."""
        v = OmegaAffine(self.k, self.q)
        return v - v.floor()

    def lift_near(self, ref: OmegaAffine) -> OmegaAffine:
        """Representative in ``(ref - 1/2, ref + 1/2]``."""
        v = OmegaAffine(self.k, self.q)
        d = v - ref
        n = (d + Fraction(1, 2)).floor()
        out = v - n
        if (out - ref).cmp(Fraction(-1, 2)) <= 0:
            out = out + 1
        return out

    def offset_from(self, c: "Angle") -> OmegaAffine:
        """Signed offset ``self - c`` reduced into ``(-1/2, 1/2]``."""
        d = OmegaAffine(self.k - c.k, self.q - c.q)
        n = (d + Fraction(1, 2)).floor()
        out = d - n
        if out.cmp(Fraction(-1, 2)) <= 0:
            out = out + 1
        return out

    def enclosure(self, max_width: Rational = 0) -> Scalar:
        """Enclosure of the representative in [0, 1)."""
        bits = 64
        if max_width:
            bits = max(8, -math.floor(math.log2(Fraction(max_width))) + 2)
        v = self.lift()
        if v.k == 0:
            return Scalar.exact(v.q)
        with working_precision(max(bits + 16, 64)):
            return v.enclosure(bits)

    def __float__(self) -> float:
        return float(self.lift())


def orbit_point(ell: int) -> Angle:
    """The orbit point ``ell* = ell*omega mod 1``."""
    return Angle(ell, 0)


def orbit_enclosure(ell: int, max_width: Rational) -> Scalar:
    if Fraction(max_width) <= 0:
        raise ValueError("max_width must be positive")
    return orbit_point(ell).enclosure(max_width)


def directed_distance(a: Angle, b: Angle) -> OmegaAffine:
    """Length of the arc from ``a`` to ``b`` in the positive direction, in [0, 1)."""
    d = OmegaAffine(b.k - a.k, b.q - a.q)
    return d - d.floor()


def arc_distance(a: Angle, b: Angle, bits: int = 64) -> Scalar:
    """Enclosure of the directed arc distance from ``a`` to ``b``."""
    v = directed_distance(a, b)
    if v.k == 0:
        return Scalar.exact(v.q)
    with working_precision(bits + 16):
        return v.enclosure(bits)


def circle_distance(a: Angle, b: Angle) -> OmegaAffine:
    """Symmetric distance on the circle, in [0, 1/2]."""
    d = directed_distance(a, b)
    return d if d.cmp(Fraction(1, 2)) <= 0 else 1 - d


# --------------------------------------------------------------------- arcs
@dataclass(frozen=True)
class Arc:
    """Arc from ``start`` of exact length ``length`` in [0, 1), positive direction."""

    start: Angle
    length: OmegaAffine
    closed_start: bool = True
    closed_end: bool = True

    @property
    def end(self) -> Angle:
        return self.start.shift(self.length)

    def contains(self, t: Angle) -> bool:
        d = directed_distance(self.start, t)
        if d == 0:
            return self.closed_start or (self.length == 0 and self.closed_end)
        c = d.cmp(self.length)
        if c < 0:
            return True
        if c == 0:
            return self.closed_end
        return False

    def interior_contains(self, t: Angle) -> bool:
        d = directed_distance(self.start, t)
        return d.sign() > 0 and d.cmp(self.length) < 0

    def boundary(self) -> tuple[Angle, Angle]:
        return self.start, self.end

    def closed(self) -> "Arc":
        return Arc(self.start, self.length)

    def opened(self) -> "Arc":
        return Arc(self.start, self.length, False, False)


def arc(a: Angle, b: Angle) -> Arc:
    """Closed arc from ``a`` to ``b`` in the natural (positive) direction."""
    return Arc(a, directed_distance(a, b))


def ball(c: Angle, r: Rational, closed: bool = True) -> Arc:
    """The ball of radius ``r`` (< 1/2) around ``c``."""
    r = Fraction(r)
    if not 0 <= r < Fraction(1, 2):
        raise ValueError("ball radius must lie in [0, 1/2)")
    return Arc(c.shift(-r), OmegaAffine(0, 2 * r), closed, closed)


def arcs_disjoint(a: Arc, b: Arc) -> tuple[bool, OmegaAffine]:
    """Exact disjointness of two closed arcs, with the smaller of the two gaps.

    The returned gap is positive exactly when the arcs are disjoint; when they
    meet it is minus the overlap measured from the nearer end.
    """
    g1 = directed_distance(a.end, b.start)
    g2 = directed_distance(b.end, a.start)
    # b.start in a, or a.start in b, means they meet
    meet = a.contains(b.start) or b.contains(a.start)
    if meet:
        return False, OmegaAffine(0, 0) - _overlap_depth(a, b)
    return True, g1 if g1.cmp(g2) <= 0 else g2


def _overlap_depth(a: Arc, b: Arc) -> OmegaAffine:
    d1 = directed_distance(a.start, b.start)
    if d1.cmp(a.length) <= 0:
        return a.length - d1
    d2 = directed_distance(b.start, a.start)
    return b.length - d2


def certified_disjoint(arcs: Sequence[Arc]) -> tuple[Tri, Scalar]:
    """Pairwise disjointness with the smallest gap as margin.

    Exact arc endpoints make the answer always decided; the enclosure of the
    margin is still reported as a :class:`Scalar`.
    """
    best: OmegaAffine | None = None
    ok = True
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            d, g = arcs_disjoint(arcs[i], arcs[j])
            ok = ok and d
            if best is None or g.cmp(best) < 0:
                best = g
    if best is None:
        return Tri.TRUE, Scalar.exact(1)
    with working_precision(96):
        return Tri.of(ok), best.enclosure(80)


def arc_inside(inner: Arc, outer: Arc, strict: bool = False) -> tuple[bool, OmegaAffine]:
    """Is ``inner`` (closed) inside ``outer``; ``strict`` asks for the open ``outer``.

    Returns the containment flag and the smaller end clearance.
    """
    d0 = directed_distance(outer.start, inner.start)
    if d0.cmp(outer.length) > 0:
        return False, OmegaAffine(0, 0) - (1 - d0)
    right = outer.length - d0 - inner.length
    clearance = d0 if d0.cmp(right) <= 0 else right
    if strict:
        return clearance.sign() > 0, clearance
    return clearance.sign() >= 0, clearance


def points_outside(points: Iterable[Angle], a: Arc) -> tuple[bool, OmegaAffine | None]:
    """All points outside the closed arc, with the smallest distance to it."""
    best: OmegaAffine | None = None
    ok = True
    for p in points:
        if a.contains(p):
            ok = False
            g = OmegaAffine(0, 0)
        else:
            g1 = directed_distance(a.end, p)
            g2 = directed_distance(p, a.start)
            g = g1 if g1.cmp(g2) <= 0 else g2
        if best is None or g.cmp(best) < 0:
            best = g
    return ok, best


def cyl_distance(p: tuple[Angle, Scalar], q: tuple[Angle, Scalar]) -> Scalar:
    """Enclosure of ``max(d(theta, nu), |x - y|)`` on the cylinder."""
    for _, x in (p, q):
        if not (x.ge(-2) is Tri.TRUE and x.le_(2) is Tri.TRUE):
            raise ValueError("fiber coordinate outside [-2, 2]")
    with working_precision(96):
        d = circle_distance(p[0], q[0]).enclosure(80)
    v = abs(p[1] - q[1])
    from .scalar import smax

    return smax(d, v)
