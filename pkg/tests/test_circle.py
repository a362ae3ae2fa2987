import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewbox.circle import (
    Angle,
    OmegaAffine,
    arc_inside,
    arcs_disjoint,
    ball,
    certified_disjoint,
    circle_distance,
    cyl_distance,
    directed_distance,
    omega,
    orbit_point,
)
from skewbox.scalar import Scalar, Tri

angles = st.builds(Angle, st.integers(-60, 60), st.fractions(0, 1, max_denominator=1 << 20))


def fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_omega_against_fibonacci_ratios():
    # F(n)/F(n+1) converge to omega from alternating sides
    for bits in (10, 60, 200):
        w = omega(bits)
        assert w.width() <= Fraction(1, 1 << bits)
        for n in range(2, 400, 7):
            lo, hi = sorted((Fraction(fib(n), fib(n + 1)), Fraction(fib(n + 1), fib(n + 2))))
            assert w.overlaps(Scalar.interval(lo, hi))


def test_omega_is_root_and_nested():
    w = omega(300)
    # omega^2 + omega - 1 = 0
    assert (w * w + w - 1).contains(0)
    assert omega(300).lo >= omega(100).lo and omega(300).hi <= omega(100).hi
    import mpmath
    mpmath.mp.prec = 400
    ref = Fraction(mpmath.nstr((mpmath.sqrt(5) - 1) / 2, 110))
    assert w.lo - Fraction(1, 10 ** 100) <= ref <= w.hi + Fraction(1, 10 ** 100)


def test_diophantine_bound_on_golden_rotation():
    # ||N omega|| > 1/(3N) for 1 <= N <= 10^5, exactly: compare N*omega with
    # the nearest integer using an enclosure much narrower than 1/(3N)
    w = omega(80)
    for N in range(1, 100001):
        x = w * N
        p = math.floor(float(x.mid()) + 0.5)
        d = abs(x - p)
        assert d.lo > Fraction(1, 3 * N), N


@given(angles)
def test_angle_canonical(t):
    assert 0 <= t.q < 1
    assert Angle(t.k, t.q + 3) == t
    assert hash(Angle(t.k, t.q - 2)) == hash(t)


@given(angles, angles)
def test_offset_and_distance(a, b):
    z = a.offset_from(b)
    assert z.cmp(Fraction(-1, 2)) > 0 and z.cmp(Fraction(1, 2)) <= 0
    assert b.shift(z) == a
    d = circle_distance(a, b)
    assert d == circle_distance(b, a)
    assert d.cmp(0) >= 0 and d.cmp(Fraction(1, 2)) <= 0
    dd = directed_distance(a, b)
    assert a.shift(dd) == b


def test_orbit_point_rotation():
    assert orbit_point(3).rotate(2) == orbit_point(5)
    assert orbit_point(-1).rotate() == Angle(0, 0)
    assert float(orbit_point(1)) == pytest.approx((math.sqrt(5) - 1) / 2)
    assert orbit_point(-2).label() == "-2*"
    assert Angle(5, Fraction(1, 4)).label() == "5*+1/4"


def test_balls():
    c = orbit_point(4)
    b = ball(c, Fraction(1, 100))
    assert b.contains(c.shift(Fraction(1, 100)))
    assert not b.opened().contains(c.shift(Fraction(1, 100)))
    assert not b.contains(c.shift(Fraction(101, 10000)))
    ok, gap = arcs_disjoint(b, ball(orbit_point(5), Fraction(1, 100)))
    assert ok and gap.sign() > 0
    ok, _ = arc_inside(ball(c, Fraction(1, 200)), b, strict=True)
    assert ok
    ok, margin = certified_disjoint([ball(orbit_point(i), Fraction(1, 1000)) for i in range(-5, 6)])
    assert ok is Tri.TRUE and margin.lo > 0
    with pytest.raises(ValueError):
        ball(c, Fraction(1, 2))


def test_wraparound_ball():
    b = ball(Angle(0, 0), Fraction(1, 10))
    assert b.contains(Angle(0, Fraction(95, 100)))
    assert b.contains(Angle(0, Fraction(5, 100)))
    assert not b.contains(Angle(0, Fraction(1, 2)))


def test_cyl_distance():
    p = (Angle(0, Fraction(1, 10)), Scalar.exact(0))
    q = (Angle(0, Fraction(9, 10)), Scalar.exact(Fraction(1, 8)))
    d = cyl_distance(p, q)
    assert d.contains(Fraction(1, 5))
    with pytest.raises(ValueError):
        cyl_distance(p, (Angle(0, 0), Scalar.exact(3)))


def test_omega_affine_sign_exact():
    # 3*omega - 2 < 0 < 5*omega - 3 (omega = 0.618...)
    assert OmegaAffine(3, -2).sign() == -1
    assert OmegaAffine(5, -3).sign() == 1
    assert OmegaAffine(0, 0).sign() == 0
