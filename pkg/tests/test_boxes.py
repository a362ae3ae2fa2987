from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewbox.boxes import DomainError, GenericBox, SingularityError, beta, phi, phi_prime
from skewbox.circle import OmegaAffine, orbit_point
from skewbox.scalar import Scalar, Tri, working_precision

mpmath.mp.prec = 200
xs = st.fractions(min_value=-1, max_value=1, max_denominator=10 ** 6).filter(lambda x: x != 0)


def mp_phi(x):
    x = mpmath.mpf(x.numerator) / x.denominator
    return (1 - abs(x)) ** 2 * mpmath.sin(mpmath.pi / x)


def approx_in(s, v, slack=Fraction(1, 10 ** 40)):
    q = Fraction(mpmath.nstr(v, 60))
    return s.lo - slack <= q <= s.hi + slack


@given(xs)
def test_phi_matches_mpmath(x):
    with working_precision(192):
        assert approx_in(phi(Scalar.exact(x)), mp_phi(x))


@given(xs)
def test_phi_prime_matches_mpmath(x):
    with working_precision(192):
        d = phi_prime(Scalar.exact(x))
    ref = mpmath.diff(lambda t: (1 - abs(t)) ** 2 * mpmath.sin(mpmath.pi / t),
                      mpmath.mpf(x.numerator) / x.denominator)
    assert approx_in(d, ref, Fraction(1, 10 ** 20))


def test_phi_bound_and_zeros():
    for k in range(1, 40):
        assert phi(Scalar.exact(Fraction(1, k))).contains(0)
        assert phi(Scalar.exact(Fraction(2, 4 * k + 1))).gt(0) is Tri.TRUE
    # |phi| <= beta^2 <= beta
    x = Scalar.exact(Fraction(3, 7))
    assert abs(phi(x)).hi <= beta(x).hi


def test_domain_errors():
    with pytest.raises(SingularityError):
        phi(Scalar.exact(0))
    with pytest.raises(DomainError):
        beta(Scalar.exact(2))
    with pytest.raises(SingularityError):
        phi(Scalar.interval(-Fraction(1, 4), Fraction(1, 4)))


def make_box(ell=2, n=5):
    a = Scalar.exact(Fraction(1, 16))
    return GenericBox(ell, n, Fraction(1, 64), Fraction(1, 128), a,
                      Scalar.exact(Fraction(1, 12)), Scalar.exact(Fraction(1, 20)))


def test_box_graph_and_bounds():
    b = make_box()
    with working_precision(192):
        # inside the delta-ball the graph is a + sign * 2^-n phi(z)
        z = Fraction(1, 300)
        assert b.graph(z).overlaps(b.a + phi(Scalar.exact(z)).scale2(-5))
        # corners: graph meets the end heights, fiber degenerates
        assert b.graph(b.alpha).same_as(b.a_plus) and b.graph(-b.alpha).same_as(b.a_minus)
        assert b.bounds(b.alpha).degenerate
        # fiber at the center has length 2 * 2^-n
        assert b.bounds(0).length().contains(Fraction(2, 32))
        for k in range(1, 64):
            z = Fraction(k, 64 * 64) * (1 if k % 2 else -1)
            f = b.bounds(z)
            assert f.contains_value(b.graph(z))
    with pytest.raises(SingularityError):
        b.graph(0)
    with pytest.raises(DomainError):
        b.graph(Fraction(1, 32))


def test_box_flanges_are_affine():
    b = make_box()
    with working_precision(192):
        g0, _, _ = b.edge_values(1)
        mid = (b.delta + b.alpha) / 2
        assert b.graph(mid).overlaps((g0 + b.a_plus) * Fraction(1, 2))
        # an omega-affine offset in the flange
        z = OmegaAffine(0, mid)
        assert b.region(z) == "right"
    assert make_box(ell=3).sign == -1 and make_box(ell=-2).sign == 1
    assert make_box().center == orbit_point(2)
