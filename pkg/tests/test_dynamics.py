import dataclasses
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewbox import Angle, HorizonLimited, Scalar, apply_T, f_limit, fiber_map, fm, g, orbit_point, verify_suite
from skewbox.construction import CERTIFIED, ConstructionState
from skewbox.dynamics import g_knots, kappa_offset, knot_sup_distance
from skewbox.boxes import DomainError
from skewbox.circle import OmegaAffine

angles = st.builds(lambda k: Angle(0, Fraction(k, 1 << 24)), st.integers(0, (1 << 24) - 1))
TOL = Fraction(1, 1 << 40)


@settings(max_examples=60, deadline=None)
@given(angles, st.integers(0, 4))
def test_endpoints_pinned(state4, th, m):
    assert fm(state4, m, th, -2).value.same_as(Scalar.exact(2))
    assert fm(state4, m, th, 2).value.same_as(Scalar.exact(-2))
    assert fm(state4, m, th, 2).status == CERTIFIED


@settings(max_examples=60, deadline=None)
@given(angles, st.integers(0, 4))
def test_fiber_maps_monotone(state4, th, m):
    spec = fiber_map(state4, m, th)
    if not spec.resolved:
        return
    ks = spec.knots
    assert ks[0][0].same_as(Scalar.exact(-2)) and ks[-1][0].same_as(Scalar.exact(2))
    for (x0, y0), (x1, y1) in zip(ks, ks[1:]):
        assert x0.certainly_lt(x1)
        # non-increasing up to the (tiny) enclosure widths
        assert y1.lo <= y0.hi
        assert y0.width() <= TOL and y1.width() <= TOL
    for x in (Fraction(-3, 2), Fraction(0), Fraction(1, 3)):
        v = spec(Scalar.exact(x))
        assert -2 <= v.lo and v.hi <= 2


def test_conjugation_against_mpmath(state4):
    # over B(i*, delta_{i+1}), i >= 0: g_i(gamma_i) is the next box graph,
    # a_{i+1} + s_{i+1} 2^-n_{i+1} phi(z); the right side is computed with mpmath
    mpmath.mp.prec = 200
    for i in range(0, 3):
        nb = state4.box(i + 1)
        for t in range(1, 20):
            z = nb.delta * Fraction(t, 20) * (1 if t % 2 else -1)
            th = orbit_point(i).shift(z)
            y = g(state4, i, th, state4.gamma_value(i, th))
            zz = mpmath.mpf(z.numerator) / z.denominator
            ref = (1 - abs(zz)) ** 2 * mpmath.sin(mpmath.pi / zz) * nb.sign / mpmath.mpf(2) ** nb.n
            ref += mpmath.mpf(nb.a.mid().numerator) / nb.a.mid().denominator
            assert abs(Fraction(mpmath.nstr(ref, 50)) - y.mid()) < Fraction(1, 10 ** 40)
            assert y.width() <= TOL


def test_conjugation_negative_boxes(state4):
    for i in range(-4, 0):
        r = state4.wradius(i)
        for t in range(1, 40):
            z = r * Fraction(t, 40) * (1 if t % 3 else -1)
            th = orbit_point(i).shift(z)
            y = g(state4, i, th, state4.gamma_value(abs(i), th))
            assert y.overlaps(state4.gamma_value(abs(i + 1), th.rotate()))


def test_g_domain(state4):
    with pytest.raises(DomainError):
        g_knots(state4, 1, orbit_point(1).shift(Fraction(1, 4)))
    with pytest.raises(HorizonLimited):
        g_knots(state4, 4, orbit_point(4).shift(state4.alpha(4) / 3))


def test_kappa_range(state4):
    for i in (-1, -2, -3):
        b = state4.box(i)
        assert kappa_offset(state4, i, OmegaAffine(0, b.delta)).same_as(Scalar.exact(1))
        prev = Fraction(1)
        for t in range(1, 9):
            u = b.delta + (b.alpha - b.delta) * Fraction(t, 9)
            k = kappa_offset(state4, i, OmegaAffine(0, u))
            assert 0 < k.lo and k.hi <= 1
            # running infimum: non-increasing away from the delta edge
            assert k.lo <= prev
            prev = k.hi


@settings(max_examples=40, deadline=None)
@given(angles, st.sampled_from([Fraction(2), Fraction(-2)]))
def test_boundary_circles_swapped(state4, th, x):
    t2, v = apply_T(state4, 4, (th, Scalar.exact(x)))
    assert t2 == th.rotate()
    assert v.value.same_as(Scalar.exact(-x))
    assert f_limit(state4, th, x).value.same_as(Scalar.exact(-x))


def test_f_limit(state4):
    th = Angle(0, Fraction(1, 7))
    mv = f_limit(state4, th, Fraction(1, 5), Fraction(1, 1 << 10))
    assert -2 <= mv.value.lo and mv.value.hi <= 2
    assert mv.value.width() <= Fraction(1, 1 << 9)


def test_knot_sup_distance(state4):
    th = orbit_point(1).shift(state4.alpha(1) / 3)
    f1, f0 = fiber_map(state4, 1, th), fiber_map(state4, 0, th)
    d = knot_sup_distance(f1, f0)
    assert d.lo >= 0
    assert knot_sup_distance(f1, f1).hi <= TOL
    bad = fiber_map(state4, 1, orbit_point(4).shift(state4.alpha(4) / 3))
    if not bad.resolved:
        with pytest.raises(HorizonLimited):
            knot_sup_distance(bad, f0)


def test_fm_domain(state4):
    with pytest.raises(DomainError):
        fm(state4, 1, Angle(0, 0), 3)
    with pytest.raises(ValueError):
        fiber_map(state4, -1, Angle(0, 0))


def _tampered(state, ell, eps):
    levels = list(state.levels)
    lv = levels[abs(ell)]
    boxes = dict(lv.boxes)
    boxes[ell] = dataclasses.replace(boxes[ell], a=boxes[ell].a + Scalar.exact(eps))
    levels[abs(ell)] = dataclasses.replace(lv, boxes=boxes)
    return ConstructionState(levels, state.orbit_horizon, state.precision_bits)


def test_tampered_a_value_is_caught(state4):
    # the conjugation identity holds for any a-values (box maps are built from
    # the same box graphs), so the tamper shows up as a broken height clause
    st = _tampered(state4, 2, Fraction(1, 1 << 30))
    rep = verify_suite(st, "all", 30)
    assert not rep.ok
    rec = rep.record("construction.a-values")
    assert rec.status == "fail" and rec.witness
    assert rep.record("dynamics.conjugation").status == "pass"
