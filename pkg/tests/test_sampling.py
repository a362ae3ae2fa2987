from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from skewbox.circle import ball, orbit_point
from skewbox.sampling import (
    box_loci,
    dedupe,
    inside_arc,
    random_angles,
    resolvable,
    sine_extrema,
    stratified,
    targeted,
    uniform_grid,
)


def test_grid_and_random_deterministic():
    assert len(uniform_grid(64)) == 64
    assert random_angles(10, 3) == random_angles(10, 3)
    assert random_angles(10, 3) != random_angles(10, 4)


@given(st.fractions(min_value=Fraction(1, 1 << 30), max_value=Fraction(1, 4)), st.integers(1, 20))
def test_sine_extrema(delta, count):
    offs = sine_extrema(delta, count)
    assert len(offs) == count
    for z in offs:
        assert 0 < z <= delta
        # pi/z is an odd multiple of pi/2: sin(pi/z) = +-1
        assert ((1 / z) * 2) % 2 == 1
    assert offs == sorted(offs, reverse=True)


def test_inside_arc(state4):
    c = orbit_point(3)
    r = state4.alpha(3)
    arc = ball(c, r)
    pts = inside_arc(c, r, 200, 1)
    assert len(pts) == 200 and all(arc.contains(s.theta) for s in pts)


def test_loci_and_stratified(state4):
    loc = box_loci(state4, -2)
    arc = ball(orbit_point(-2), state4.wradius(-2))
    assert loc and all(arc.contains(s.theta) for s in loc)
    assert len(targeted(state4)) > 9
    s = stratified(state4, 200, 0)
    assert len(s) <= 200 and len(s) == len(dedupe(s))
    tags = {x.tag for x in s}
    assert "grid" in tags and "random" in tags
    assert sum(x.tag not in ("grid", "random") for x in s) <= 100
    assert stratified(state4, 200, 0) == s


def test_resolvable_drops_orbit(state4):
    out = list(resolvable(state4, [type(uniform_grid(1)[0])(orbit_point(2), "orbit")] + uniform_grid(16)))
    assert all(x.theta.q != 0 or x.theta.k == 0 for x in out)
    assert all(state4.horizon_clear(x.theta) for x in out)
