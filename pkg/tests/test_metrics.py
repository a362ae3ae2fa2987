from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewbox import Angle, DomainError, Scalar, dinf_sampled, hausdorff_sampled
from skewbox.circle import cyl_distance
from skewbox.construction import pseudo_curve_sample

pts = st.lists(st.tuples(st.integers(0, 1023), st.integers(-64, 64)), min_size=1, max_size=25)


def as_points(raw):
    return [(Angle(0, Fraction(a, 1024)), Scalar.exact(Fraction(y, 64))) for a, y in raw]


def brute(A, B):
    def d(p, q):
        return cyl_distance(p, q).mid()
    ab = max(min(d(p, q) for q in B) for p in A)
    ba = max(min(d(q, p) for p in A) for q in B)
    return max(ab, ba)


@settings(max_examples=80, deadline=None)
@given(pts, pts)
def test_hausdorff_matches_brute_force(ra, rb):
    A, B = as_points(ra), as_points(rb)
    h = hausdorff_sampled(A, B)
    assert h.lower.lo - Fraction(1, 10 ** 15) <= brute(A, B) <= h.lower.hi + Fraction(1, 10 ** 15)


@settings(max_examples=40, deadline=None)
@given(pts, pts)
def test_hausdorff_symmetric(ra, rb):
    A, B = as_points(ra), as_points(rb)
    assert hausdorff_sampled(A, B).lower.overlaps(hausdorff_sampled(B, A).lower)


def test_hausdorff_identity_and_empty():
    A = as_points([(1, 2), (500, -3), (1000, 64)])
    assert hausdorff_sampled(A, A).lower.same_as(Scalar.exact(0))
    with pytest.raises(DomainError):
        hausdorff_sampled([], A)


def test_dinf_bounds(state4):
    for j in range(1, 5):
        est = dinf_sampled(state4, j - 1, j, 256, upper_reference=Fraction(1, 1 << j))
        assert not est.violates_reference
        assert est.lower.lo >= 0 and est.sample_count > 0
    assert dinf_sampled(state4, 2, 2, 64).lower.same_as(Scalar.exact(0))
    with pytest.raises(ValueError):
        dinf_sampled(state4, 0, 9, 16)


def test_hausdorff_below_dinf(state4):
    for j in (1, 3):
        a, _ = pseudo_curve_sample(state4, j - 1, 256)
        b, _ = pseudo_curve_sample(state4, j, 256)
        h = hausdorff_sampled(a, b)
        d = dinf_sampled(state4, j - 1, j, 256, include_targeted=False)
        assert h.lower.lo <= d.lower.hi
