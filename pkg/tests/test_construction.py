import dataclasses
import json
from fractions import Fraction

import mpmath
import pytest

from skewbox import (
    EXCLUDED,
    Angle,
    BuildConfig,
    ConstructionError,
    ConstructionState,
    HorizonLimited,
    build,
    check_conditions,
    gamma_eval,
    init_level0,
    load_state,
    orbit_point,
    save_state,
    verify_suite,
)
from skewbox.construction import _dyadic_str, state_from_doc, state_to_doc
from skewbox.scalar import Tri

# levels of the depth-6 build: (n_j, alpha_j), frozen from a reference run
# and cross-checked below with an independent float computation
LEVELS6 = [(1, Fraction(15, 128)), (5, Fraction(7, 256)), (7, Fraction(15, 2048)),
           (9, Fraction(15, 8192)), (11, Fraction(5, 16384)), (13, Fraction(13, 262144)),
           (16, Fraction(15, 1 << 20))]


def test_level_table(state6):
    assert [(lv.n, lv.alpha) for lv in state6.levels] == LEVELS6
    for lv in state6.levels:
        assert lv.delta == lv.alpha / 2
    assert state6.orbit_horizon == 24


def test_parameter_chain(state6):
    for j in range(1, state6.J + 1):
        assert state6.n(j) > state6.n(j - 1)
        assert state6.n(j) > j
        assert state6.alpha(j) < state6.delta(j - 1)
        assert Fraction(1, 1 << state6.n(j)) < state6.delta(j - 1)


def _mp(q):
    return mpmath.mpf(q.numerator) / q.denominator


def test_separation_independent(state6):
    # mpmath recomputation of the separation conditions at each level j >= 1:
    # the balls around j*, (j+1)*, -j* (winged) and -(j+1)* are disjoint,
    # and the j-ball misses every other orbit point with |i| <= j+1
    mpmath.mp.prec = 200
    w = (mpmath.sqrt(5) - 1) / 2

    def dist(a, b):
        d = (a - b) * w % 1
        return min(d, 1 - d)

    for j in range(1, state6.J + 1):
        aj, aj1 = _mp(state6.alpha(j)), _mp(state6.alpha(j - 1))
        four = [(j, aj), (j + 1, aj), (-j, aj1), (-(j + 1), aj)]
        for x in range(4):
            for y in range(x + 1, 4):
                (p, r), (q, s) = four[x], four[y]
                assert dist(p, q) > r + s, (j, p, q)
        for i in range(-(j + 1), j + 2):
            if i != j:
                assert dist(i, j) > aj, (j, i)


def test_conditions_all_true(state6):
    for j in range(state6.J + 1):
        rep = check_conditions(state6, j)
        assert rep.ok, rep.first_failure()
        assert rep.min_margin().lo > Fraction(1, 1 << 50)
        assert {c.name.split(".")[0].split("[")[0] for c in rep.clauses} >= (
            {"R1", "R2", "R6"} if j == 0 else {"R1", "R2", "R3", "R4", "R5", "R6"})


def _scaled(state: ConstructionState, j: int, factor: int) -> ConstructionState:
    lv = state.levels[j]
    a = lv.alpha * factor
    boxes = {ell: dataclasses.replace(b, alpha=a, delta=a / 2) for ell, b in lv.boxes.items()}
    new = dataclasses.replace(lv, alpha=a, delta=a / 2, boxes=boxes)
    levels = list(state.levels)
    levels[j] = new
    return ConstructionState(levels[: j + 1], state.orbit_horizon, state.precision_bits)


@pytest.mark.parametrize("j", [1, 3])
def test_doubled_radius_breaks_a_clause(state4, j):
    rep = check_conditions(_scaled(state4, j, 4), j)
    bad = rep.first_failure()
    assert bad is not None and bad.status is Tri.FALSE


def test_root_level():
    st = init_level0(BuildConfig(depth=0))
    assert st.J == 0 and st.n(0) == 1
    b = st.box(0)
    assert b.a.lo == b.a.hi == 0 and b.a_plus.lo == 0 and b.a_minus.hi == 0


def test_gamma_level0_range():
    st = init_level0(BuildConfig(depth=0))
    for k in range(1, 2000):
        v = st.gamma(0, Angle(0, Fraction(k, 2000))).value
        assert -Fraction(1, 2) <= v.lo and v.hi <= Fraction(1, 2)


def test_gamma_levels(state6):
    c = orbit_point(3)
    cv = gamma_eval(state6, 3, c)
    assert cv.status == EXCLUDED
    assert cv.value.width() >= Fraction(2, 1 << state6.n(3))
    assert gamma_eval(state6, -1, c).value.lo == 0
    with pytest.raises(ValueError):
        gamma_eval(state6, -2, c)
    with pytest.raises(HorizonLimited):
        state6.gamma(7, c)
    # outside every box the curve is zero
    th = Angle(0, Fraction(1, 2))
    assert state6.active_box(6, th) is None or state6.gamma(6, th).value.hi <= 1


def test_gamma_limit(state6):
    th = Angle(0, Fraction(1, 3))
    cv = state6.gamma_limit(th, Fraction(1, 1 << 20))
    assert cv.value.width() <= Fraction(1, 1 << 20)
    assert -1 <= cv.value.lo and cv.value.hi <= 1
    assert state6.gamma_limit(orbit_point(2)).status == EXCLUDED
    with pytest.raises(ValueError):
        state6.gamma_limit(th, 0)


def test_build_deterministic():
    a = state_to_doc(build(BuildConfig(depth=3)))
    b = state_to_doc(build(BuildConfig(depth=3)))
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_state_roundtrip(tmp_path, state4):
    p = tmp_path / "s.json"
    save_state(state4, str(p))
    st = load_state(str(p))
    assert state_to_doc(st) == state_to_doc(state4)
    th = Angle(2, Fraction(1, 1 << 12))
    assert st.gamma(4, th).value.same_as(state4.gamma(4, th).value)


def test_tampered_state_fails_recertification(state4):
    doc = state_to_doc(state4)
    doc["levels"][2]["alpha"] = doc["levels"][1]["alpha"]
    doc["levels"][2]["delta"] = doc["levels"][1]["delta"]
    with pytest.raises(ConstructionError) as ei:
        state_from_doc(doc)
    assert ei.value.j == 2 and ei.value.clause


def test_bad_omega_tag(state2):
    doc = state_to_doc(state2)
    doc["omega_tag"] = "silver"
    with pytest.raises(ValueError):
        state_from_doc(doc)


def test_dyadic_str():
    assert _dyadic_str(Fraction(-3, 8)) == "-0.375"
    assert _dyadic_str(Fraction(5)) == "5"
    assert Fraction(_dyadic_str(Fraction(12345, 1 << 40))) == Fraction(12345, 1 << 40)
    with pytest.raises(ValueError):
        _dyadic_str(Fraction(1, 3))


def test_search_budget_exhausted():
    with pytest.raises(ConstructionError) as ei:
        build(BuildConfig(depth=2, ladder_steps=1, n_steps=1))
    assert ei.value.clause != "none"


def test_root_only_state_verifies():
    st = init_level0(BuildConfig(depth=0))
    rep = verify_suite(st, "construction", 50)
    assert rep.ok
    assert "skipped" in rep.record("construction.strata").note
