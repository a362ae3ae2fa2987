"""The ten acceptance criteria at depth 6, orbit horizon 24, 10^3 samples per check.

Each test prints (and logs for the terminal summary) a single
``criterion N: PASS|FAIL`` line.
"""

from contextlib import contextmanager
from fractions import Fraction

import pytest

from skewbox import BuildConfig, Scalar, build, check_conditions, dinf_sampled, fm, orbit_point
from skewbox.sampling import random_angles, resolvable
from skewbox.strata import depth_class
from skewbox.verify import PASS, verify_suite

pytestmark = pytest.mark.slow

DEPTH, HORIZON, BUDGET = 6, 24, 1000
TOL = Fraction(1, 1 << 40)
EXACT_TOL = Fraction(1, 1 << 50)


@pytest.fixture(scope="module")
def state():
    return build(BuildConfig(depth=DEPTH, orbit_horizon=HORIZON))


@pytest.fixture(scope="module")
def reports(state):
    return {s: verify_suite(state, s, BUDGET, seed=0) for s in ("construction", "curve", "dynamics")}


@contextmanager
def criterion(log, n, title):
    info = []
    try:
        yield info
    except BaseException:
        line = f"criterion {n:2d}: FAIL  {title}"
        log[n] = line
        print(line)
        raise
    line = f"criterion {n:2d}: PASS  {title}" + (f"  ({'; '.join(info)})" if info else "")
    log[n] = line
    print(line)


def passed(rep, check_id, info, min_samples=0):
    r = rep.record(check_id)
    assert r.status == PASS, (r.check_id, r.witness, r.note)
    assert r.samples >= min_samples, (r.check_id, r.samples)
    info.append(f"{check_id} n={r.samples}" + (f" [{r.note}]" if r.note else ""))
    return r


def test_criterion_01_construction_soundness(state, acceptance_log):
    with criterion(acceptance_log, 1, "all generator clauses TRUE with margins > 2^-50") as info:
        assert state.J == DEPTH and state.orbit_horizon == HORIZON
        worst = None
        for j in range(DEPTH + 1):
            rep = check_conditions(state, j)
            assert rep.ok, (j, rep.first_failure())
            m = rep.min_margin().lo
            assert m > EXACT_TOL, (j, m)
            worst = m if worst is None else min(worst, m)
        info.append(f"min margin {float(worst):.3e}")


def test_criterion_02_curve_cauchy(state, reports, acceptance_log):
    with criterion(acceptance_log, 2, "sup |gamma_(j-1) - gamma_j| <= 2^-j for j = 1..6") as info:
        passed(reports["curve"], "curve.cauchy", info, DEPTH * BUDGET // 2)
        for j in range(1, DEPTH + 1):
            est = dinf_sampled(state, j - 1, j, BUDGET)
            assert est.lower.width() <= TOL
            assert est.lower.hi <= Fraction(1, 1 << j) + TOL, (j, float(est.lower.hi))
            info.append(f"j={j} {float(est.lower.hi):.3e}")


def test_criterion_03_box_diameters(state, reports, acceptance_log):
    with criterion(acceptance_log, 3, "fiber lengths 2 * 2^-n and winged diameter bounds") as info:
        passed(reports["construction"], "construction.fiber-length", info, 2 * DEPTH + 1)
        passed(reports["construction"], "construction.winged-diameter", info, 2 * DEPTH + 1)
        for ell in range(-DEPTH, DEPTH + 1):
            f = state.box(ell).bounds(0)
            err = abs(f.length() - Scalar.exact(Fraction(2, 1 << state.n(abs(ell)))))
            assert err.hi <= EXACT_TOL


def test_criterion_04_fiber_map_structure(state, reports, acceptance_log):
    with criterion(acceptance_log, 4, "f_m(-2) = 2, f_m(2) = -2, monotone knots, core in [-1, 1]") as info:
        rep = reports["dynamics"]
        for cid in ("dynamics.endpoints", "dynamics.monotone", "dynamics.core-range"):
            passed(rep, cid, info, 5 * BUDGET)
        for s in random_angles(50, 99):
            for m in range(5):
                assert fm(state, m, s.theta, -2).value.same_as(Scalar.exact(2))
                assert fm(state, m, s.theta, 2).value.same_as(Scalar.exact(-2))


def test_criterion_05_map_cauchy(state, reports, acceptance_log):
    with criterion(acceptance_log, 5, "sup |f_m - f_(m-1)| <= 2 * 2^-|b| + 2^-40 over wIB_(m-1), m = 2..4") as info:
        r = passed(reports["dynamics"], "dynamics.cauchy", info)
        # m = 2 carries the samples; m = 3, 4 hold vacuously when the strata are empty
        assert depth_class(state, 1)
        assert r.samples >= BUDGET // 2
        for m in (3, 4):
            if not depth_class(state, m - 1):
                assert f"m={m}: stratum {m - 1} empty" in r.note


def test_criterion_06_conjugation(state, reports, acceptance_log):
    with criterion(acceptance_log, 6, "g_i(gamma_|i|) meets gamma_|i+1| at the rotated angle, width <= 2^-40") as info:
        r = passed(reports["dynamics"], "dynamics.conjugation", info, 2 * DEPTH * BUDGET * 9 // 10)
        assert r.worst_margin is None or r.worst_margin > 0


def test_criterion_07_invariance(state, reports, acceptance_log):
    with criterion(acceptance_log, 7, "T-image of curve points overlaps the curve at the rotated angle") as info:
        passed(reports["dynamics"], "dynamics.invariance", info, BUDGET * 9 // 10)


def test_criterion_08_boundary_circles(state, reports, acceptance_log):
    with criterion(acceptance_log, 8, "(theta, +-2) -> (theta + omega, -+2) exactly") as info:
        passed(reports["dynamics"], "dynamics.boundary-circles", info, 5 * BUDGET)


def test_criterion_09_no_arc_surrogate(state, reports, acceptance_log):
    with criterion(acceptance_log, 9, "oscillation near l* exceeds 1.5 * 2^-n for |l| <= 4") as info:
        passed(reports["curve"], "curve.oscillation", info, 2 * DEPTH + 1)
        from skewbox.sampling import sine_extrema
        for ell in range(-4, 5):
            b = state.box(ell)
            vals = [state.gamma_value(abs(ell), b.center.shift(s * z))
                    for z in sine_extrema(b.delta, 8) for s in (1, -1)]
            osc = max(v.lo for v in vals) - min(v.hi for v in vals)
            assert osc > Fraction(3, 2) / (1 << b.n), ell


def test_criterion_10_branch_agreement(state, reports, acceptance_log):
    with criterion(acceptance_log, 10, "branches agree at tips; f_m = f_(m-1) on wing boundaries") as info:
        rep = reports["dynamics"]
        tips = sum(2 for m in range(1, 5) for i in depth_class(state, m) if i < 0)
        bnd = sum(2 for m in range(1, 5) for i in depth_class(state, m))
        r = passed(rep, "dynamics.branch-agreement", info)
        assert r.samples == tips > 0
        r = passed(rep, "dynamics.boundary-equality", info)
        assert 0 < r.samples <= bnd
