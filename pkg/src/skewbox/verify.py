"""Verification suites over a constructed state.

Each check sweeps a deterministic set of samples, records the worst margin
(bound minus certified value, so positive is good) and keeps the first
failing witness.  A record passes when every sample is certified; a sample
whose enclosures cannot decide the inequality makes it undecided.  Checks
whose structure is absent from the state (for instance strata beyond the
constructed depth) pass with zero samples and say so.
"""

from __future__ import annotations

import contextvars
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence, TypeVar

from .boxes import FiberInterval, GenericBox
from .circle import Angle, OmegaAffine, arc_inside, arcs_disjoint, orbit_point
from .construction import (
    CERTIFIED,
    EXCLUDED,
    ConstructionState,
    ExcludedPoint,
    HorizonLimited,
    check_conditions,
    gamma_range,
    pseudo_curve_sample,
    wing_components,
)
from .dynamics import (
    MTWO,
    TWO,
    FiberMapSpec,
    apply_T,
    f_limit,
    fiber_map,
    g,
    g_knots,
    kappa_offset,
    kappa_tilde_offset,
    knot_sup_distance,
)
from .metrics import dinf_sampled, hausdorff_sampled
from .sampling import Sample, inside_arc, resolvable, sine_extrema, stratified, take
from .scalar import Scalar, working_precision
from .strata import IN_IB, OUTSIDE, depth_class, depth_table, locate, wing_bounds

PASS = "pass"
FAIL = "fail"
UNDECIDED = "undecided"

SUITES = ("all", "construction", "curve", "dynamics", "metrics")

TOL = Fraction(1, 1 << 40)
EXACT_TOL = Fraction(1, 1 << 50)
MAP_LEVELS = range(0, 5)
EPS = Fraction(1, 1 << 10)

T = TypeVar("T")


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    anchor: str
    samples: int
    worst_margin: Optional[Fraction]
    status: str
    witness: Optional[str] = None
    note: str = ""


@dataclass(frozen=True)
class VerificationReport:
    suite: str
    seed: int
    budget: int
    records: tuple[CheckRecord, ...]

    @property
    def status(self) -> str:
        if any(r.status == FAIL for r in self.records):
            return FAIL
        if any(r.status == UNDECIDED for r in self.records):
            return UNDECIDED
        return PASS

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def record(self, check_id: str) -> CheckRecord:
        for r in self.records:
            if r.check_id == check_id:
                return r
        raise KeyError(check_id)

    def to_text(self) -> str:
        lines = [f"suite {self.suite}  seed {self.seed}  budget {self.budget}",
                 f"overall {self.status}", ""]
        for r in self.records:
            m = "-" if r.worst_margin is None else f"{float(r.worst_margin):.6e}"
            lines.append(f"[{r.status}] {r.check_id}  samples={r.samples}  worst_margin={m}")
            lines.append(f"    anchor: {r.anchor}")
            if r.note:
                lines.append(f"    note: {r.note}")
            if r.witness:
                lines.append(f"    witness: {r.witness}")
        return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# outcome bookkeeping
@dataclass(frozen=True)
class Outcome:
    status: str
    margin: Optional[Fraction] = None
    witness: Optional[str] = None


OK = Outcome(PASS)
# the finite construction cannot evaluate this sample; counted apart
UNRESOLVED = Outcome("unresolved")


def bound_outcome(value_hi: Fraction, value_lo: Fraction, bound: Fraction, witness: str) -> Outcome:
    """``value <= bound`` for an enclosure ``[value_lo, value_hi]``."""
    if value_hi <= bound:
        return Outcome(PASS, bound - value_hi)
    if value_lo > bound:
        return Outcome(FAIL, bound - value_hi, witness)
    return Outcome(UNDECIDED, bound - value_hi, witness)


@dataclass
class _Check:
    check_id: str
    anchor: str
    samples: int = 0
    worst: Optional[Fraction] = None
    status: str = PASS
    witness: Optional[str] = None
    notes: list[str] = field(default_factory=list)
    unresolved: int = 0

    def add(self, o: Outcome) -> None:
        if o is UNRESOLVED:
            self.unresolved += 1
            return
        self.samples += 1
        if o.margin is not None and (self.worst is None or o.margin < self.worst):
            self.worst = o.margin
        rank = {PASS: 0, UNDECIDED: 1, FAIL: 2}
        if rank[o.status] > rank[self.status]:
            self.status = o.status
            self.witness = o.witness
        elif o.status != PASS and self.witness is None:
            self.witness = o.witness

    def note(self, text: str) -> None:
        if text not in self.notes:
            self.notes.append(text)

    def record(self) -> CheckRecord:
        notes = list(self.notes)
        if self.unresolved:
            notes.append(f"{self.unresolved} samples need unconstructed levels and were left out")
        return CheckRecord(self.check_id, self.anchor, self.samples, self.worst, self.status,
                           self.witness, "; ".join(notes))


def _sweep(check: _Check, items: Sequence[T], fn: Callable[[T], Optional[Outcome]], workers: int) -> None:
    """Evaluate ``fn`` on every item and merge the outcomes in item order.

    ``None`` outcomes are skipped (sample not applicable).  Worker threads
    get a copy of the current context so the working precision carries over.
    """
    if workers <= 1 or len(items) < 2:
        outs: Iterable[Optional[Outcome]] = map(fn, items)
    else:
        ctx = contextvars.copy_context()
        with ThreadPoolExecutor(max_workers=workers) as ex:
            outs = list(ex.map(lambda it: ctx.copy().run(fn, it), items))
    for o in outs:
        if o is not None:
            check.add(o)


def _th(theta: Angle) -> str:
    return f"theta={theta.label()}"


def _exc(e: Exception) -> str:
    return f"{type(e).__name__}: {e}"


# ======================================================================
# construction
def _box_extent(b: GenericBox) -> Scalar:
    zs = (-b.alpha, -b.delta, 0, b.delta, b.alpha)
    fibs = [b.bounds(Fraction(z)) for z in zs]
    out = fibs[0].lo
    for f in fibs:
        out = out.hull(f.lo).hull(f.hi)
    return out


def _indices(J: int) -> list[int]:
    return [0] + [s * r for r in range(1, J + 1) for s in (1, -1)]


def construction_checks(state: ConstructionState, budget: int, seed: int, workers: int) -> Iterator[CheckRecord]:
    J = state.J
    P = state.precision_bits

    c = _Check("construction.root", "root level: n_0 = 1 and zero heights")
    lv = state.level(0)
    b0 = state.box(0)
    zero = all(v.is_exact() and v.lo == 0 for v in (b0.a, b0.a_plus, b0.a_minus))
    radii = 0 < lv.delta < lv.alpha < Fraction(1, 2)
    c.add(OK if lv.n == 1 and zero and radii else Outcome(FAIL, None, f"n0={lv.n} zero={zero} radii={radii}"))
    yield c.record()

    c = _Check("construction.conditions", "generator conditions R1-R6 at every level, margins above 2^-50")
    for j in range(J + 1):
        rep = check_conditions(state, j)
        mm = rep.min_margin()
        if not rep.ok:
            ff = rep.first_failure()
            c.add(Outcome(FAIL, None, f"level {j}: {ff.name} {ff.status.name} {ff.witness}"))
        elif mm is None:
            c.add(OK)
        else:
            c.add(Outcome(PASS, mm.lo) if mm.lo > EXACT_TOL
                  else Outcome(FAIL, mm.lo, f"level {j}: margin {float(mm.lo):.3e}"))
    yield c.record()

    c = _Check("construction.fiber-length", "the fiber over an orbit point has length 2 * 2^-n")
    with working_precision(P):
        for ell in _indices(J):
            b = state.box(ell)
            f = b.bounds(0)
            err = abs(f.length() - Scalar.exact(2 * Fraction(1, 1 << b.n)))
            c.add(bound_outcome(err.hi, err.lo, EXACT_TOL, f"box {ell}"))
    yield c.record()

    c = _Check("construction.winged-diameter",
               "winged box diameters: 2 * 2^-n_l <= 2^-l for l >= 0, at most 2 * 2^-n_|l+1| <= 2 * 2^-|l| for l < 0")
    with working_precision(P):
        for ell in _indices(J):
            b = state.box(ell)
            ext = _box_extent(b)
            if ell >= 0:
                h = 2 * Fraction(1, 1 << b.n)
                w = Scalar.exact(ext.hi) - Scalar.exact(ext.lo)
                err = abs(w - Scalar.exact(h))
                horiz = 2 * b.alpha
                if h > Fraction(1, 1 << ell) or horiz > h:
                    c.add(Outcome(FAIL, None, f"box {ell}: height {h} horizontal {horiz}"))
                    continue
                c.add(bound_outcome(err.hi, err.lo, EXACT_TOL, f"box {ell}"))
                continue
            vals = ext
            try:
                for a in wing_components(state, ell):
                    vals = vals.hull(gamma_range(state, abs(ell), a))
            except (ArithmeticError, ValueError) as e:
                c.add(Outcome(UNDECIDED, None, f"box {ell}: {_exc(e)}"))
                continue
            extent = max(vals.hi - vals.lo, 2 * state.wradius(ell))
            bound = 2 * Fraction(1, 1 << state.n(abs(ell + 1)))
            if bound > 2 * Fraction(1, 1 << abs(ell)):
                c.add(Outcome(FAIL, None, f"box {ell}: bound {bound}"))
                continue
            c.add(bound_outcome(extent, extent, bound, f"box {ell}"))
    yield c.record()

    c = _Check("construction.a-values", "a-values reproduce the previous curve at the center and the corners")
    with working_precision(P):
        for j in range(1, J + 1):
            for ell in (j, -j):
                b = state.box(ell)
                pts = [(b.a, b.center), (b.a_plus, b.center.shift(b.alpha)), (b.a_minus, b.center.shift(-b.alpha))]
                for v, th in pts:
                    gv = state.gamma_value(j - 1, th)
                    c.add(OK if v.overlaps(gv) else Outcome(FAIL, None, f"box {ell} {_th(th)}: {v} vs {gv}"))
    yield c.record()

    c = _Check("construction.boundary-stability",
               "boundary points of winged projections are never touched again by later levels")
    items = []
    for j in range(1, J + 1):
        for ell in (j, -j):
            for arc_ in {state.basint(ell).closed(), state.wbasint(ell)}:
                for th in arc_.boundary():
                    items.append((j, th))

    def stab(item: tuple[int, Angle]) -> Optional[Outcome]:
        j, th = item
        rt = th.rotate()
        for n in range(j + 1, J + 1):
            for k in (n, -n):
                if state.wbasint(k).contains(th):
                    return Outcome(FAIL, None, f"{_th(th)} inside winged projection {k}")
        for n in range(j, J + 1):
            for k in (n, -n):
                if state.basint(k).interior_contains(rt):
                    return Outcome(FAIL, None, f"R{_th(th)} inside projection {k}")
        ref = state.gamma_value(j - 1, th)
        rref = state.gamma_value(j - 1, rt)
        for n in range(j, J + 1):
            if not state.gamma_value(n, th).overlaps(ref) or not state.gamma_value(n, rt).overlaps(rref):
                return Outcome(FAIL, None, f"{_th(th)} gamma_{n} moved")
        return OK

    with working_precision(P):
        _sweep(c, items, stab, workers)
    yield c.record()

    c = _Check("construction.strata",
               "winged projections are nested or disjoint, and nesting strictly increases the index")
    if J == 0:
        c.note("skipped: no strata beyond level 0")
    else:
        idx = _indices(J)
        for x in range(len(idx)):
            for y in range(x + 1, len(idx)):
                i, k = idx[x], idx[y]
                wi, wk = state.wbasint(i), state.wbasint(k)
                disj, _ = arcs_disjoint(wi, wk)
                if disj:
                    c.add(OK)
                    continue
                inner, outer = (k, i) if abs(k) > abs(i) else (i, k)
                if abs(i) == abs(k):
                    c.add(Outcome(FAIL, None, f"winged projections {i} and {k} meet"))
                    continue
                ok, _ = arc_inside(state.wbasint(inner), state.wbasint(outer))
                c.add(OK if ok else Outcome(FAIL, None, f"{inner} meets but is not inside {outer}"))
        tab = depth_table(state)
        for m in range(tab.max_depth + 1):
            d = depth_class(state, m)
            for x in range(len(d)):
                for y in range(x + 1, len(d)):
                    disj, _ = arcs_disjoint(state.wbasint(d[x]), state.wbasint(d[y]))
                    c.add(OK if disj else Outcome(FAIL, None, f"stratum {m}: {d[x]} meets {d[y]}"))
    yield c.record()


# ======================================================================
# curve
def curve_checks(state: ConstructionState, budget: int, seed: int, workers: int) -> Iterator[CheckRecord]:
    J = state.J
    P = state.precision_bits
    samples = stratified(state, budget, seed)

    c = _Check("curve.cauchy", "adjacent curve levels differ by at most 2^-j with enclosure slack 2^-40")
    if J == 0:
        c.note("skipped: single level")
    items = [(j, s) for j in range(1, J + 1) for s in samples]

    def cauchy(item: tuple[int, Sample]) -> Optional[Outcome]:
        j, s = item
        a, b = state.gamma(j - 1, s.theta), state.gamma(j, s.theta)
        if EXCLUDED in (a.status, b.status):
            return None
        d = abs(a.value - b.value)
        if d.width() > TOL:
            return Outcome(UNDECIDED, None, f"j={j} {_th(s.theta)} width {float(d.width()):.3e}")
        return bound_outcome(d.hi, d.lo, Fraction(1, 1 << j), f"j={j} {_th(s.theta)} diff {d}")

    with working_precision(P):
        _sweep(c, items, cauchy, workers)
    yield c.record()

    c = _Check("curve.range", "every curve level takes values in [-1, 1]")
    items = [(j, s) for j in range(J + 1) for s in samples]

    def rng(item: tuple[int, Sample]) -> Optional[Outcome]:
        j, s = item
        cv = state.gamma(j, s.theta)
        if cv.status == EXCLUDED:
            return None
        v = abs(cv.value)
        return bound_outcome(v.hi, v.lo, Fraction(1), f"j={j} {_th(s.theta)}")

    with working_precision(P):
        _sweep(c, items, rng, workers)
    yield c.record()

    c = _Check("curve.fiber-nondegenerate", "the curve closure has a vertical fiber of length 2 * 2^-n at each orbit point")
    with working_precision(P):
        _, fibers = pseudo_curve_sample(state, J, 1)
        for th, lo, hi in fibers:
            ell = th.k
            h = 2 * Fraction(1, 1 << state.n(abs(ell)))
            err = abs(hi - lo - Scalar.exact(h))
            c.add(bound_outcome(err.hi, err.lo, EXACT_TOL, f"orbit point {ell}"))
    yield c.record()

    c = _Check("curve.oscillation",
               "sampled at sine extrema near each orbit point the curve oscillates by more than 1.5 * 2^-n")
    with working_precision(P):
        for ell in _indices(J):
            b = state.box(ell)
            vals = []
            for z in sine_extrema(b.delta, 8):
                for s in (1, -1):
                    vals.append(state.gamma_value(abs(ell), b.center.shift(s * z)))
            top = max(v.lo for v in vals)
            bot = min(v.hi for v in vals)
            osc = top - bot
            need = Fraction(3, 2) * Fraction(1, 1 << b.n)
            c.add(Outcome(PASS, osc - need) if osc > need else Outcome(FAIL, osc - need, f"box {ell}"))
    yield c.record()

    c = _Check("curve.graph-in-box", "over a winged projection the curve stays inside the winged box fibers")
    items = []
    for j in range(J + 1):
        for ell in ((j, -j) if j else (0,)):
            for s in inside_arc(orbit_point(ell), state.wradius(ell), max(1, budget // max(1, 2 * J + 1)),
                                seed + 31 * ell):
                items.append((ell, s))

    def gib(item: tuple[int, Sample]) -> Optional[Outcome]:
        ell, s = item
        if s.theta == orbit_point(ell):
            return None
        try:
            v = state.gamma_value(abs(ell), s.theta)
        except ExcludedPoint:
            return None
        fib: FiberInterval = state.winged_bounds(ell, s.theta)
        if fib.contains_value(v):
            return OK
        return Outcome(FAIL, None, f"box {ell} {_th(s.theta)}: {v} not in [{fib.lo}, {fib.hi}]")

    with working_precision(P):
        _sweep(c, items, gib, workers)
    yield c.record()

    c = _Check("curve.outside-unchanged", "a new level changes the curve only over its own two boxes")
    items = [(j, s) for j in range(1, J + 1) for s in samples]

    def outside(item: tuple[int, Sample]) -> Optional[Outcome]:
        j, s = item
        if state.basint(j).contains(s.theta) or state.basint(-j).contains(s.theta):
            return None
        a, b = state.gamma(j - 1, s.theta), state.gamma(j, s.theta)
        if EXCLUDED in (a.status, b.status):
            return None
        return OK if a.value.same_as(b.value) else Outcome(FAIL, None, f"j={j} {_th(s.theta)}")

    _sweep(c, items, outside, workers)
    yield c.record()

    c = _Check("curve.limit", "limit curve enclosures meet the requested tolerance and stay in [-1, 1]")

    def lim(s: Sample) -> Optional[Outcome]:
        cv = state.gamma_limit(s.theta, EPS)
        if cv.status != CERTIFIED:
            return None
        w = cv.value.width()
        if abs(cv.value).lo > 1:
            return Outcome(FAIL, None, f"{_th(s.theta)} value {cv.value}")
        return bound_outcome(w, w, EPS + TOL, f"{_th(s.theta)} width {float(w):.3e}")

    _sweep(c, samples, lim, workers)
    yield c.record()


# ======================================================================
# dynamics
def _map_samples(state: ConstructionState, budget: int, seed: int) -> list[Sample]:
    """Resolvable angles where even the deepest sampled map needs no unconstructed level.

    Over the last positive box the map ``g_J`` needs level ``J + 1``, so those
    angles are left out although their classification is settled.
    """
    top = max(MAP_LEVELS)
    ok = (s for s in resolvable(state, stratified(state, 2 * budget, seed))
          if fiber_map(state, top, s.theta, EPS).resolved)
    return take(ok, budget)


def _core_xs(state: ConstructionState, m: int, theta: Angle) -> list[Scalar]:
    """Abscissae where the innermost core of ``f_{m,theta}`` starts and ends."""
    for k in range(m, -1, -1):
        loc = locate(state, k, theta)
        if loc.b is None or loc.classification == OUTSIDE:
            continue
        if loc.classification == IN_IB and not loc.also_wing:
            fib = state.box(loc.b).bounds(theta.offset_from(state.box(loc.b).center))
            return [fib.lo, fib.hi]
        wi = wing_bounds(state, k, theta, loc)
        return [wi.lo, wi.hi]
    return [Scalar.exact(0)]


def dynamics_checks(state: ConstructionState, budget: int, seed: int, workers: int) -> Iterator[CheckRecord]:
    J = state.J
    P = state.precision_bits
    absent = J < 2
    samples = [] if absent else _map_samples(state, budget, seed)
    maps: dict[tuple[int, tuple], FiberMapSpec] = {}

    def fmap(m: int, th: Angle) -> FiberMapSpec:
        key = (m, th.key())
        hit = maps.get(key)
        if hit is None:
            hit = fiber_map(state, m, th, EPS)
            maps[key] = hit
        return hit

    def skipped(c: _Check) -> CheckRecord:
        c.note("skipped: dynamics needs depth >= 2")
        return c.record()

    items = [(m, s) for m in MAP_LEVELS for s in samples]

    c = _Check("dynamics.endpoints", "fiber maps send -2 to 2 and 2 to -2 exactly")

    def endpoints(item: tuple[int, Sample]) -> Optional[Outcome]:
        m, s = item
        f = fmap(m, s.theta)
        if not f.resolved:
            return Outcome(UNDECIDED, None, f"m={m} {_th(s.theta)} unresolved")
        (x0, y0), (x1, y1) = f.knots[0], f.knots[-1]
        ok = all(v.is_exact() for v in (x0, y0, x1, y1)) and (x0.lo, y0.lo, x1.lo, y1.lo) == (-2, 2, 2, -2)
        return OK if ok else Outcome(FAIL, None, f"m={m} {_th(s.theta)} ends {f.knots[0]} {f.knots[-1]}")

    if absent:
        yield skipped(c)
    else:
        with working_precision(P):
            _sweep(c, items, endpoints, 1)
        yield c.record()

    c = _Check("dynamics.monotone", "fiber maps are non-increasing with increasing knots and bounded knot count")

    def monotone(item: tuple[int, Sample]) -> Optional[Outcome]:
        m, s = item
        f = fmap(m, s.theta)
        if not f.resolved:
            return Outcome(UNDECIDED, None, f"m={m} {_th(s.theta)} unresolved")
        if len(f.knots) > 3 + 2 * (m + 1):
            return Outcome(FAIL, None, f"m={m} {_th(s.theta)} {len(f.knots)} knots")
        for (xa, ya), (xb, yb) in zip(f.knots, f.knots[1:]):
            if not xa.certainly_lt(xb):
                return Outcome(UNDECIDED, None, f"m={m} {_th(s.theta)} knots not separated")
            if ya.certainly_lt(yb):
                return Outcome(FAIL, None, f"m={m} {_th(s.theta)} increasing piece")
            # flat pieces give equal values with different enclosures;
            # non-increase then holds up to the enclosure widths
            if not yb.certainly_le(ya) and max(ya.width(), yb.width()) > TOL:
                return Outcome(UNDECIDED, None, f"m={m} {_th(s.theta)} {ya} vs {yb}")
        return OK

    if absent:
        yield skipped(c)
    else:
        with working_precision(P):
            _sweep(c, items, monotone, 1)
        yield c.record()

    c = _Check("dynamics.core-range", "on the core fiber interval the map takes values in [-1, 1]")

    def core(item: tuple[int, Sample]) -> Optional[Outcome]:
        m, s = item
        f = fmap(m, s.theta)
        if not f.resolved:
            return None
        worst = None
        for x in _core_xs(state, m, s.theta):
            v = abs(f(x))
            o = bound_outcome(v.hi, v.lo, Fraction(1), f"m={m} {_th(s.theta)} value {f(x)}")
            if o.status != PASS:
                return o
            worst = o.margin if worst is None else min(worst, o.margin)
        return Outcome(PASS, worst)

    if absent:
        yield skipped(c)
    else:
        with working_precision(P):
            _sweep(c, items, core, 1)
        yield c.record()

    c = _Check("dynamics.conjugation",
               "a box map carries the curve over the box to the next curve level at the rotated angle")
    g_items = []
    if not absent:
        for i in range(-J, J):
            r = state.alpha(i) if i >= 0 else state.wradius(i)
            for s in inside_arc(orbit_point(i), r, budget, seed + 7 * i + 1000):
                g_items.append((i, s))

    def conj(item: tuple[int, Sample]) -> Optional[Outcome]:
        i, s = item
        if s.theta == orbit_point(i):
            return None
        try:
            G = state.gamma_value(abs(i), s.theta)
            y = g(state, i, s.theta, G)
            cv = state.gamma_value(abs(i + 1), s.theta.rotate())
        except (ExcludedPoint, HorizonLimited):
            return None
        w = y.width()
        if not y.overlaps(cv):
            return Outcome(FAIL, None, f"i={i} {_th(s.theta)}: {y} vs {cv}")
        return bound_outcome(w, w, TOL, f"i={i} {_th(s.theta)} width {float(w):.3e}")

    if absent:
        yield skipped(c)
    else:
        with working_precision(P):
            _sweep(c, g_items, conj, workers)
        yield c.record()

    c = _Check("dynamics.transport", "a box map sends the ends of its fiber into the fiber of the next box")
    t_items = []
    if not absent:
        for i in range(-J, J):
            r = state.alpha(i + 1) if i >= 0 else state.wradius(i)
            for s in inside_arc(orbit_point(i), r, max(1, budget // 4), seed + 11 * i + 2000):
                t_items.append((i, s))

    def transport(item: tuple[int, Sample]) -> Optional[Outcome]:
        i, s = item
        if s.theta == orbit_point(i):
            return None
        try:
            ks = g_knots(state, i, s.theta)
            tgt = state.winged_bounds(i + 1, s.theta.rotate())
        except (ExcludedPoint, HorizonLimited, ValueError):
            return None
        for y in (ks[0][1], ks[-1][1]):
            if not tgt.contains_value(y):
                return Outcome(FAIL, None, f"i={i} {_th(s.theta)}: {y} outside [{tgt.lo}, {tgt.hi}]")
        return OK

    if absent:
        yield skipped(c)
    else:
        with working_precision(P):
            _sweep(c, t_items, transport, workers)
        yield c.record()

    c = _Check("dynamics.kappa", "the flange slope factor is a running infimum in (0, 1], equal to 1 at the delta edge")
    if absent:
        yield skipped(c)
    else:
        with working_precision(P):
            for i in range(-J, 0):
                b = state.box(i)
                for side in (1, -1):
                    prev = None
                    for t in range(0, 17):
                        u = b.delta + (b.alpha - b.delta) * Fraction(t, 17)
                        z = OmegaAffine(0, side * u)
                        k = kappa_offset(state, i, z)
                        kt = kappa_tilde_offset(state, i, z)
                        wit = f"i={i} side={side} t={t}"
                        if t == 0 and not (k.contains(1) and kt.contains(1)):
                            c.add(Outcome(FAIL, None, wit + " not 1 at the edge"))
                        elif k.hi <= 0 or k.lo > 1 or kt.certainly_lt(k):
                            c.add(Outcome(FAIL, None, wit + f" kappa {k} kappa~ {kt}"))
                        elif prev is not None and prev.certainly_lt(k):
                            c.add(Outcome(FAIL, None, wit + " increased outward"))
                        else:
                            c.add(OK)
                        prev = k
        yield c.record()

    c = _Check("dynamics.branch-agreement",
               "at tips of negative boxes both defining branches of f_m agree within 2^-40")
    tips = []
    if not absent:
        for m in range(1, max(MAP_LEVELS) + 1):
            for i in depth_class(state, m):
                if i < 0:
                    b = state.box(i)
                    tips += [(m, b.center.shift(s * b.alpha)) for s in (1, -1)]
    if not tips:
        c.note("skipped: no negative boxes in strata 1..4")
    else:
        c.note("exhaustive over the finite set of tips")

    def branch(item: tuple[int, Angle]) -> Optional[Outcome]:
        m, th = item
        f1 = fiber_map(state, m, th, EPS, branch="ib")
        f2 = fiber_map(state, m, th, EPS, branch="wing")
        if not (f1.resolved and f2.resolved):
            return UNRESOLVED
        d = knot_sup_distance(f1, f2)
        return bound_outcome(d.hi, d.lo, TOL, f"m={m} {_th(th)} diff {d}")

    with working_precision(P):
        _sweep(c, tips, branch, workers)
    yield c.record()

    c = _Check("dynamics.boundary-equality",
               "on the boundary of a winged projection f_m equals f_(m-1) on all knots")
    bnd = []
    if not absent:
        for m in range(1, max(MAP_LEVELS) + 1):
            for i in depth_class(state, m):
                bnd += [(m, th) for th in state.wbasint(i).boundary()]
    c.note("exhaustive over the finite boundary sets" if bnd else "skipped: strata 1..4 are empty")

    def boundary(item: tuple[int, Angle]) -> Optional[Outcome]:
        m, th = item
        f1, f0_ = fiber_map(state, m, th, EPS), fiber_map(state, m - 1, th, EPS)
        if not (f1.resolved and f0_.resolved):
            return UNRESOLVED
        d = knot_sup_distance(f1, f0_)
        return bound_outcome(d.hi, d.lo, TOL, f"m={m} {_th(th)} diff {d}")

    with working_precision(P):
        _sweep(c, bnd, boundary, workers)
    yield c.record()

    c = _Check("dynamics.cauchy",
               "over wIB_(m-1) consecutive fiber maps differ by at most 2 * 2^-|b| plus 2^-40")
    c_items = []
    if not absent:
        for m in range(2, max(MAP_LEVELS) + 1):
            d = depth_class(state, m - 1)
            if not d:
                c.note(f"m={m}: stratum {m - 1} empty")
                continue
            per = max(1, budget // len(d))
            for b in d:
                pts = inside_arc(orbit_point(b), state.wradius(b), 4 * per, seed + 13 * b + 100 * m)
                ok = [s for s in resolvable(state, pts) if fiber_map(state, m, s.theta, EPS).resolved]
                if not ok:
                    c.note(f"m={m}: box {b} needs unconstructed levels")
                for s in ok[:per]:
                    c_items.append((m, b, s))

    def cauchy_m(item: tuple[int, int, Sample]) -> Optional[Outcome]:
        m, b, s = item
        f1, f0_ = fiber_map(state, m, s.theta, EPS), fiber_map(state, m - 1, s.theta, EPS)
        if not (f1.resolved and f0_.resolved):
            return Outcome(UNDECIDED, None, f"m={m} {_th(s.theta)} unresolved")
        d = knot_sup_distance(f1, f0_)
        return bound_outcome(d.hi, d.lo, 2 * Fraction(1, 1 << abs(b)) + TOL, f"m={m} {_th(s.theta)} diff {d}")

    if absent:
        yield skipped(c)
    else:
        with working_precision(P):
            _sweep(c, c_items, cauchy_m, workers)
        yield c.record()

    c = _Check("dynamics.stationary", "over an orbit point of stratum m the fiber maps are frozen from f_m on")
    st_items = []
    if not absent:
        for m in range(max(MAP_LEVELS) + 1):
            st_items += [(m, i) for i in depth_class(state, m) if not (i >= 0 and i + 1 > J)]
        c.note(f"orbit point {J} left out: its box map needs level {J + 1}")

    def stationary(item: tuple[int, int]) -> Optional[Outcome]:
        m, i = item
        th = orbit_point(i)
        base = fiber_map(state, m, th, EPS)
        if not base.resolved:
            return Outcome(UNDECIDED, None, f"m={m} orbit point {i} unresolved")
        for k in range(m + 1, max(MAP_LEVELS) + 1):
            fk = fiber_map(state, k, th, EPS)
            if not fk.resolved:
                return Outcome(UNDECIDED, None, f"k={k} orbit point {i} unresolved")
            d = knot_sup_distance(base, fk)
            if d.hi > TOL:
                return Outcome(FAIL, TOL - d.hi, f"orbit point {i}: f_{k} differs from f_{m} by {d}")
        return OK

    if absent:
        yield skipped(c)
    else:
        with working_precision(P):
            _sweep(c, st_items, stationary, workers)
        yield c.record()

    c = _Check("dynamics.invariance", "the image of a curve point lies on the curve over the rotated angle")

    def invariance(s: Sample) -> Optional[Outcome]:
        gv = state.gamma_limit(s.theta, EPS)
        if gv.status != CERTIFIED:
            return None
        fv = f_limit(state, s.theta, gv.value, EPS)
        gr = state.gamma_limit(s.theta.rotate(), EPS)
        if fv.status != CERTIFIED or gr.status != CERTIFIED:
            return None
        return OK if fv.value.overlaps(gr.value) else Outcome(
            FAIL, None, f"{_th(s.theta)}: image {fv.value} vs {gr.value}")

    if absent:
        yield skipped(c)
    else:
        with working_precision(P):
            _sweep(c, samples, invariance, workers)
        yield c.record()

    c = _Check("dynamics.boundary-circles", "the skew product swaps the circles x = 2 and x = -2")

    def circles(item: tuple[int, Sample]) -> Optional[Outcome]:
        m, s = item
        for x, y in ((TWO, MTWO), (MTWO, TWO)):
            th, mv = apply_T(state, m, (s.theta, x), EPS)
            exact = mv.value.is_exact() and mv.value.lo == y.lo and mv.status == CERTIFIED
            if th != s.theta.rotate() or not exact:
                return Outcome(FAIL, None, f"m={m} {_th(s.theta)} x={x.lo}: {mv}")
        fl = f_limit(state, s.theta, TWO, EPS)
        if not (fl.value.is_exact() and fl.value.lo == -2):
            return Outcome(FAIL, None, f"limit {_th(s.theta)}: {fl}")
        return OK

    if absent:
        yield skipped(c)
    else:
        with working_precision(P):
            _sweep(c, items, circles, 1)
        yield c.record()


# ======================================================================
# metrics
def metrics_checks(state: ConstructionState, budget: int, seed: int, workers: int) -> Iterator[CheckRecord]:
    J = state.J
    grid = max(16, budget)

    c = _Check("metrics.dinf-bound", "sampled sup distance of adjacent levels stays below 2^-j")
    c2 = _Check("metrics.hausdorff-dinf", "sampled Hausdorff distance of adjacent levels is at most the sampled sup distance")
    if J == 0:
        c.note("skipped: single level")
        c2.note("skipped: single level")
    for j in range(1, J + 1):
        bound = Fraction(1, 1 << j)
        e = dinf_sampled(state, j - 1, j, grid, upper_reference=bound)
        if e.violates_reference:
            c.add(Outcome(FAIL, bound - e.lower.lo, f"j={j} lower bound {e.lower} at {e.witness}"))
        else:
            c.add(Outcome(PASS, bound - e.lower.lo))
        pa, _ = pseudo_curve_sample(state, j - 1, grid)
        pb, _ = pseudo_curve_sample(state, j, grid)
        h = hausdorff_sampled(pa, pb)
        d = dinf_sampled(state, j - 1, j, grid, include_targeted=False)
        c2.add(Outcome(PASS, d.lower.hi - h.lower.lo) if h.lower.lo <= d.lower.hi
               else Outcome(FAIL, d.lower.hi - h.lower.lo, f"j={j}: H {h.lower} > dinf {d.lower}"))
    yield c.record()
    yield c2.record()

    c = _Check("metrics.identity", "both estimators vanish on identical inputs")
    for j in range(J + 1):
        e = dinf_sampled(state, j, j, max(16, grid // 4))
        pts, _ = pseudo_curve_sample(state, j, max(16, grid // 4))
        h = hausdorff_sampled(pts, pts)
        ok = e.lower.hi == 0 and h.lower.hi == 0
        c.add(OK if ok else Outcome(FAIL, None, f"j={j}: {e.lower} {h.lower}"))
    yield c.record()


_SUITES: dict[str, Callable[..., Iterator[CheckRecord]]] = {
    "construction": construction_checks,
    "curve": curve_checks,
    "dynamics": dynamics_checks,
    "metrics": metrics_checks,
}


def verify_suite(state: ConstructionState, suite_id: str = "all", sample_budget: int = 1000,
                 seed: int = 0, workers: int = 1) -> VerificationReport:
    """Run one suite (or ``all``) and collect the records in a fixed order."""
    if suite_id not in SUITES:
        raise ValueError(f"unknown suite {suite_id!r}; expected one of {', '.join(SUITES)}")
    if sample_budget < 1:
        raise ValueError("sample budget must be positive")
    names = list(_SUITES) if suite_id == "all" else [suite_id]
    recs: list[CheckRecord] = []
    for n in names:
        recs.extend(_SUITES[n](state, sample_budget, seed, workers))
    return VerificationReport(suite_id, seed, sample_budget, tuple(recs))
