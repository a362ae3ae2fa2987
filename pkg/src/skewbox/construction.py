"""The recursive box family, the curves gamma_j and their limit gamma.

Level ``j`` fixes ``n_j``, the radii ``alpha_j`` and ``delta_j = alpha_j / 2``
and the two boxes around ``j*`` and ``(-j)*``.  The heights of a box are read
off the previous curve, so every level depends on all earlier ones.  Each
level is accepted only after every clause in :func:`check_conditions` holds;
the parameter search walks down a fixed ladder of dyadic radii and bumps
``n_j`` when a box does not fit inside the one that contains it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, Iterator, Optional

from .boxes import DomainError, FiberInterval, GenericBox, SingularityError
from .circle import (
    OMEGA_TAG,
    Angle,
    Arc,
    OmegaAffine,
    arc,
    arc_inside,
    arcs_disjoint,
    ball,
    directed_distance,
    orbit_point,
)
from .scalar import Scalar, Tri, hull_all, smax, smin, working_precision

CERTIFIED = "certified"
HORIZON_LIMITED = "horizon_limited"
EXCLUDED = "excluded"

ZERO = Scalar.exact(0)


class ConstructionError(RuntimeError):
    """The parameter search ran out of budget; ``clause`` names the blocker."""

    def __init__(self, j: int, clause: str, detail: str = ""):
        super().__init__(f"level {j}: no parameters found, blocked by {clause} {detail}".strip())
        self.j = j
        self.clause = clause


class HorizonLimited(RuntimeError):
    """The finite construction cannot resolve the requested quantity."""


class ExcludedPoint(ValueError):
    """An orbit point excluded from the domain of the requested curve."""


@dataclass(frozen=True)
class BuildConfig:
    depth: int = 6
    orbit_horizon: Optional[int] = None
    precision_bits: int = 192
    ladder_steps: int = 40
    n_steps: int = 24

    def horizon(self) -> int:
        L = self.orbit_horizon if self.orbit_horizon is not None else 4 * self.depth
        return max(L, self.depth + 2)


@dataclass(frozen=True)
class Provenance:
    """Which branch set a box's heights, and the witnesses used."""

    branch: str  # "root", "isolated" or "nested"
    m: Optional[int] = None
    nested_in: tuple[int, ...] = ()


@dataclass
class LevelSpec:
    j: int
    n: int
    alpha: Fraction
    delta: Fraction
    boxes: dict[int, GenericBox]
    provenance: dict[int, Provenance] = field(default_factory=dict)

    def excluded(self) -> tuple[int, ...]:
        return (0,) if self.j == 0 else (self.j, -self.j)


@dataclass(frozen=True)
class CurveValue:
    """Value of a curve at an angle; for excluded points the vertical fiber."""

    value: Scalar
    status: str
    level: Optional[int] = None


@dataclass(frozen=True)
class Clause:
    name: str
    status: Tri
    margin: Optional[Scalar] = None
    witness: str = ""


@dataclass
class ConditionReport:
    j: int
    clauses: list[Clause]

    @property
    def ok(self) -> bool:
        return all(c.status is Tri.TRUE for c in self.clauses)

    def first_failure(self) -> Optional[Clause]:
        for c in self.clauses:
            if c.status is not Tri.TRUE:
                return c
        return None

    def min_margin(self) -> Optional[Scalar]:
        ms = [c.margin for c in self.clauses if c.margin is not None]
        if not ms:
            return None
        out = ms[0]
        for m in ms[1:]:
            out = smin(out, m)
        return out


def _pow2(n: int) -> Fraction:
    return Fraction(1, 1 << n) if n >= 0 else Fraction(1 << -n)


_omega_key = cmp_to_key(lambda a, b: a.cmp(b))


# ======================================================================
class ConstructionState:
    """Levels ``0..J`` of the construction together with curve evaluation."""

    def __init__(self, levels: list[LevelSpec], orbit_horizon: int,
                 precision_bits: int = 192, _memo: Optional[list[dict]] = None):
        self.levels = list(levels)
        self.orbit_horizon = orbit_horizon
        self.precision_bits = precision_bits
        self.omega_tag = OMEGA_TAG
        memo = list(_memo or [])
        while len(memo) < len(self.levels):
            memo.append({})
        self._memo = memo[: len(self.levels)]
        self._clear_cache: dict = {}
        self._kappa_cache: dict = {}

    # ------------------------------------------------------------ numbers
    @property
    def J(self) -> int:
        return len(self.levels) - 1

    def level(self, j: int) -> LevelSpec:
        if not 0 <= j <= self.J:
            raise HorizonLimited(f"level {j} is not constructed")
        return self.levels[j]

    def n(self, j: int) -> int:
        return self.level(j).n

    def alpha(self, j: int) -> Fraction:
        return self.level(j).alpha

    def delta(self, j: int) -> Fraction:
        return self.level(j).delta

    def box(self, ell: int) -> GenericBox:
        return self.level(abs(ell)).boxes[ell]

    def has_box(self, ell: int) -> bool:
        return abs(ell) <= self.J

    def with_level(self, spec: LevelSpec) -> "ConstructionState":
        """A new state with ``spec`` as its top level (earlier memo shared)."""
        return ConstructionState(self.levels[: spec.j] + [spec], self.orbit_horizon,
                                 self.precision_bits, self._memo[: spec.j])

    # ------------------------------------------------------------ arcs
    def basint(self, ell: int) -> Arc:
        return ball(orbit_point(ell), self.alpha(abs(ell)))

    def obasint(self, ell: int) -> Arc:
        return self.basint(ell).opened()

    def dball(self, ell: int) -> Arc:
        return ball(orbit_point(ell), self.delta(abs(ell)))

    def wradius(self, ell: int) -> Fraction:
        return self.alpha(ell) if ell >= 0 else self.alpha(abs(ell + 1))

    def wbasint(self, ell: int) -> Arc:
        return ball(orbit_point(ell), self.wradius(ell))

    def wobasint(self, ell: int) -> Arc:
        return self.wbasint(ell).opened()

    def rot_ball(self, ell: int, j: int) -> Arc:
        return ball(orbit_point(ell), self.alpha(j))

    # ------------------------------------------------------------ curves
    def gamma(self, j: int, theta: Angle) -> CurveValue:
        """``gamma_j(theta)``; at excluded orbit points returns the fiber with status excluded."""
        if j < 0:
            return CurveValue(ZERO, CERTIFIED)
        if j > self.J:
            raise HorizonLimited(f"gamma_{j} needs level {j}")
        key = theta.key()
        memo = self._memo[j]
        hit = memo.get(key)
        if hit is not None:
            return hit
        with working_precision(self.precision_bits):
            out = self._gamma_uncached(j, theta)
        memo[key] = out
        return out

    def _gamma_uncached(self, j: int, theta: Angle) -> CurveValue:
        if theta.q == 0 and abs(theta.k) <= j:
            b = self.box(theta.k)
            return CurveValue((b.a - b.half).hull(b.a + b.half), EXCLUDED)
        for r in range(j, -1, -1):
            for ell in ((r, -r) if r else (0,)):
                b = self.box(ell)
                z = theta.offset_from(b.center)
                if abs(z).cmp(b.alpha) <= 0:
                    return CurveValue(b.graph(z), CERTIFIED)
        return CurveValue(ZERO, CERTIFIED)

    def gamma_value(self, j: int, theta: Angle) -> Scalar:
        cv = self.gamma(j, theta)
        if cv.status == EXCLUDED:
            raise ExcludedPoint(f"{theta!r} is excluded from the domain of gamma_{j}")
        return cv.value

    def active_box(self, j: int, theta: Angle) -> Optional[int]:
        """Index of the box whose graph gives ``gamma_j`` at ``theta`` (None: zero)."""
        for r in range(j, -1, -1):
            for ell in ((r, -r) if r else (0,)):
                if self.basint(ell).contains(theta):
                    return ell
        return None

    # ------------------------------------------------------------ fibers
    def winged_bounds(self, i: int, theta: Angle) -> FiberInterval:
        """``I_{i,theta} = [m_i(theta), M_i(theta)]`` over the winged projection."""
        b = self.box(i)
        z = theta.offset_from(b.center)
        az = abs(z)
        with working_precision(self.precision_bits):
            if az.cmp(b.alpha) <= 0:
                return b.bounds(z)
            if i < 0 and az.cmp(self.wradius(i)) <= 0:
                g = self.gamma_value(abs(i), theta)
                return FiberInterval(g, g, True)
        raise DomainError(f"{theta!r} is outside the winged projection of box {i}")

    # ------------------------------------------------------------ horizon
    def unbuilt_radius(self, i: int) -> Fraction:
        """Upper bound for the winged radius of a box with ``|i| > J``.

        Any continuation keeps ``alpha_{k+1} < delta_k = alpha_k / 2``.
        """
        J = self.J
        return self.alpha(J) / (1 << (abs(i) - J - 1))

    def horizon_clear(self, theta: Angle) -> bool:
        """No unconstructed (winged) box can contain ``theta``.

        Uses ``||N omega|| > 1/(3|N|)`` for the golden rotation to bound the
        distance to far orbit points, and checks the remaining ones exactly.
        """
        key = theta.key()
        hit = self._clear_cache.get(key)
        if hit is not None:
            return hit
        out = self._horizon_clear(theta)
        self._clear_cache[key] = out
        return out

    def _horizon_clear(self, theta: Angle) -> bool:
        J = self.J
        k = theta.k
        s = theta.q.denominator
        aJ = self.alpha(J)
        K = max(J + 1, abs(k))
        while Fraction(1 << (K - J - 1)) < 3 * s * s * (K + abs(k)) * aJ:
            K += 1
        for r in range(J + 1, K + 1):
            rad = self.unbuilt_radius(r)
            for i in (r, -r):
                if ball(orbit_point(i), rad).contains(theta):
                    return False
        return True

    def gamma_limit(self, theta: Angle, eps: Fraction | float = Fraction(1, 1 << 10)) -> CurveValue:
        """Enclosure of the limit curve ``gamma(theta)``.

        If no unconstructed box can reach ``theta`` then ``gamma = gamma_J``
        there exactly.  Otherwise the level used is the smallest ``i`` with
        ``2**-i <= eps`` and ``gamma_i`` is widened by ``2 alpha_i``: later
        boxes have heights ``2**-n_k`` with ``sum_{k>i} 2 * 2**-n_k < 4 delta_i``,
        which is below ``2**-i`` as well.  Orbit points lie outside the
        domain of the limit.
        """
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        J = self.J
        if theta.q == 0:
            cv = self.gamma(J, theta)
            if abs(theta.k) <= J:
                return CurveValue(cv.value, EXCLUDED, J)
            with working_precision(self.precision_bits):
                return CurveValue(cv.value.widen(2 * self.alpha(J)), EXCLUDED, J)
        if self.horizon_clear(theta):
            return CurveValue(self.gamma(J, theta).value, CERTIFIED, J)
        i = 0
        while i < J and Fraction(1, 1 << i) > eps:
            i += 1
        status = CERTIFIED if Fraction(1, 1 << i) <= eps else HORIZON_LIMITED
        with working_precision(self.precision_bits):
            return CurveValue(self.gamma(i, theta).value.widen(2 * self.alpha(i)), status, i)


# ======================================================================
# arcs: components and containment helpers
def _open_arc(a: Angle, b: Angle) -> Arc:
    return Arc(a, directed_distance(a, b), False, False)


def center_components(state: ConstructionState, k: int) -> list[Arc]:
    """The two components of ``obasint_k`` minus the center."""
    c = orbit_point(k)
    r = state.alpha(abs(k))
    return [_open_arc(c.shift(-r), c), _open_arc(c, c.shift(r))]


def wing_components(state: ConstructionState, k: int) -> list[Arc]:
    """The two components of ``wobasint_k`` minus ``basint_k`` (``k < 0``)."""
    c = orbit_point(k)
    r = state.alpha(abs(k))
    w = state.wradius(k)
    return [_open_arc(c.shift(-w), c.shift(-r)), _open_arc(c.shift(r), c.shift(w))]


def fine_components(state: ConstructionState, m: int) -> list[Arc]:
    """Components of ``wobasint_m`` minus ``Bd(basint_m)`` and the center."""
    out = center_components(state, m)
    if m < 0:
        out += wing_components(state, m)
    return out


def inside_some(a: Arc, comps: list[Arc]) -> tuple[bool, Optional[OmegaAffine]]:
    best = None
    for c in comps:
        ok, clr = arc_inside(a, c, strict=True)
        if ok:
            return True, clr
        if best is None or clr.cmp(best) > 0:
            best = clr
    return False, best


def meets(a: Arc, b: Arc) -> bool:
    return not arcs_disjoint(a, b)[0]


def _enc(x: OmegaAffine) -> Scalar:
    return x.enclosure(80)


# ======================================================================
# curve pieces and ranges over arcs
@dataclass(frozen=True)
class Piece:
    t0: OmegaAffine
    t1: OmegaAffine
    ell: Optional[int]
    region: str
    z0: Optional[OmegaAffine]


def _dyadic_between(a: Fraction, b: Fraction) -> Fraction:
    k = 0
    while True:
        m = math.floor(a * (1 << k)) + 1
        q = Fraction(m, 1 << k)
        if q < b:
            return q
        k += 1


def rational_between(t0: OmegaAffine, t1: OmegaAffine) -> Fraction:
    bits = 64
    while True:
        with working_precision(bits + 16):
            e0, e1 = t0.enclosure(bits), t1.enclosure(bits)
        if e0.hi < e1.lo:
            return _dyadic_between(e0.hi, e1.lo)
        bits *= 2


def curve_pieces(state: ConstructionState, j: int, a: Arc) -> list[Piece]:
    """Split arc ``a`` into pieces on which ``gamma_j`` is one box formula."""
    L = a.length
    cuts = []
    for r in range(0, j + 1):
        for ell in ((r, -r) if r else (0,)):
            if not meets(state.basint(ell), a):
                continue
            c = orbit_point(ell)
            al, de = state.alpha(r), state.delta(r)
            for off in (-al, -de, 0, de, al):
                d = directed_distance(a.start, c.shift(off))
                if d.sign() > 0 and d.cmp(L) < 0:
                    cuts.append(d)
    cuts = sorted(set(cuts), key=_omega_key)
    ts = [OmegaAffine(0, 0)] + cuts + [L]
    out = []
    for t0, t1 in zip(ts, ts[1:]):
        if t0 == t1:
            continue
        rep = a.start.shift(rational_between(t0, t1))
        ell = state.active_box(j, rep)
        if ell is None:
            out.append(Piece(t0, t1, None, "zero", None))
            continue
        b = state.box(ell)
        region = b.region(rep.offset_from(b.center))
        z0 = a.start.shift(t0).offset_from(b.center)
        # the piece lies inside the box projection, so no wrap between ends
        if region == "ball" and z0.cmp(0) == 0:
            z0 = OmegaAffine(0, 0)
        out.append(Piece(t0, t1, ell, region, z0))
    return out


def _piece_interval(p: Piece) -> Scalar:
    z1 = p.z0 + (p.t1 - p.t0)
    return _enc(p.z0).hull(_enc(z1))


def _bisect_eval(f: Callable[[Scalar], Scalar], Z: Scalar, tol: Fraction, depth: int) -> Scalar:
    v = f(Z)
    if v.width() <= tol or depth <= 0 or Z.width() == 0:
        return v
    mid = Z.mid()
    left = Scalar.interval(Z.lo, mid)
    right = Scalar.interval(mid, Z.hi)
    out = _bisect_eval(f, left, tol, depth - 1).hull(_bisect_eval(f, right, tol, depth - 1))
    return out.intersect(v) if out.overlaps(v) else out


def gamma_range(state: ConstructionState, j: int, a: Arc,
                tol: Fraction = Fraction(1, 1 << 60), depth: int = 24) -> Scalar:
    """Certified enclosure of ``gamma_j`` over the closed arc ``a``."""
    if j < 0:
        return ZERO
    vals = []
    with working_precision(state.precision_bits):
        for p in curve_pieces(state, j, a):
            if p.ell is None:
                vals.append(ZERO)
                continue
            b = state.box(p.ell)
            if p.region != "ball":
                vals.append(b.graph(p.z0).hull(b.graph(p.z0 + (p.t1 - p.t0))))
                continue
            Z = _piece_interval(p)
            vals.append(_bisect_eval(lambda zi, b=b: b.graph_on(zi, "ball"), Z, tol, depth))
    return hull_all(vals)


def gamma_slope(state: ConstructionState, j: int, a: Arc,
                tol: Fraction = Fraction(1, 1 << 20), depth: int = 16) -> Scalar:
    """Enclosure of the derivative of ``gamma_j`` over the arc ``a``."""
    if j < 0:
        return ZERO
    vals = []
    with working_precision(state.precision_bits):
        for p in curve_pieces(state, j, a):
            if p.ell is None:
                vals.append(ZERO)
                continue
            b = state.box(p.ell)
            Z = _piece_interval(p)
            if p.region != "ball":
                vals.append(b.slope_on(Z, p.region))
            else:
                vals.append(_bisect_eval(lambda zi, b=b: b.slope_on(zi, "ball"), Z, tol, depth))
    return hull_all(vals)


# ======================================================================
# condition checks
def _tri(flag: bool) -> Tri:
    return Tri.TRUE if flag else Tri.FALSE


def _gap_clause(name: str, arcs: list[tuple[str, Arc]]) -> Clause:
    best = None
    worst = ""
    ok = True
    for x in range(len(arcs)):
        for y in range(x + 1, len(arcs)):
            d, g = arcs_disjoint(arcs[x][1], arcs[y][1])
            if not d:
                ok = False
            if best is None or g.cmp(best) < 0:
                best, worst = g, f"{arcs[x][0]} vs {arcs[y][0]}"
    return Clause(name, _tri(ok), _enc(best) if best is not None else None,
                  "" if ok else worst)


def _separation_clause(name: str, a: Arc, others: list[tuple[str, Arc]]) -> Clause:
    """``a`` is disjoint from each of ``others``."""
    best = None
    bad = []
    for lab, o in others:
        d, g = arcs_disjoint(a, o)
        if not d:
            bad.append(lab)
        if best is None or g.cmp(best) < 0:
            best = g
    return Clause(name, _tri(not bad), _enc(best) if best is not None else None, ",".join(bad))


def _points_clause(name: str, a: Arc, pts: list[int]) -> Clause:
    best = None
    bad = []
    for i in pts:
        p = orbit_point(i)
        if a.contains(p):
            bad.append(i)
            g = OmegaAffine(0, 0)
        else:
            g1 = directed_distance(a.end, p)
            g2 = directed_distance(p, a.start)
            g = g1 if g1.cmp(g2) <= 0 else g2
        if best is None or g.cmp(best) < 0:
            best = g
    return Clause(name, _tri(not bad), _enc(best) if best is not None else None,
                  f"orbit points {bad} inside" if bad else "")


def _boundary_orbit_clause(name: str, state: ConstructionState, ells: list[int]) -> Clause:
    """Endpoints ``ell* +- alpha`` keep a positive distance from the orbit horizon.

    A rational radius can never land on an orbit point; the margin reported is
    the quantitative separation from ``{i* : |i| <= L}``.
    """
    L = state.orbit_horizon
    best = None
    for ell in ells:
        a = state.basint(ell)
        for e in a.boundary():
            for i in range(-L, L + 1):
                d = directed_distance(e, orbit_point(i))
                d = d if d.cmp(Fraction(1, 2)) <= 0 else 1 - d
                if best is None or d.cmp(best) < 0:
                    best = d
    return Clause(name, _tri(best.sign() > 0), _enc(best))


def _containment_clause(name: str, inner: Arc, comps: list[Arc], label: str) -> Clause:
    ok, clr = inside_some(inner, comps)
    return Clause(name, _tri(ok), _enc(clr) if clr is not None else None,
                  "" if ok else f"not inside a component of {label}")


def _range_clause(state: ConstructionState, name: str, j_curve: int, ell: int, j_rad: int,
                  center_value: Scalar, h: Fraction) -> Clause:
    a = state.rot_ball(ell, j_rad)
    rng = gamma_range(state, j_curve, a, tol=h / 64)
    lo_gap = rng.lo - (center_value.hi - h)
    hi_gap = (center_value.lo + h) - rng.hi
    m = Scalar.exact(min(lo_gap, hi_gap))
    return Clause(name, _tri(lo_gap > 0 and hi_gap > 0), m,
                  "" if m.lo > 0 else f"range {rng!r} vs {center_value!r} +- {h}")


def _graph_in_box_clause(state: ConstructionState, name: str, j_curve: int, box: GenericBox) -> Clause:
    """The graph of ``gamma_{j_curve}`` over the box projection lies in the box.

    Sufficient test from a Lipschitz bound ``L`` and the pinned values at the
    center and the corners: ``L delta <= h beta(delta)`` on the central ball and
    ``L`` below both boundary slopes on each flange.
    """
    B = box.projection()
    sl = gamma_slope(state, j_curve, B)
    L = max(abs(sl.lo), abs(sl.hi))
    h = Fraction(1, 1 << box.n)
    with working_precision(state.precision_bits):
        hb = Scalar.exact(h * (1 - box.delta))
        margins = [hb - L * box.delta]
        w = box.alpha - box.delta
        for end in (box.a_plus, box.a_minus):
            s_up = (box.a + hb - end) / w
            s_dn = (end - box.a + hb) / w
            margins.append(s_up - L)
            margins.append(s_dn - L)
        m = margins[0]
        for x in margins[1:]:
            m = smin(m, x)
    ok = m.lo >= 0
    return Clause(name, _tri(ok), m, "" if ok else f"slope bound {float(L):.3g} too large")


def _nested_box_clause(state: ConstructionState, name: str, ell: int, k: int) -> Clause:
    """Box ``ell`` inside one component of the interior of box ``k`` minus its center line.

    Box ``ell`` sits in ``basint_ell x [a - h, a + h]``; the boundaries of box
    ``k`` are piecewise linear, so comparing at arc ends and kinks suffices.
    """
    bl = state.box(ell)
    bk = state.box(k)
    B = bl.projection()
    z1 = B.start.offset_from(bk.center)
    z2 = z1 + B.length
    with working_precision(state.precision_bits):
        mx, mn = bk.lower_upper_range(z1, z2)
        lo_gap = (bl.a - bl.half) - mx
        hi_gap = mn - (bl.a + bl.half)
        m = smin(lo_gap, hi_gap)
    ok = m.lo > 0
    return Clause(name, _tri(ok), m, "" if ok else f"box {ell} not inside box {k}")


def _lens_clause(name: str, box: GenericBox) -> Clause:
    h = Fraction(1, 1 << box.n)
    with working_precision(192):
        hb = Scalar.exact(h * (1 - box.delta))
        ms = []
        for e in (box.a_plus, box.a_minus):
            ms.append(hb - abs(e - box.a))
        ms.append(1 - abs(box.a))
        m = smin(smin(ms[0], ms[1]), ms[2])
    return Clause(name, _tri(m.lo > 0), m)


def _root_clauses(state: ConstructionState) -> Iterator[Clause]:
    lv = state.level(0)
    a0, d0 = lv.alpha, lv.delta
    yield Clause("R1.n0", _tri(lv.n == 1))
    yield Clause("R1.radii", _tri(0 < d0 < a0 < Fraction(1, 2)),
                 Scalar.exact(min(a0 - d0, Fraction(1, 2) - a0, d0)))
    yield _gap_clause("R2.disjoint", [("basint_0", state.basint(0)),
                                      ("B(1*,alpha_0)", state.rot_ball(1, 0)),
                                      ("wbasint_-1", state.rot_ball(-1, 0))])
    yield _points_clause("R2.far_points", state.rot_ball(-1, 0), [2, -2])
    yield _boundary_orbit_clause("R1.boundary_orbit", state, [0])
    b = state.box(0)
    zero = all(v.is_exact() and v.lo == 0 for v in (b.a, b.a_plus, b.a_minus))
    yield Clause("R6.root_heights", _tri(zero))


def _maximal(cands: list[int]) -> tuple[Optional[int], bool]:
    """Index of maximal modulus and whether it is unique."""
    if not cands:
        return None, True
    top = max(abs(c) for c in cands)
    at = [c for c in cands if abs(c) == top]
    return at[0], len(at) == 1


def _level_clauses(state: ConstructionState, j: int) -> Iterator[Clause]:
    lv = state.level(j)
    prev = state.level(j - 1)
    Zj1 = list(range(-(j - 1), j))
    # ---- R.1
    p2 = _pow2(lv.n)
    ok = lv.n > prev.n and 0 < lv.delta < lv.alpha < p2 < prev.delta < prev.alpha
    gaps = [lv.alpha - lv.delta, p2 - lv.alpha, prev.delta - p2, lv.delta]
    yield Clause("R1.chain", _tri(ok), Scalar.exact(min(gaps)))
    yield Clause("R1.n_exceeds_j", _tri(lv.n > j), Scalar.exact(lv.n - j))
    yield _boundary_orbit_clause("R1.boundary_orbit", state, [j, -j])
    # ---- R.2
    four = [("basint_j", state.basint(j)), ("B((j+1)*,alpha_j)", state.rot_ball(j + 1, j)),
            ("wbasint_-j", state.wbasint(-j)), ("wbasint_-(j+1)", state.rot_ball(-(j + 1), j))]
    yield _gap_clause("R2.disjoint", four)
    Zj1p = list(range(-(j + 1), j + 2))
    yield _points_clause("R2.excluded_basint_j", state.basint(j), [i for i in Zj1p if i != j])
    yield _points_clause("R2.excluded_wbasint_-(j+1)", state.rot_ball(-(j + 1), j),
                         [i for i in Zj1p if i != -(j + 1)])
    yield _points_clause("R2.excluded_rot", state.rot_ball(j + 1, j),
                         [i for i in Zj1p if i != j + 1])
    yield _points_clause("R2.far_points", state.rot_ball(-(j + 1), j), [j + 2, -(j + 2)])
    # ---- R.3
    best = None
    bad = []
    targets = [state.basint(j), state.basint(-j)]
    for k in Zj1:
        e = state.rot_ball(k + 1, abs(k))
        for pt in e.boundary():
            for t in targets:
                if t.contains(pt):
                    bad.append(k)
            for t in targets:
                g1 = directed_distance(t.end, pt)
                g2 = directed_distance(pt, t.start)
                g = g1 if g1.cmp(g2) <= 0 else g2
                if best is None or g.cmp(best) < 0:
                    best = g
    yield Clause("R3.rotated_boundaries", _tri(not bad), _enc(best) if best is not None else None,
                 f"k={bad}" if bad else "")
    # ---- R.4
    rb = state.rot_ball(j + 1, j)
    hits = [k for k in Zj1 if meets(rb, state.wbasint(k))]
    k, unique = _maximal(hits)
    if k is None:
        yield Clause("R4.rotated_nesting", Tri.TRUE, None, "no container")
    elif not unique:
        yield Clause("R4.rotated_nesting", Tri.FALSE, None, f"ambiguous containers {hits}")
    elif meets(rb, state.basint(k)):
        yield _containment_clause("R4.rotated_nesting", rb, center_components(state, k), f"box {k}")
    elif k < 0:
        yield _containment_clause("R4.rotated_nesting", rb, wing_components(state, k), f"wings of {k}")
    else:  # pragma: no cover - meeting wbasint_k = basint_k for k >= 0
        yield Clause("R4.rotated_nesting", Tri.FALSE, None, "inconsistent")
    # ---- R.5
    for ell in (j, -(j + 1)):
        w = state.basint(j) if ell == j else state.rot_ball(ell, j)
        hosts = [i for i in Zj1 if state.wbasint(i).contains(orbit_point(ell))]
        m, unique = _maximal(hosts)
        tag = f"R5[{ell}]"
        if m is None:
            yield _separation_clause(tag + ".isolated", w, [(f"w{i}", state.wbasint(i)) for i in Zj1])
            continue
        if not unique:
            yield Clause(tag, Tri.FALSE, None, f"ambiguous hosts {hosts}")
            continue
        others = [(f"w{i}", state.wbasint(i)) for i in Zj1 if abs(i) >= abs(m) and i != m]
        yield _separation_clause(tag + ".separated", w, others)
        yield _containment_clause(tag + ".nested", w, fine_components(state, m), f"winged {m}")
    # ---- R.6 and box sanity
    for ell in (j, -j):
        b = state.box(ell)
        pv = lv.provenance.get(ell)
        tag = f"R6[{ell}]"
        yield _lens_clause(tag + ".lens", b)
        w = state.wbasint(ell)
        others = [i for i in range(-j, j + 1) if i != ell]
        if all(not meets(w, state.wbasint(i)) for i in others):
            zero = all(v.is_exact() and v.lo == 0 for v in (b.a, b.a_plus, b.a_minus))
            yield Clause(tag + ".isolated", _tri(zero and pv is not None and pv.branch == "isolated"))
            continue
        hosts = [i for i in Zj1 if inside_some(w, fine_components(state, i))[0]]
        m, unique = _maximal(hosts)
        if m is None or not unique:
            yield Clause(tag + ".host", Tri.FALSE, None, f"hosts {hosts}")
            continue
        yield Clause(tag + ".host", _tri(pv is not None and pv.m == m), None,
                     "" if pv is not None and pv.m == m else "provenance mismatch")
        # heights agree with the host curve
        c = orbit_point(ell)
        with working_precision(state.precision_bits):
            vals = [state.gamma_value(abs(m), c), state.gamma_value(abs(m), c.shift(b.alpha)),
                    state.gamma_value(abs(m), c.shift(-b.alpha))]
        agree = b.a.overlaps(vals[0]) and b.a_plus.overlaps(vals[1]) and b.a_minus.overlaps(vals[2])
        yield Clause(tag + ".heights", _tri(agree))
        yield _graph_in_box_clause(state, tag + ".graph_in_box", abs(m), b)
        yield _graph_in_box_clause(state, tag + ".graph_in_box_prev", j - 1, b)
        for k in range(-(j - 1), j):
            if abs(k) > abs(m):
                continue
            if inside_some(w, center_components(state, k))[0]:
                yield _nested_box_clause(state, f"{tag}.nested_in[{k}]", ell, k)
    # ---- range condition on the next rotated balls
    for ell in (j + 1, -(j + 1)):
        c = orbit_point(ell)
        cv = state.gamma_value(j - 1, c)
        yield _range_clause(state, f"R2.range[{ell}]", j - 1, ell, j, cv, p2)


def check_conditions(state: ConstructionState, j: int) -> ConditionReport:
    """Evaluate every clause for level ``j`` of ``state``."""
    gen = _root_clauses(state) if j == 0 else _level_clauses(state, j)
    return ConditionReport(j, list(gen))


def _first_failure(state: ConstructionState, j: int) -> Optional[Clause]:
    gen = _root_clauses(state) if j == 0 else _level_clauses(state, j)
    for c in gen:
        if c.status is not Tri.TRUE:
            return c
    return None


# ======================================================================
# parameter search
def _ladder(n: int, steps: int) -> Iterator[Fraction]:
    for t in range(steps):
        for c in range(15, 7, -1):
            yield Fraction(c, 1 << (n + 4 + t))


def _root_level(alpha: Fraction) -> LevelSpec:
    z = ZERO
    box = GenericBox(0, 1, alpha, alpha / 2, z, z, z)
    return LevelSpec(0, 1, alpha, alpha / 2, {0: box}, {0: Provenance("root")})


def init_level0(config: BuildConfig = BuildConfig()) -> ConstructionState:
    """Level 0: ``n_0 = 1``, zero heights, largest ladder radius that separates the first orbit points."""
    L = config.horizon()
    for alpha in _ladder(1, config.ladder_steps):
        st = ConstructionState([_root_level(alpha)], L, config.precision_bits)
        if _first_failure(st, 0) is None:
            return st
    raise ConstructionError(0, "R2.disjoint")


def _host(state: ConstructionState, j: int, ell: int, w: Arc) -> Optional[int]:
    hosts = [i for i in range(-(j - 1), j) if inside_some(w, fine_components(state, i))[0]]
    m, _ = _maximal(hosts)
    return m


def _candidate(state: ConstructionState, j: int, n: int, alpha: Fraction) -> ConstructionState:
    """State with a provisional level ``j`` (heights read from ``gamma_{j-1}``)."""
    delta = alpha / 2
    stub = LevelSpec(j, n, alpha, delta, {})
    trial = state.with_level(stub)
    boxes = {}
    prov = {}
    with working_precision(state.precision_bits):
        for ell in (j, -j):
            c = orbit_point(ell)
            a = state.gamma_value(j - 1, c)
            ap = state.gamma_value(j - 1, c.shift(alpha))
            am = state.gamma_value(j - 1, c.shift(-alpha))
            w = ball(c, alpha if ell >= 0 else state.alpha(j - 1))
            others = [i for i in range(-j, j + 1) if i != ell]
            wr = {i: (ball(orbit_point(i), alpha) if i == j else trial_w(state, i, alpha, j))
                  for i in others}
            if all(not meets(w, wr[i]) for i in others):
                prov[ell] = Provenance("isolated")
                a = ap = am = ZERO
            else:
                m = _host(trial, j, ell, w)
                nested = tuple(k for k in range(-(j - 1), j)
                               if m is not None and abs(k) <= abs(m)
                               and inside_some(w, center_components(trial, k))[0])
                prov[ell] = Provenance("nested", m, nested)
            boxes[ell] = GenericBox(ell, n, alpha, delta, a, ap, am)
    stub.boxes = boxes
    stub.provenance = prov
    return state.with_level(stub)


def trial_w(state: ConstructionState, i: int, alpha_j: Fraction, j: int) -> Arc:
    """Winged projection of box ``i`` (``|i| <= j``) when level ``j`` has radius ``alpha_j``."""
    if i >= 0:
        return ball(orbit_point(i), state.alpha(i) if i < j else alpha_j)
    r = abs(i + 1)
    return ball(orbit_point(i), state.alpha(r))


def extend_level(state: ConstructionState, config: BuildConfig = BuildConfig()) -> ConstructionState:
    """Append the next level, searching the dyadic ladder for certified parameters."""
    j = state.J + 1
    prev = state.level(j - 1)
    n0 = prev.n + 1
    while _pow2(n0) >= prev.delta:
        n0 += 1
    blocker = "none"
    for n in range(n0, n0 + config.n_steps):
        bump = False
        for alpha in _ladder(n, config.ladder_steps):
            trial = _candidate(state, j, n, alpha)
            bad = _first_failure(trial, j)
            if bad is None:
                return trial
            blocker = bad.name
            if ".nested_in[" in bad.name:
                bump = True
                break
        if not bump:
            break
    raise ConstructionError(j, blocker)


def build(config: BuildConfig = BuildConfig()) -> ConstructionState:
    st = init_level0(config)
    for _ in range(config.depth):
        st = extend_level(st, config)
    return st


def gamma_eval(state: ConstructionState, j: int, theta: Angle) -> CurveValue:
    """``gamma_j(theta)`` for ``-1 <= j <= J`` (``gamma_{-1}`` is identically zero)."""
    if j < -1:
        raise ValueError("levels start at -1")
    return state.gamma(j, theta)


# ======================================================================
# sampling the pseudo-curve
def pseudo_curve_sample(state: ConstructionState, j: int, grid_size: int) -> tuple[
        list[tuple[Angle, Scalar]], list[tuple[Angle, Scalar, Scalar]]]:
    """Grid points of ``gamma_j`` (off the excluded set) and the vertical fibers at ``i*``."""
    pts = []
    for k in range(grid_size):
        th = Angle(0, Fraction(k, grid_size))
        cv = state.gamma(j, th)
        if cv.status == EXCLUDED:
            continue
        pts.append((th, cv.value))
    fibers = []
    for i in range(-j, j + 1):
        b = state.box(i)
        fibers.append((orbit_point(i), b.a - b.half, b.a + b.half))
    return pts, fibers


# ======================================================================
# persistence
def _dyadic_str(q: Fraction) -> str:
    """Exact decimal expansion of a dyadic rational."""
    num, den = q.numerator, q.denominator
    e = den.bit_length() - 1
    if den != 1 << e:
        raise ValueError("not a dyadic rational")
    sign = "-" if num < 0 else ""
    num = abs(num)
    digits = str(num * 5 ** e)
    if e == 0:
        return sign + digits
    digits = digits.rjust(e + 1, "0")
    return f"{sign}{digits[:-e]}.{digits[-e:]}"


def _pow2_str(q: Fraction) -> str:
    e = q.denominator.bit_length() - 1
    return f"{q.numerator}/2^{e}"


def _parse_pow2(s: str) -> Fraction:
    p, q = s.split("/2^")
    return Fraction(int(p), 1 << int(q))


def _scalar_doc(x: Scalar) -> dict:
    return {"lo": _dyadic_str(x.lo), "hi": _dyadic_str(x.hi)}


def _scalar_load(d: dict) -> Scalar:
    with working_precision(100000):
        return Scalar.interval(Fraction(d["lo"]), Fraction(d["hi"]))


def state_to_doc(state: ConstructionState) -> dict:
    levels = []
    for lv in state.levels:
        boxes = {}
        for ell, b in lv.boxes.items():
            pv = lv.provenance.get(ell, Provenance("root"))
            boxes[str(ell)] = {
                "a": _scalar_doc(b.a),
                "a_plus": _scalar_doc(b.a_plus),
                "a_minus": _scalar_doc(b.a_minus),
                "provenance": {"branch": pv.branch, "m": pv.m, "nested_in": list(pv.nested_in)},
            }
        levels.append({"j": lv.j, "n": lv.n, "alpha": _pow2_str(lv.alpha),
                       "delta": _pow2_str(lv.delta), "boxes": boxes})
    return {"format": "skewbox-state/1", "omega_tag": state.omega_tag, "J": state.J,
            "L": state.orbit_horizon, "precision_bits": state.precision_bits, "levels": levels}


def state_from_doc(doc: dict, recertify: bool = True) -> ConstructionState:
    if doc.get("omega_tag") != OMEGA_TAG:
        raise ValueError(f"unsupported rotation number {doc.get('omega_tag')!r}")
    levels = []
    for L in doc["levels"]:
        alpha, delta = _parse_pow2(L["alpha"]), _parse_pow2(L["delta"])
        boxes, prov = {}, {}
        for key, bd in L["boxes"].items():
            ell = int(key)
            boxes[ell] = GenericBox(ell, int(L["n"]), alpha, delta, _scalar_load(bd["a"]),
                                    _scalar_load(bd["a_plus"]), _scalar_load(bd["a_minus"]))
            p = bd.get("provenance", {})
            prov[ell] = Provenance(p.get("branch", "root"), p.get("m"), tuple(p.get("nested_in", ())))
        levels.append(LevelSpec(int(L["j"]), int(L["n"]), alpha, delta, boxes, prov))
    if len(levels) != int(doc["J"]) + 1:
        raise ValueError("level count does not match J")
    st = ConstructionState(levels, int(doc["L"]), int(doc["precision_bits"]))
    if recertify:
        for j in range(st.J + 1):
            sub = ConstructionState(st.levels[: j + 1], st.orbit_horizon, st.precision_bits)
            bad = _first_failure(sub, j)
            if bad is not None:
                raise ConstructionError(j, bad.name, "(state file does not re-certify)")
            # a-values must still be the curve values they claim to be
            if j > 0:
                for ell, b in st.levels[j].boxes.items():
                    c = orbit_point(ell)
                    if not b.a.overlaps(sub.gamma_value(j - 1, c)) and b.a.lo != 0:
                        raise ConstructionError(j, "heights", "(state file does not re-certify)")
    return st


def save_state(state: ConstructionState, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_doc(state), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_state(path: str, recertify: bool = True) -> ConstructionState:
    with open(path, encoding="utf-8") as fh:
        return state_from_doc(json.load(fh), recertify)
