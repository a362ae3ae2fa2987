"""Fiber dynamics: the box maps ``g_i``, the fiber maps ``f_m`` and the skew products.

Every fiber map ``f_{m,theta}`` is continuous, piecewise affine and
non-increasing on ``[-2, 2]``, so it is stored as a list of knots
``(x, y)``; evaluation interpolates and sup-norm comparisons reduce to knots.
Knots carry interval enclosures; two knots whose abscissae cannot be
separated are merged into their hull, which still encloses the graph.

The slope factor ``kappa_i`` of a negative box is the running infimum of
``kappa~_i`` outward from the delta-edge.  With ``u = |theta - i*|`` and
``S = sin(pi/u)`` the two ratios in ``kappa~_i`` reduce to

    C_1 * beta(u) * (1 + t*beta(u)*S) / (alpha - u)
    C_2 * beta(u) * (1 - t*beta(u)*S) / (alpha - u)

(``t`` a sign, ``C_1, C_2`` constants of the flange), and the infimum is
found by interval branch and bound.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .boxes import DomainError
from .circle import Angle, OmegaAffine
from .construction import (
    CERTIFIED,
    EXCLUDED,
    HORIZON_LIMITED,
    ConstructionState,
    HorizonLimited,
)
from .scalar import PrecisionError, Scalar, pi, smax, smin, working_precision
from .strata import (
    HORIZON_LIMITED as LOC_LIMITED,
    IN_IB,
    OUTSIDE,
    WING_FLAT,
    WING_INTERIOR,
    depth_table,
    locate,
    mu,
    stratum_member,
    wing_bounds,
)

TWO = Scalar.exact(2)
MTWO = Scalar.exact(-2)
ONE = Scalar.exact(1)

Knot = tuple[Scalar, Scalar]


@dataclass(frozen=True)
class MapValue:
    value: Scalar
    status: str


@dataclass(frozen=True)
class FiberMapSpec:
    """Knot description of ``f_{m,theta}``; ``knots`` is empty when unresolved."""

    theta: Angle
    m: int
    knots: tuple[Knot, ...]
    status: str

    @property
    def resolved(self) -> bool:
        return bool(self.knots)

    def __call__(self, x: Scalar | Fraction | int) -> Scalar:
        x = Scalar.coerce(x)
        if x.is_exact() and x.lo == -2:
            return TWO
        if x.is_exact() and x.lo == 2:
            return MTWO
        if not self.knots:
            return MTWO.hull(TWO)
        return evaluate_knots(self.knots, x)


def evaluate_knots(knots: Sequence[Knot], x: Scalar) -> Scalar:
    """Enclosure of the piecewise affine interpolant at ``x``."""
    if x.lo < knots[0][0].lo or x.hi > knots[-1][0].hi:
        raise DomainError("abscissa outside the knot range")
    out: Optional[Scalar] = None
    for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
        if x.hi < x0.lo or x.lo > x1.hi:
            continue
        span = y0.hull(y1)
        dx = x1 - x0
        if dx.lo > 0:
            lo = max(x.lo, x0.lo)
            hi = min(x.hi, x1.hi)
            xc = Scalar.interval(lo, hi)
            v = y0 + (y1 - y0) * ((xc - x0) / dx)
            v = v.intersect(span) if v.overlaps(span) else span
        else:
            v = span
        out = v if out is None else out.hull(v)
    for xk, yk in knots:
        if xk.overlaps(x):
            out = yk if out is None else out.hull(yk)
    assert out is not None
    return out


def merge_knots(knots: Sequence[Knot]) -> tuple[Knot, ...]:
    """Merge consecutive knots whose abscissae are not certainly increasing."""
    out: list[Knot] = []
    for x, y in knots:
        if out and not out[-1][0].certainly_lt(x):
            px, py = out[-1]
            out[-1] = (px.hull(x), py.hull(y))
        else:
            out.append((x, y))
    return tuple(out)


def knot_sup_distance(f: FiberMapSpec, h: FiberMapSpec) -> Scalar:
    """Enclosure of ``sup |f - h|`` on ``[-2, 2]``.

    Both maps are piecewise affine, so the difference is affine between
    consecutive abscissae of the union of knots and the sup sits at a knot.
    """
    if not (f.resolved and h.resolved):
        raise HorizonLimited("both fiber maps must be resolved")
    best = Scalar.exact(0)
    for x, _ in f.knots + h.knots:
        xc = x.intersect(MTWO.hull(TWO))
        d = abs(f(xc) - h(xc))
        best = smax(best, d)
    return best


# ======================================================================
# kappa
def _flange_constants(state: ConstructionState, i: int, side: int):
    b = state.box(i)
    g_e, up, dn = b.edge_values(side)
    h = Scalar.exact(Fraction(1, 1 << b.n))
    w = Scalar.exact(b.alpha - b.delta)
    c1 = h * w / (up - g_e)
    c2 = h * w / (g_e - dn)
    sigma_next = 1 if (i + 1) % 2 == 0 else -1
    return c1, c2, sigma_next * side, b.alpha, b.delta


def _kt_eval(consts, u: Scalar) -> tuple[Scalar, Scalar]:
    """(r1, r2) enclosures at offsets ``u`` (``delta <= u < alpha``)."""
    c1, c2, t, alpha, _ = consts
    bu = 1 - u
    S = (pi() / u).sin()
    den = Scalar.exact(alpha) - u
    q = bu / den if den.lo > 0 else None
    f1 = 1 + (bu * S) * t
    f2 = 1 - (bu * S) * t
    if q is None:
        # lower bound only: den in (0, den.hi]
        base = bu.lower() / Scalar.exact(den.hi)
        lo1 = (c1 * f1 * base).lower()
        lo2 = (c2 * f2 * base).lower()
        inf = Scalar.interval(0, 1 << 40)
        return lo1.hull(lo1 + inf), lo2.hull(lo2 + inf)
    return c1 * f1 * q, c2 * f2 * q


def kappa_tilde_offset(state: ConstructionState, i: int, z: Scalar | OmegaAffine) -> Scalar:
    """``kappa~_i`` at signed offset ``z`` from ``i*`` (``delta <= |z| < alpha``)."""
    if i >= 0:
        raise ValueError("kappa is defined for negative boxes only")
    with working_precision(state.precision_bits):
        zs = z.enclosure(state.precision_bits) if isinstance(z, OmegaAffine) else z
        side = 1 if zs.lo > 0 else -1
        if not zs.excludes_zero():
            raise PrecisionError("offset enclosure straddles the center")
        b = state.box(i)
        u = abs(zs)
        if u.hi >= b.alpha or u.lo < b.delta:
            raise DomainError("kappa~ is defined for delta <= |z| < alpha")
        if u.is_exact() and u.lo == b.delta:
            return ONE
        r1, r2 = _kt_eval(_flange_constants(state, i, side), u)
        return smin(smin(ONE, r1), r2)


def kappa_tilde(state: ConstructionState, i: int, theta: Angle) -> Scalar:
    b = state.box(i)
    return kappa_tilde_offset(state, i, theta.offset_from(b.center))


@dataclass
class _KappaCache:
    lo: Scalar
    hi: Scalar
    witness: Fraction  # a point t with F(t) <= hi


def _kappa_search(state: ConstructionState, i: int, side: int, top: Fraction,
                  tol: Fraction, max_cells: int = 200000) -> _KappaCache:
    """Branch and bound for ``inf F`` over offsets ``[delta, top]``."""
    consts = _flange_constants(state, i, side)
    alpha, delta = consts[3], consts[4]

    def f_cell(a: Fraction, b: Fraction) -> Fraction:
        r1, r2 = _kt_eval(consts, Scalar.interval(a, b))
        return min(Fraction(1), r1.lo, r2.lo)

    def f_point(t: Fraction) -> Fraction:
        if t == delta:
            return Fraction(1)
        r1, r2 = _kt_eval(consts, Scalar.exact(t))
        return min(Fraction(1), r1.hi, r2.hi)

    best, witness = Fraction(1), delta
    if top < alpha:
        v = f_point(top)
        if v < best:
            best, witness = v, top
    heap = [(f_cell(delta, top), delta, top)]
    cells = 0
    while heap:
        lb, a, b = heap[0]
        if best - lb <= tol:
            break
        heapq.heappop(heap)
        cells += 1
        if cells > max_cells:
            raise PrecisionError(f"kappa search for box {i} did not converge")
        mid = (a + b) / 2
        if mid < alpha:
            v = f_point(mid)
            if v < best:
                best, witness = v, mid
        for c, d in ((a, mid), (mid, b)):
            clb = f_cell(c, d)
            if clb < best:
                heapq.heappush(heap, (clb, c, d))
    lo = heap[0][0] if heap else best
    lo = min(lo, best)
    return _KappaCache(Scalar.exact(max(lo, Fraction(0))), Scalar.exact(best), witness)


def kappa_tolerance(state: ConstructionState, i: int) -> Fraction:
    return Fraction(1, 1 << (state.n(abs(i + 1)) + 4 + 40))


def kappa_offset(state: ConstructionState, i: int, z: OmegaAffine) -> Scalar:
    """``kappa_i`` at signed offset ``z`` (``delta <= |z| <= alpha``)."""
    if i >= 0:
        raise ValueError("kappa is defined for negative boxes only")
    b = state.box(i)
    u = abs(z)
    if u.cmp(b.delta) < 0 or u.cmp(b.alpha) > 0:
        raise DomainError("kappa is defined for delta <= |z| <= alpha")
    if u == b.delta:
        return ONE
    side = 1 if z.sign() > 0 else -1
    tol = kappa_tolerance(state, i)
    key = (i, side)
    with working_precision(state.precision_bits):
        glob = state._kappa_cache.get(key)
        if glob is None:
            glob = _kappa_search(state, i, side, b.alpha, tol)
            state._kappa_cache[key] = glob
        ue = u.enclosure(state.precision_bits)
        if glob.witness <= ue.lo:
            # the witness lies in [delta, u], the infimum over the whole flange is a lower bound
            return Scalar.interval(glob.lo.lo, glob.hi.hi)
        # u before the global witness: search [delta, u] directly
        lo_part = _kappa_search(state, i, side, ue.lo, tol)
        hi_part = _kappa_search(state, i, side, ue.hi, tol) if ue.hi < b.alpha else glob
        return Scalar.interval(min(hi_part.lo.lo, lo_part.lo.lo), lo_part.hi.hi)


def kappa(state: ConstructionState, i: int, theta: Angle) -> Scalar:
    return kappa_offset(state, i, theta.offset_from(state.box(i).center))


# ======================================================================
# box maps
def _pow2s(k: int) -> Scalar:
    return Scalar.exact(Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k))


def g_knots(state: ConstructionState, i: int, theta: Angle) -> tuple[Knot, ...]:
    """Knots of ``g_{i,theta}`` on ``I_{i,theta}``."""
    b = state.box(i)
    z = theta.offset_from(b.center)
    u = abs(z)
    rt = theta.rotate()
    with working_precision(state.precision_bits):
        if i >= 0:
            if i + 1 > state.J:
                raise HorizonLimited(f"g_{i} needs box {i + 1}")
            if u.cmp(b.alpha) > 0:
                raise DomainError(f"{theta!r} is outside the projection of box {i}")
            nb = state.box(i + 1)
            fib = b.bounds(z)
            m, M = fib.lo, fib.hi
            if u.cmp(nb.delta) <= 0:
                s = _pow2s(b.n - nb.n)
                return merge_knots([(m, nb.a + s * (b.a - m)), (M, nb.a + s * (b.a - M))])
            c = state.gamma_value(i + 1, rt)
            if u.cmp(nb.alpha) <= 0:
                nf = nb.bounds(rt.offset_from(nb.center))
                G = state.gamma_value(i, theta)
                return merge_knots([(m, nf.hi), (G, c), (M, nf.lo)])
            return merge_knots([(m, c), (M, c)])
        # negative boxes
        if u.cmp(state.wradius(i)) > 0:
            raise DomainError(f"{theta!r} is outside the winged projection of box {i}")
        nb = state.box(i + 1)
        s = _pow2s(b.n - nb.n)
        if u.cmp(b.delta) <= 0:
            fib = b.bounds(z)
            m, M = fib.lo, fib.hi
            return merge_knots([(m, s * (b.a - m) + nb.a), (M, s * (b.a - M) + nb.a)])
        G = state.gamma_value(abs(i), theta)
        c = state.gamma_value(abs(i + 1), rt)
        if u.cmp(b.alpha) < 0:
            fib = b.bounds(z)
            m, M = fib.lo, fib.hi
            k = kappa_offset(state, i, z)
            sk = s * k
            return merge_knots([(m, sk * (G - m) + c), (G, c), (M, sk * (G - M) + c)])
        return ((G, c),)


def g(state: ConstructionState, i: int, theta: Angle, x: Scalar | Fraction | int) -> Scalar:
    """``g_{i,theta}(x)`` for ``x`` in ``I_{i,theta}``."""
    x = Scalar.coerce(x)
    knots = g_knots(state, i, theta)
    lo, hi = knots[0][0], knots[-1][0]
    if x.certainly_lt(lo) or hi.certainly_lt(x):
        raise DomainError("x outside the fiber interval of the box")
    if len(knots) == 1:
        return knots[0][1]
    with working_precision(state.precision_bits):
        xc = Scalar.interval(max(x.lo, lo.lo), min(x.hi, hi.hi)) if x.lo < lo.lo or x.hi > hi.hi else x
        return evaluate_knots(knots, xc)


# ======================================================================
# fiber maps
def _join(status: str, other: str) -> str:
    return CERTIFIED if status == CERTIFIED and other == CERTIFIED else HORIZON_LIMITED


def _unresolved(theta: Angle, m: int) -> FiberMapSpec:
    return FiberMapSpec(theta, m, (), HORIZON_LIMITED)


def _pinned(core: Sequence[Knot]) -> list[Knot]:
    return [(MTWO, TWO)] + list(core) + [(TWO, MTWO)]


def f0_map(state: ConstructionState, theta: Angle, eps: Fraction = Fraction(1, 1 << 10)) -> FiberMapSpec:
    b = stratum_member(state, 0, theta)
    try:
        if b is not None:
            core = g_knots(state, b, theta)
            return FiberMapSpec(theta, 0, merge_knots(_pinned(core)), CERTIFIED)
        if not state.horizon_clear(theta):
            return _unresolved(theta, 0)
        cv = state.gamma_limit(theta.rotate(), eps)
        if cv.status == EXCLUDED:
            return _unresolved(theta, 0)
        return FiberMapSpec(theta, 0, merge_knots(_pinned([(Scalar.exact(0), cv.value)])), cv.status)
    except HorizonLimited:
        return _unresolved(theta, 0)


def _conjugate_left(prev: FiberMapSpec, cut: Scalar, target: Scalar) -> list[Knot]:
    """Knots of ``A (f_prev - 2) + 2`` on ``[-2, cut]`` with ``A`` pinning ``cut`` to ``target``."""
    A = (2 - target) / (2 - prev(cut))
    # a knot that cannot be separated from the cut is merged into it later
    out = [(x, A * (y - 2) + 2) for x, y in prev.knots[1:] if not cut.certainly_le(x)]
    return [(MTWO, TWO)] + out + [(cut, target)]


def _conjugate_right(prev: FiberMapSpec, cut: Scalar, target: Scalar) -> list[Knot]:
    """Knots of ``B (f_prev + 2) - 2`` on ``[cut, 2]`` with ``B`` pinning ``cut`` to ``target``."""
    B = (2 + target) / (2 + prev(cut))
    out = [(x, B * (y + 2) - 2) for x, y in prev.knots[:-1] if not x.certainly_le(cut)]
    return [(cut, target)] + out + [(TWO, MTWO)]


def _assemble(prev: FiberMapSpec, core: Sequence[Knot]) -> tuple[Knot, ...]:
    lo_x, lo_y = core[0]
    hi_x, hi_y = core[-1]
    left = _conjugate_left(prev, lo_x, lo_y)
    right = _conjugate_right(prev, hi_x, hi_y)
    return merge_knots(left[:-1] + list(core) + right[1:])


def fiber_map(state: ConstructionState, m: int, theta: Angle,
              eps: Fraction = Fraction(1, 1 << 10), branch: Optional[str] = None) -> FiberMapSpec:
    """Knot list of ``f_{m,theta}``.

    ``branch`` forces the box ("ib") or the wing ("wing") formula at points
    where both apply; by default the box formula is used there.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return f0_map(state, theta, eps)
    prev = fiber_map(state, m - 1, theta, eps)
    if not prev.resolved:
        return _unresolved(theta, m)
    loc = locate(state, m, theta)
    if loc.classification == OUTSIDE:
        return FiberMapSpec(theta, m, prev.knots, prev.status)
    if loc.classification == LOC_LIMITED:
        return _unresolved(theta, m)
    use_wing = loc.classification in (WING_INTERIOR, WING_FLAT) or (branch == "wing" and loc.also_wing)
    if branch == "wing" and not use_wing:
        raise ValueError(f"{theta!r} is not in the wings of stratum {m}")
    try:
        with working_precision(state.precision_bits):
            i = loc.b
            if not use_wing:
                core = g_knots(state, i, theta)
            else:
                wi = wing_bounds(state, m, theta, loc)
                c = state.gamma_value(abs(i + 1), theta.rotate())
                core = [(wi.lo, c)] if wi.lo is wi.hi else [(wi.lo, c), (wi.hi, c)]
            knots = _assemble(prev, core)
    except HorizonLimited:
        return _unresolved(theta, m)
    return FiberMapSpec(theta, m, knots, prev.status)


def f0(state: ConstructionState, theta: Angle, x, eps: Fraction = Fraction(1, 1 << 10)) -> MapValue:
    return fm(state, 0, theta, x, eps)


def fm(state: ConstructionState, m: int, theta: Angle, x, eps: Fraction = Fraction(1, 1 << 10)) -> MapValue:
    x = Scalar.coerce(x)
    if x.lo < -2 or x.hi > 2:
        raise DomainError("x outside [-2, 2]")
    spec = fiber_map(state, m, theta, eps)
    with working_precision(state.precision_bits):
        v = spec(x)
    exact_end = x.is_exact() and abs(x.lo) == 2
    return MapValue(v, CERTIFIED if exact_end else spec.status)


def apply_T(state: ConstructionState, m: int, point: tuple[Angle, Scalar], eps: Fraction = Fraction(1, 1 << 10)
            ) -> tuple[Angle, MapValue]:
    """``T_m(theta, x) = (theta + omega, f_m(theta, x))``."""
    theta, x = point
    return theta.rotate(), fm(state, m, theta, x, eps)


def deepest_stratum(state: ConstructionState, theta: Angle) -> int:
    """Largest ``m`` with ``theta`` over a constructed box of depth ``m`` (0 if none)."""
    top = depth_table(state).max_depth
    for m in range(top, -1, -1):
        if stratum_member(state, m, theta) is not None:
            return m
    return 0


def f_limit(state: ConstructionState, theta: Angle, x, eps: Fraction = Fraction(1, 1 << 10)) -> MapValue:
    """Enclosure of the limit fiber map ``f(theta, x)``.

    When no unconstructed box can reach ``theta`` the sequence ``f_{m,theta}``
    is constant from the deepest stratum over ``theta`` on, so that map is the
    limit.  Otherwise ``f_m`` is widened by ``4 * 2**-mu_m`` for the smallest
    constructed ``m`` with that tail at most ``eps``.
    """
    eps = Fraction(eps)
    x = Scalar.coerce(x)
    if x.is_exact() and abs(x.lo) == 2:
        return MapValue(Scalar.exact(-x.lo), CERTIFIED)
    if state.horizon_clear(theta):
        return fm(state, deepest_stratum(state, theta), theta, x, eps)
    top = depth_table(state).max_depth
    m = 0
    while m < top and 4 * Fraction(1, 1 << mu(state, m)) > eps:
        m += 1
    tail = 4 * Fraction(1, 1 << mu(state, m))
    mv = fm(state, m, theta, x, eps)
    status = mv.status if tail <= eps else HORIZON_LIMITED
    with working_precision(state.precision_bits):
        v = mv.value.widen(tail).intersect(MTWO.hull(TWO))
    return MapValue(v, status)
