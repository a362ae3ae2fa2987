"""Depth stratification of the winged boxes and the wing combinatorics.

``dep(ell)`` counts the winged projections that strictly contain
``wbasint_ell``; ``D_m`` is the set of indices of depth ``m``.  The
projections of one stratum are pairwise disjoint, so a point of ``S^1`` lies
over at most one box of each depth.  On the wings of a negative box a point
may still be covered by a deeper box; the least such depth is ``led``.

All membership questions are exact (angles are exact), so the only source of
uncertainty is the finite horizon: points that unconstructed boxes might
reach are reported as ``horizon_limited``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .boxes import FiberInterval
from .circle import Angle, arc_inside
from .construction import ConstructionState, HorizonLimited
from .scalar import Scalar, working_precision

IN_IB = "in_IB"
WING_INTERIOR = "in_wing_interior"
WING_FLAT = "in_wing_flat"
OUTSIDE = "outside"
HORIZON_LIMITED = "horizon_limited"


@dataclass(frozen=True)
class DepthTable:
    """Depth of every constructed index and the constructed part of each stratum."""

    J: int
    dep: dict[int, int]
    containers: dict[int, tuple[int, ...]]

    def stratum(self, m: int) -> list[int]:
        return sorted((i for i, d in self.dep.items() if d == m), key=lambda i: (abs(i), i))

    @property
    def max_depth(self) -> int:
        return max(self.dep.values())

    def depth_complete(self, ell: int) -> bool:
        # every potential container has smaller modulus, so it is constructed
        return abs(ell) <= self.J


@dataclass(frozen=True)
class WingLocation:
    theta: Angle
    m: int
    b: Optional[int]
    classification: str
    led: Optional[int] = None
    deep: Optional[int] = None
    # the tips b* +- alpha of a negative box are both in IB_m and in W_m
    also_wing: bool = False


@dataclass(frozen=True)
class WingInterval:
    lo: Scalar
    hi: Scalar

    @property
    def degenerate(self) -> bool:
        return self.lo is self.hi


def depth_table(state: ConstructionState) -> DepthTable:
    """Build (once per state) the depth of every constructed index."""
    cached = getattr(state, "_depth_table", None)
    if cached is not None and cached.J == state.J:
        return cached
    J = state.J
    idx = [0] + [s * r for r in range(1, J + 1) for s in (1, -1)]
    dep: dict[int, int] = {}
    cont: dict[int, tuple[int, ...]] = {}
    for ell in idx:
        w = state.wbasint(ell)
        inside = []
        for i in idx:
            if abs(i) >= abs(ell):
                continue
            ok, _ = arc_inside(w, state.wbasint(i))
            if ok:
                inside.append(i)
        cont[ell] = tuple(inside)
        dep[ell] = len(inside)
    table = DepthTable(J, dep, cont)
    state._depth_table = table
    return table


def depth(state: ConstructionState, ell: int) -> int:
    if abs(ell) > state.J:
        raise ValueError(f"index {ell} is beyond the constructed depth {state.J}")
    return depth_table(state).dep[ell]


def depth_class(state: ConstructionState, m: int) -> list[int]:
    """``D_m`` restricted to constructed indices (empty list when absent)."""
    return depth_table(state).stratum(m)


def mu(state: ConstructionState, m: int) -> Optional[int]:
    """``min |i|`` over ``D_m``; None when no constructed index has depth ``m``.

    Unconstructed indices have larger modulus than any constructed one, so a
    nonempty constructed stratum already gives the exact value.
    """
    d = depth_class(state, m)
    return min(abs(i) for i in d) if d else None


def stratum_member(state: ConstructionState, m: int, theta: Angle) -> Optional[int]:
    """The constructed ``i`` in ``D_m`` with ``theta`` in ``wbasint_i``."""
    for i in depth_class(state, m):
        if state.wbasint(i).contains(theta):
            return i
    return None


def _ib_member(state: ConstructionState, j: int, theta: Angle) -> Optional[int]:
    for i in depth_class(state, j):
        if state.basint(i).contains(theta):
            return i
    return None


def locate(state: ConstructionState, m: int, theta: Angle) -> WingLocation:
    """Classify ``theta`` against the stratum ``D_m``."""
    b = stratum_member(state, m, theta)
    clear = state.horizon_clear(theta)
    if b is None:
        return WingLocation(theta, m, None, OUTSIDE if clear else HORIZON_LIMITED)
    if state.basint(b).contains(theta):
        tip = b < 0 and not state.obasint(b).contains(theta)
        return WingLocation(theta, m, b, IN_IB, also_wing=tip)
    top = depth_table(state).max_depth
    for j in range(m + 1, top + 1):
        k = _ib_member(state, j, theta)
        if k is not None:
            cls = WING_INTERIOR if state.obasint(k).contains(theta) else WING_FLAT
            return WingLocation(theta, m, b, cls, led=j, deep=k)
    if not clear:
        return WingLocation(theta, m, b, HORIZON_LIMITED)
    return WingLocation(theta, m, b, WING_FLAT)


def wing_bounds(state: ConstructionState, m: int, theta: Angle,
                loc: Optional[WingLocation] = None) -> WingInterval:
    """``[lambda_m, tau_m]`` at a wing point (or a tip of a negative box)."""
    loc = loc or locate(state, m, theta)
    if loc.classification == HORIZON_LIMITED:
        raise HorizonLimited(f"wing structure of {theta!r} not resolved at depth {state.J}")
    if loc.b is None or loc.b >= 0 or not (loc.classification in (WING_INTERIOR, WING_FLAT)
                                          or loc.also_wing):
        raise ValueError(f"{theta!r} is not in the wings of stratum {m}")
    if loc.classification == WING_INTERIOR:
        fib: FiberInterval = state.winged_bounds(loc.deep, theta)
        return WingInterval(fib.lo, fib.hi)
    with working_precision(state.precision_bits):
        g = state.gamma_value(abs(loc.b), theta)
    return WingInterval(g, g)
