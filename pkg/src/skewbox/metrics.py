"""Sampled estimators of the sup pseudo-metric and of the Hausdorff distance.

A supremum over a residual set cannot be certified from finitely many
samples, so both estimators return the maximum over the samples: a certified
enclosure whose lower end is a true lower bound of the metric.  An analytic
upper bound may be attached for comparison; exceeding it is a hard failure.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .boxes import DomainError
from .circle import Angle, cyl_distance
from .construction import EXCLUDED, ConstructionState
from .sampling import Sample, targeted, uniform_grid
from .scalar import Scalar, smax, smin, working_precision

Point = tuple[Angle, Scalar]

# slack for the float prefilter of the nearest-point search; float errors
# on the unit cylinder are many orders of magnitude below it
_FLOAT_SLACK = 1e-9


@dataclass(frozen=True)
class MetricEstimate:
    lower: Scalar
    sample_count: int
    grid: str
    witness: Optional[Angle] = None
    upper_reference: Optional[Fraction] = None

    @property
    def violates_reference(self) -> bool:
        """The certified lower bound exceeds the stated analytic bound."""
        return self.upper_reference is not None and self.lower.lo > self.upper_reference


def dinf_sampled(state: ConstructionState, jA: int, jB: int, grid_size: int,
                 include_targeted: bool = True,
                 upper_reference: Optional[Fraction] = None) -> MetricEstimate:
    """Max of ``|gamma_jA - gamma_jB|`` over a grid off both excluded sets."""
    for j in (jA, jB):
        if j > state.J or j < -1:
            raise ValueError(f"level {j} is not constructed")
    if jA == jB:
        return MetricEstimate(Scalar.exact(0), 0, "identical levels", None, upper_reference)
    samples: list[Sample] = uniform_grid(grid_size)
    if include_targeted:
        samples += targeted(state)
    best = Scalar.exact(0)
    witness = None
    count = 0
    with working_precision(state.precision_bits):
        for s in samples:
            a = state.gamma(jA, s.theta)
            b = state.gamma(jB, s.theta)
            if a.status == EXCLUDED or b.status == EXCLUDED:
                continue
            count += 1
            d = abs(a.value - b.value)
            if witness is None or d.lo > best.lo:
                witness = s.theta
            best = smax(best, d)
    desc = f"uniform {grid_size}" + (" + targeted loci" if include_targeted else "")
    return MetricEstimate(best, count, desc, witness, upper_reference)


def _float_point(p: Point) -> tuple[float, float, float]:
    x = p[1]
    return float(p[0]), float(x.mid()), float(x.width()) / 2


def _circ(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def _directed(A: Sequence[Point], B: Sequence[Point]) -> tuple[Scalar, Optional[Angle]]:
    fb = sorted((_float_point(p) + (k,) for k, p in enumerate(B)), key=lambda t: t[0])
    keys = [t[0] for t in fb]
    n = len(fb)
    out: Optional[Scalar] = None
    witness = None
    for p in A:
        ta, xa, ra = _float_point(p)
        pos = bisect.bisect_left(keys, ta)
        best_up = float("inf")
        cands: list[tuple[float, int, bool]] = []
        # walk outward in both directions; stop once the angular gap alone
        # exceeds the best upper bound found so far
        for step in (1, -1):
            for t in range(n):
                k = (pos + t) % n if step > 0 else (pos - 1 - t) % n
                tb, xb, rb, idx = fb[k]
                c = _circ(ta, tb)
                if c - _FLOAT_SLACK > best_up:
                    break
                d = max(c, abs(xa - xb))
                lo = d - ra - rb - _FLOAT_SLACK
                up = d + ra + rb + _FLOAT_SLACK
                best_up = min(best_up, up)
                # vertical gap clearly dominant: the distance is |x - y|
                vert = abs(xa - xb) - ra - rb - _FLOAT_SLACK > c + _FLOAT_SLACK
                cands.append((lo, idx, vert))
        m: Optional[Scalar] = None
        for lo, idx, vert in cands:
            if lo > best_up:
                continue
            q = B[idx]
            # equal enclosures only identify the points when exact or shared
            if q[0] == p[0] and (q[1] is p[1] or (p[1].is_exact() and q[1].same_as(p[1]))):
                d = Scalar.exact(0)
            else:
                d = abs(p[1] - q[1]) if vert else cyl_distance(p, q)
            m = d if m is None else smin(m, d)
        assert m is not None
        if out is None or m.lo > out.lo:
            witness = p[0]
        out = m if out is None else smax(out, m)
    assert out is not None
    return out, witness


def hausdorff_sampled(setA: Iterable[Point], setB: Iterable[Point]) -> MetricEstimate:
    """Symmetric max-min distance between two finite point sets on the cylinder."""
    A = list(setA)
    B = list(setB)
    if not A or not B:
        raise DomainError("Hausdorff distance needs two nonempty sets")
    ab, wa = _directed(A, B)
    ba, wb = _directed(B, A)
    h = smax(ab, ba)
    return MetricEstimate(h, len(A) + len(B), f"{len(A)} x {len(B)} points",
                          wa if ab.lo >= ba.lo else wb)
