"""Stratified angle samples.

The extremes of the construction sit at a few loci: box corners, the edges
of the delta-balls, the extrema of ``sin(pi/z)`` at ``z = 1/(k + 1/2)`` and
the immediate neighbourhood of orbit points.  Samplers return exact angles
tagged with the locus they came from, so every run with the same seed is
reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .circle import Angle, orbit_point
from .construction import ConstructionState

# random angles are dyadic with this many bits
RANDOM_BITS = 48


@dataclass(frozen=True)
class Sample:
    theta: Angle
    tag: str


def uniform_grid(size: int) -> list[Sample]:
    return [Sample(Angle(0, Fraction(k, size)), "grid") for k in range(size)]


def random_angles(count: int, seed: int) -> list[Sample]:
    rng = random.Random(seed)
    return [Sample(Angle(0, Fraction(rng.getrandbits(RANDOM_BITS), 1 << RANDOM_BITS)), "random")
            for _ in range(count)]


def sine_extrema(delta: Fraction, count: int) -> list[Fraction]:
    """Offsets ``1/(k + 1/2)`` not exceeding ``delta``, nearest to ``delta`` first."""
    k0 = max(0, int(1 / delta - Fraction(1, 2)))
    while Fraction(2, 2 * k0 + 1) > delta:
        k0 += 1
    return [Fraction(2, 2 * k + 1) for k in range(k0, k0 + count)]


def box_loci(state: ConstructionState, ell: int, per_locus: int = 4) -> list[Sample]:
    """Corners, delta-edges, wing ends, sine extrema and orbit neighbourhood of box ``ell``."""
    b = state.box(ell)
    c = b.center
    out: list[Sample] = []
    for s in (1, -1):
        out.append(Sample(c.shift(s * b.alpha), "corner"))
        out.append(Sample(c.shift(s * b.delta), "delta-edge"))
        if ell < 0:
            out.append(Sample(c.shift(s * state.wradius(ell)), "wing-end"))
        for z in sine_extrema(b.delta, per_locus):
            out.append(Sample(c.shift(s * z), "sine-extremum"))
        for t in range(per_locus):
            out.append(Sample(c.shift(s * b.delta / (1 << (8 + 8 * t))), "orbit-neighbourhood"))
    return out


def targeted(state: ConstructionState, per_locus: int = 4) -> list[Sample]:
    J = state.J
    out: list[Sample] = []
    for ell in [0] + [s * r for r in range(1, J + 1) for s in (1, -1)]:
        out.extend(box_loci(state, ell, per_locus))
    return out


def inside_arc(center: Angle, radius: Fraction, count: int, seed: int, tag: str = "inside") -> list[Sample]:
    """``count`` angles ``center + t*radius`` with ``t`` uniform in ``[-1, 1]`` (exact dyadics)."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        t = Fraction(rng.getrandbits(RANDOM_BITS + 1), 1 << RANDOM_BITS) - 1
        out.append(Sample(center.shift(radius * t), tag))
    return out


def stratified(state: ConstructionState, count: int, seed: int = 0,
               grid_fraction: Fraction = Fraction(1, 4)) -> list[Sample]:
    """About ``count`` samples: targeted loci (at most half), a uniform grid and random angles."""
    tgt = targeted(state)
    if len(tgt) > count // 2:
        step = -(-len(tgt) // max(1, count // 2))
        tgt = tgt[::step]
    rest = max(0, count - len(tgt))
    grid = int(rest * grid_fraction)
    return dedupe(tgt + uniform_grid(grid) + random_angles(rest - grid, seed))


def dedupe(samples: Iterable[Sample]) -> list[Sample]:
    seen = set()
    out = []
    for s in samples:
        k = s.theta.key()
        if k in seen:
            continue
        seen.add(k)
        out.append(s)
    return out


def resolvable(state: ConstructionState, samples: Iterable[Sample]) -> Iterator[Sample]:
    """Samples off the orbit whose classification the finite construction settles."""
    for s in samples:
        if s.theta.q == 0:
            continue
        if state.horizon_clear(s.theta):
            yield s


def take(it: Iterable[Sample], count: int) -> list[Sample]:
    out = []
    for s in it:
        if len(out) >= count:
            break
        out.append(s)
    return out


def orbit_samples(J: int) -> list[Sample]:
    return [Sample(orbit_point(i), "orbit") for i in range(-J, J + 1)]

