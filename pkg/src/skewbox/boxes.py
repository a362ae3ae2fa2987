"""Generic boxes: the lens-shaped regions around orbit points and their graphs.

A box is described by its center ``ell*``, an exponent ``n`` (fiber half-height
``2**-n`` at the center), radii ``delta < alpha`` and three heights ``a``,
``a_plus``, ``a_minus``.  Over the delta-ball the fibers are
``a -+ 2**-n * beta(z)`` and the graph is ``a + (-1)**ell * 2**-n * phi(z)``
with ``z = theta - ell*``; on the two flanges everything is affine and closes
up at ``(ell* +- alpha, a_+-)``.

Points are addressed by their exact signed offset ``z`` from the center.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Union

from .circle import Angle, Arc, OmegaAffine, ball, orbit_point
from .scalar import PrecisionError, Scalar, hull_all, pi, smax, smin

Offset = Union[OmegaAffine, Fraction, int]


class DomainError(ValueError):
    """Point outside the domain of a box function."""


class SingularityError(ValueError):
    """Evaluation at (or across) the excluded center of a box."""


def beta(x: Scalar) -> Scalar:
    """``1 - |x|`` on [-1, 1]."""
    if x.lo < -1 or x.hi > 1:
        raise DomainError("beta is defined on [-1, 1]")
    return 1 - abs(x)


def phi(x: Scalar) -> Scalar:
    """``(1 - |x|)**2 * sin(pi / x)`` on [-1, 1] minus 0."""
    if x.lo < -1 or x.hi > 1:
        raise DomainError("phi is defined on [-1, 1]")
    if not x.excludes_zero():
        raise SingularityError("phi is singular at 0")
    return (1 - abs(x)).square() * (pi() / x).sin()


def phi_prime(x: Scalar) -> Scalar:
    """Derivative of :func:`phi` (away from 0)."""
    if not x.excludes_zero():
        raise SingularityError("phi is singular at 0")
    p = pi()
    s = x.sign()
    u = p / x
    b = 1 - abs(x)
    return (-2 * s) * b * u.sin() - b.square() * (u.cos() * (p / x.square()))


def _enc(z: Offset) -> Scalar:
    if isinstance(z, OmegaAffine):
        return z.enclosure()
    return Scalar.exact(Fraction(z))


def _as_affine(z: Offset) -> OmegaAffine:
    return z if isinstance(z, OmegaAffine) else OmegaAffine(0, Fraction(z))


@dataclass(frozen=True)
class FiberInterval:
    """The vertical interval ``[m(theta), M(theta)]`` of a box over an angle."""

    lo: Scalar
    hi: Scalar
    degenerate: bool = False

    def length(self) -> Scalar:
        return self.hi - self.lo

    def contains_value(self, y: Scalar) -> bool:
        """``y`` overlaps the interval (certified membership is not decidable in general)."""
        return self.lo.hull(self.hi).overlaps(y) and not (
            y.certainly_lt(self.lo) or self.hi.certainly_lt(y))


@dataclass(frozen=True)
class GenericBox:
    ell: int
    n: int
    alpha: Fraction
    delta: Fraction
    a: Scalar
    a_plus: Scalar
    a_minus: Scalar

    @property
    def center(self) -> Angle:
        return orbit_point(self.ell)

    @property
    def sign(self) -> int:
        return 1 if self.ell % 2 == 0 else -1

    @property
    def half(self) -> Scalar:
        """Fiber half-height ``2**-n`` at the center."""
        return Scalar.exact(Fraction(1, 1 << self.n))

    def projection(self) -> Arc:
        return ball(self.center, self.alpha)

    def offset(self, theta: Angle) -> OmegaAffine:
        return theta.offset_from(self.center)

    # ---------------------------------------------------------- pointwise
    def region(self, z: Offset) -> str:
        """'ball', 'right', 'left' (flanges) or raise if outside the projection."""
        za = _as_affine(z)
        az = abs(za)
        if az.cmp(self.alpha) > 0:
            raise DomainError("point outside the box projection")
        if az.cmp(self.delta) <= 0:
            return "ball"
        return "right" if za.sign() > 0 else "left"

    @cached_property
    def _edges(self) -> dict:
        return {s: self._compute_edge(s) for s in (1, -1)}

    def edge_values(self, side: int) -> tuple[Scalar, Scalar, Scalar]:
        """Graph, upper and lower boundary at offset ``side*delta``."""
        return self._edges[side]

    _edge_values = edge_values

    def _compute_edge(self, side: int) -> tuple[Scalar, Scalar, Scalar]:
        d = Scalar.exact(self.delta)
        ph = phi(d) if side > 0 else -phi(d)
        g = self.a + (ph * self.sign).scale2(-self.n)
        h = beta(d).scale2(-self.n)
        return g, self.a + h, self.a - h

    def graph(self, z: Offset) -> Scalar:
        """The box graph at offset ``z`` (``z != 0``)."""
        reg = self.region(z)
        za = _as_affine(z)
        if reg == "ball":
            if za == 0:
                raise SingularityError("the box graph is not defined at the center")
            return self.a + (phi(_enc(za)) * self.sign).scale2(-self.n)
        side = 1 if reg == "right" else -1
        g_edge, _, _ = self._edge_values(side)
        end = self.a_plus if side > 0 else self.a_minus
        return _lerp(g_edge, end, self.delta, self.alpha, abs(za))

    def bounds(self, z: Offset) -> FiberInterval:
        """Fiber ``[m, M]`` of the closed box at offset ``z``."""
        reg = self.region(z)
        za = _as_affine(z)
        if reg == "ball":
            h = beta(_enc(abs(za))).scale2(-self.n)
            return FiberInterval(self.a - h, self.a + h)
        side = 1 if reg == "right" else -1
        _, up, dn = self._edge_values(side)
        end = self.a_plus if side > 0 else self.a_minus
        az = abs(za)
        if az == self.alpha:
            return FiberInterval(end, end, True)
        return FiberInterval(_lerp(dn, end, self.delta, self.alpha, az),
                             _lerp(up, end, self.delta, self.alpha, az))

    # ---------------------------------------------------------- ranges
    def _flange_ends(self, side: int) -> tuple[Scalar, Scalar, Scalar, Scalar]:
        g_edge, up, dn = self._edge_values(side)
        end = self.a_plus if side > 0 else self.a_minus
        return g_edge, up, dn, end

    def graph_on(self, zi: Scalar, region: str) -> Scalar:
        """Enclosure of the graph over the offsets ``zi`` (all inside ``region``)."""
        if region == "ball":
            if not zi.excludes_zero():
                raise SingularityError("range query contains the center")
            return self.a + (phi(zi) * self.sign).scale2(-self.n)
        side = 1 if region == "right" else -1
        g_edge, _, _, end = self._flange_ends(side)
        return _lerp_s(g_edge, end, self.delta, self.alpha, zi * side)

    def slope_on(self, zi: Scalar, region: str) -> Scalar:
        """Enclosure of d(graph)/dz over the offsets ``zi``."""
        if region == "ball":
            return (phi_prime(zi) * self.sign).scale2(-self.n)
        side = 1 if region == "right" else -1
        g_edge, _, _, end = self._flange_ends(side)
        return (end - g_edge) / (self.alpha - self.delta) * side

    def bounds_on(self, zi: Scalar, region: str) -> tuple[Scalar, Scalar]:
        """Enclosures of ``m`` and ``M`` over the offsets ``zi``."""
        if region == "ball":
            h = beta(abs(zi)).scale2(-self.n)
            return self.a - h, self.a + h
        side = 1 if region == "right" else -1
        _, up, dn, end = self._flange_ends(side)
        t = zi * side
        return (_lerp_s(dn, end, self.delta, self.alpha, t),
                _lerp_s(up, end, self.delta, self.alpha, t))

    def lower_upper_range(self, z1: OmegaAffine, z2: OmegaAffine) -> tuple[Scalar, Scalar]:
        """(max of m, min of M) over offsets in ``[z1, z2]``.

        Both boundary curves are piecewise linear with kinks at ``0`` and
        ``+-delta``; extremes sit at the ends or at kinks.
        """
        pts = [z1, z2]
        for k in (OmegaAffine(0, -self.delta), OmegaAffine(0, 0), OmegaAffine(0, self.delta)):
            if z1.cmp(k) < 0 and k.cmp(z2) < 0:
                pts.append(k)
        b = [self.bounds(p) for p in pts]
        mx = b[0].lo
        mn = b[0].hi
        for f in b[1:]:
            mx = smax(mx, f.lo)
            mn = smin(mn, f.hi)
        return mx, mn


def _lerp(y0: Scalar, y1: Scalar, t0: Fraction, t1: Fraction, t: OmegaAffine) -> Scalar:
    """Affine interpolation from ``(t0, y0)`` to ``(t1, y1)`` at ``t``."""
    if t == t0:
        return y0
    if t == t1:
        return y1
    w = (_enc(t) - Scalar.exact(t0)) / Scalar.exact(t1 - t0)
    return y0 + (y1 - y0) * w


def _lerp_s(y0: Scalar, y1: Scalar, t0: Fraction, t1: Fraction, t: Scalar) -> Scalar:
    w = (t - Scalar.exact(t0)) / Scalar.exact(t1 - t0)
    return y0 + (y1 - y0) * w


def box_graph(box: GenericBox, theta: Angle) -> Scalar:
    return box.graph(box.offset(theta))


def box_boundary(box: GenericBox, theta: Angle) -> FiberInterval:
    return box.bounds(box.offset(theta))


__all__ = [
    "DomainError",
    "SingularityError",
    "PrecisionError",
    "FiberInterval",
    "GenericBox",
    "beta",
    "phi",
    "phi_prime",
    "box_graph",
    "box_boundary",
    "hull_all",
]
