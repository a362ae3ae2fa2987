"""CSV and SVG export of curves, boxes, fiber maps and orbit fibers.

CSV rows follow ``theta_lo,theta_hi,value_lo,value_hi,tag`` with exact
decimal expansions of the dyadic enclosure endpoints, so a row can be read
back without rounding.  Box outlines are exported as polylines (one tag per
box, rows in vertex order).  SVG output is static SVG 1.1 with one
``polyline`` element per exported object.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence
from xml.sax.saxutils import quoteattr

from .circle import Angle
from .construction import CERTIFIED, EXCLUDED, ConstructionState, _dyadic_str, pseudo_curve_sample
from .dynamics import fm
from .scalar import Scalar, working_precision

HEADER = ("theta_lo", "theta_hi", "value_lo", "value_hi", "tag")
THETA_WIDTH = Fraction(1, 1 << 60)
FORMATS = ("csv", "svg")


class ExportError(OSError):
    """Writing an export file failed."""


@dataclass(frozen=True)
class Vertex:
    theta: Scalar
    value: Scalar


@dataclass(frozen=True)
class PlotObject:
    """One polyline: ``kind`` selects the SVG style, ``tag`` labels the CSV rows."""

    kind: str
    tag: str
    vertices: tuple[Vertex, ...]


def _theta(t: Angle) -> Scalar:
    return t.enclosure(THETA_WIDTH)


def _lifted(center: Angle, z: Fraction) -> Scalar:
    # unreduced coordinate so outlines stay connected across theta = 0
    c = _theta(center)
    return c + Scalar.exact(z)


# ----------------------------------------------------------------- objects
def curve_objects(state: ConstructionState, j: int, grid_size: int) -> list[PlotObject]:
    pts, fibers = pseudo_curve_sample(state, j, grid_size)
    out = [PlotObject("curve", f"curve:{j}", tuple(Vertex(_theta(t), v) for t, v in pts))]
    for t, lo, hi in fibers:
        th = _theta(t)
        out.append(PlotObject("fiber", f"fiber:{t.k}", (Vertex(th, lo), Vertex(th, hi))))
    return out


def box_outline(state: ConstructionState, ell: int) -> PlotObject:
    b = state.box(ell)
    c = b.center
    h = b.half
    with working_precision(state.precision_bits):
        ed = (1 - Scalar.exact(b.delta)) * h
        upper = [(-b.alpha, b.a_minus), (-b.delta, b.a + ed), (Fraction(0), b.a + h),
                 (b.delta, b.a + ed), (b.alpha, b.a_plus)]
        lower = [(b.delta, b.a - ed), (Fraction(0), b.a - h), (-b.delta, b.a - ed), (-b.alpha, b.a_minus)]
        vs = tuple(Vertex(_lifted(c, z), v) for z, v in upper + lower)
    return PlotObject("box", f"box:{ell}", vs)


def wing_objects(state: ConstructionState, ell: int, per_wing: int) -> list[PlotObject]:
    """The graph of ``gamma_|ell|`` over the two wings of a negative box."""
    if ell >= 0:
        return []
    out = []
    c = state.box(ell).center
    r, w = state.alpha(abs(ell)), state.wradius(ell)
    for side, (z0, z1) in (("left", (-w, -r)), ("right", (r, w))):
        vs = []
        for k in range(per_wing + 1):
            z = z0 + (z1 - z0) * Fraction(k, per_wing)
            cv = state.gamma(abs(ell), c.shift(z))
            if cv.status == EXCLUDED:
                continue
            vs.append(Vertex(_lifted(c, z), cv.value))
        out.append(PlotObject("wing", f"wing:{ell}:{side}", tuple(vs)))
    return out


def boxes_objects(state: ConstructionState, depth: Optional[int] = None, per_wing: int = 32) -> list[PlotObject]:
    J = state.J if depth is None else depth
    if J > state.J:
        raise ValueError(f"depth {J} exceeds the constructed depth {state.J}")
    out = []
    for ell in [0] + [s * r for r in range(1, J + 1) for s in (-1, 1)]:
        out.append(box_outline(state, ell))
        out.extend(wing_objects(state, ell, per_wing))
    return out


def map_objects(state: ConstructionState, m: int, x: Fraction, grid_size: int) -> list[PlotObject]:
    """``theta -> f_m(theta, x)`` over a uniform grid (unresolved points left out)."""
    vs = []
    for k in range(grid_size):
        th = Angle(0, Fraction(k, grid_size))
        mv = fm(state, m, th, x)
        if mv.status != CERTIFIED:
            continue
        vs.append(Vertex(_theta(th), mv.value))
    return [PlotObject("map", f"map:{m}:x={x}", tuple(vs))]


def orbit_objects(state: ConstructionState) -> list[PlotObject]:
    """Fibers over the orbit points ``i*`` with ``|i| <= L``."""
    out = []
    L = state.orbit_horizon
    for i in range(-L, L + 1):
        th = Angle(i, 0)
        cv = state.gamma_limit(th)
        t = _theta(th)
        out.append(PlotObject("fiber", f"orbit:{i}", (Vertex(t, Scalar.exact(cv.value.lo)),
                                                     Vertex(t, Scalar.exact(cv.value.hi)))))
    return out


# ------------------------------------------------------------------ writers
def to_csv(objs: Sequence[PlotObject]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for o in objs:
        for v in o.vertices:
            w.writerow((_dyadic_str(v.theta.lo), _dyadic_str(v.theta.hi),
                        _dyadic_str(v.value.lo), _dyadic_str(v.value.hi), o.tag))
    return buf.getvalue()


_STYLE = {
    "box": 'fill="#9ecae1" fill-opacity="0.5" stroke="#3182bd" stroke-width="0.6"',
    "wing": 'fill="none" stroke="#e6550d" stroke-width="2.5"',
    "curve": 'fill="none" stroke="#222222" stroke-width="0.5"',
    "fiber": 'fill="none" stroke="#31a354" stroke-width="1.2"',
    "map": 'fill="none" stroke="#756bb1" stroke-width="0.6"',
}


def to_svg(objs: Sequence[PlotObject], width: int = 1000, height: int = 500,
           y_range: tuple[float, float] = (-1.1, 1.1)) -> str:
    y0, y1 = y_range

    def px(v: Vertex) -> str:
        x = float(v.theta.mid()) * width
        y = (y1 - float(v.value.mid())) / (y1 - y0) * height
        return f"{x:.3f},{y:.3f}"

    lines = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    for o in objs:
        pts = " ".join(px(v) for v in o.vertices)
        lines.append(f'<polyline id={quoteattr(o.tag)} points="{pts}" {_STYLE[o.kind]}/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write(objs: Sequence[PlotObject], fmt: str, path: str) -> None:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    text = to_csv(objs) if fmt == "csv" else to_svg(objs)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e.strerror or e}") from e


def export_curve(state: ConstructionState, j: int, fmt: str, path: str, grid_size: int = 1024) -> None:
    write(curve_objects(state, j, grid_size), fmt, path)


def export_boxes(state: ConstructionState, fmt: str, path: str, depth: Optional[int] = None) -> None:
    write(boxes_objects(state, depth), fmt, path)


def export_map(state: ConstructionState, m: int, fmt: str, path: str, x: Fraction = Fraction(0),
               grid_size: int = 512) -> None:
    write(map_objects(state, m, Fraction(x), grid_size), fmt, path)


def export_orbit(state: ConstructionState, fmt: str, path: str) -> None:
    write(orbit_objects(state), fmt, path)
