import csv
import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest

from skewbox.export import (
    HEADER,
    ExportError,
    boxes_objects,
    export_boxes,
    export_curve,
    export_map,
    export_orbit,
)


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_curve_csv_level0(tmp_path, state2):
    p = tmp_path / "c.csv"
    export_curve(state2, 0, "csv", str(p), grid_size=256)
    r = rows(p)
    assert tuple(r[0]) == HEADER
    curve = [x for x in r[1:] if x[4] == "curve:0"]
    assert len(curve) == 255  # the orbit point 0 is excluded
    for t0, t1, v0, v1, _ in curve:
        assert Fraction(t0) <= Fraction(t1)
        assert -Fraction(1, 2) <= Fraction(v0) <= Fraction(v1) <= Fraction(1, 2)
    # the fiber over 0* has length 2 * 2^-1
    fib = [x for x in r[1:] if x[4] == "fiber:0"]
    assert Fraction(fib[1][2]) - Fraction(fib[0][2]) == 1


def test_boxes_csv_depth2(tmp_path, state2):
    p = tmp_path / "b.csv"
    export_boxes(state2, "csv", str(p), depth=2)
    tags = {x[4] for x in rows(p)[1:]}
    assert {t for t in tags if t.startswith("box:")} == {f"box:{e}" for e in (0, 1, -1, 2, -2)}
    assert {"wing:-1:left", "wing:-2:right"} <= tags
    box = [x for x in rows(p)[1:] if x[4] == "box:1"]
    assert len(box) == 9


def test_svg_parses(tmp_path, state2):
    for what, fn in (("gamma", lambda p: export_curve(state2, 2, "svg", p, 128)),
                     ("boxes", lambda p: export_boxes(state2, "svg", p)),
                     ("map", lambda p: export_map(state2, 1, "svg", p, Fraction(1, 2), 64)),
                     ("orbit", lambda p: export_orbit(state2, "svg", p))):
        p = str(tmp_path / f"{what}.svg")
        fn(p)
        root = ET.parse(p).getroot()
        assert root.tag.endswith("svg") and root.get("version") == "1.1"
        assert root.findall("{http://www.w3.org/2000/svg}polyline")


def test_orbit_and_map_csv(tmp_path, state2):
    p = tmp_path / "o.csv"
    export_orbit(state2, "csv", str(p))
    tags = {x[4] for x in rows(p)[1:]}
    assert len(tags) == 2 * state2.orbit_horizon + 1
    p = tmp_path / "m.csv"
    export_map(state2, 1, "csv", str(p), Fraction(-2), 32)
    assert all(x[2] == x[3] == "2" for x in rows(p)[1:])


def test_export_errors(tmp_path, state2):
    with pytest.raises(ExportError) as ei:
        export_orbit(state2, "csv", str(tmp_path / "missing" / "x.csv"))
    assert "missing" in str(ei.value)
    with pytest.raises(ValueError):
        export_orbit(state2, "png", str(tmp_path / "x.png"))
    with pytest.raises(ValueError):
        boxes_objects(state2, depth=5)
