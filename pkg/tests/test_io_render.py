import json
import warnings
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from packlab.descartes import generate, root_quadruple_bounded
from packlab.errors import InvalidInput
from packlab.io_render import (
    CIRCLE_HEADER,
    PALETTE,
    CircleTable,
    EmptyScene,
    Layer,
    Scene,
    SceneCircle,
    dumps_report,
    emit_csv,
    emit_svg,
    packing_scene,
    parse_circles_csv,
    parse_series_csv,
    points_scene,
)
from packlab.stats import CountSeries

SVG = "{http://www.w3.org/2000/svg}"


def test_csv_empty_list():
    empty = CircleTable(np.array([], np.int64), np.array([], complex), np.array([]), np.array([], np.int64))
    assert emit_csv(empty) == CIRCLE_HEADER + "\n"


def test_csv_t3_run():
    text = emit_csv(generate(root_quadruple_bounded(), 3))
    lines = text.split("\n")
    assert text.endswith("\n") and "\r" not in text
    assert len(text.splitlines()) == 6
    assert lines[0] == CIRCLE_HEADER
    assert lines[1].startswith("-1,0,0,1,")


def test_csv_roundtrip_exact():
    run = generate(root_quadruple_bounded(), 300)
    table = CircleTable.from_run(run)
    back = parse_circles_csv(emit_csv(run))
    assert back == table
    assert emit_csv(back) == emit_csv(run)


def test_csv_rejects_bad_input():
    with pytest.raises(InvalidInput):
        parse_circles_csv("k,x\n1,2\n")
    with pytest.raises(InvalidInput):
        parse_circles_csv(CIRCLE_HEADER + "\n1,2,3\n")
    with pytest.raises(InvalidInput):
        parse_circles_csv(CIRCLE_HEADER + "\nx,0,0,1,0\n")


def test_series_csv_roundtrip():
    s = CountSeries([1.5, 2 ** 0.5 * 3, 10.0], [1, 4, 9])
    back = parse_series_csv(emit_csv(s))
    assert np.array_equal(back.t, s.t) and np.array_equal(back.n, s.n)


def test_json_17_digits():
    text = dumps_report({"x": 0.1, "n": 3, "v": [1 / 3, 2.0], "ok": True, "nested": {"s": "a"}})
    data = json.loads(text)
    assert data["x"] == 0.1 and data["v"][0] == 1 / 3 and data["n"] == 3
    assert "0.10000000000000001" in text and "0.33333333333333331" in text
    assert text.endswith("\n")


def test_svg_empty_scene_warns():
    with pytest.warns(EmptyScene):
        text = emit_svg(Scene((-1, 1, -1, 1), []))
    root = ET.fromstring(text)
    assert root.get("version") == "1.1"
    assert [el.tag for el in root.iter()] == [SVG + "svg", SVG + "rect"]


def test_svg_unit_circle():
    scene = Scene((-2, 2, -2, 2), [Layer("c", [SceneCircle(0j, 1.0)])])
    root = ET.fromstring(emit_svg(scene))
    circles = list(root.iter(SVG + "circle"))
    assert len(circles) == 1 and circles[0].get("r") == "1.000000"


def test_svg_root_quadruple_deterministic():
    # the four root circles (-1, 2, 2, 3) are the word-length-0 rows
    t = CircleTable.from_run(generate(root_quadruple_bounded(), 3))
    m = t.word_len == 0
    root_only = CircleTable(t.curvature[m], t.centers[m], t.radii[m], t.word_len[m])
    assert sorted(root_only.curvature.tolist()) == [-1, 2, 2, 3]
    scene = packing_scene(root_only)
    a, b = emit_svg(scene), emit_svg(packing_scene(root_only))
    assert a == b
    assert len(list(ET.fromstring(a).iter(SVG + "circle"))) == 4


def test_svg_y_axis_points_up_and_palette():
    scene = Scene((-1, 1, -1, 1), [Layer("c", [SceneCircle(0.25 + 0.5j, 0.1, color=9)])])
    el = next(ET.fromstring(emit_svg(scene)).iter(SVG + "circle"))
    assert el.get("cy") == "-0.500000" and el.get("cx") == "0.250000"
    assert el.get("stroke") == PALETTE[1]


def test_svg_canonical_order_ignores_insertion_order():
    cs = [SceneCircle(complex(i % 3, i), 0.1, sort_key=float(i % 2)) for i in range(6)]
    a = emit_svg(Scene((-5, 5, -5, 10), [Layer("c", cs)]))
    b = emit_svg(Scene((-5, 5, -5, 10), [Layer("c", cs[::-1])]))
    assert a == b


def test_scene_viewport_validation():
    with pytest.raises(InvalidInput):
        Scene((1, 1, 0, 1), [])


def test_points_scene():
    scene = points_scene(np.array([0, 1 + 1j, complex(np.inf, 0)]))
    assert len(scene.layers[0].points) == 2
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        emit_svg(scene)
