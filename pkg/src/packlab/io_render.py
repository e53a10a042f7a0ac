"""Deterministic emitters: SVG scenes, circle/series CSV and JSON reports."""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput

CIRCLE_HEADER = "curvature,center_re,center_im,radius,word_len"
SERIES_HEADER = "t,n"

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
)


class EmptyScene(UserWarning):
    pass


def fmt17(x: float) -> str:
    return "%.17g" % x


# --------------------------------------------------------------------------
# CSV

@dataclass
class CircleTable:
    curvature: np.ndarray
    centers: np.ndarray
    radii: np.ndarray
    word_len: np.ndarray

    def __len__(self):
        return len(self.curvature)

    @property
    def k(self) -> np.ndarray:
        return self.curvature

    @classmethod
    def from_run(cls, run) -> "CircleTable":
        return cls(run.k.astype(np.int64), run.centers, run.radii, run.word_len.astype(np.int64))

    def __eq__(self, other):
        if not isinstance(other, CircleTable):
            return NotImplemented
        return (
            np.array_equal(self.curvature, other.curvature)
            and np.array_equal(self.centers, other.centers)
            and np.array_equal(self.radii, other.radii)
            and np.array_equal(self.word_len, other.word_len)
        )


def emit_circles_csv(circles) -> str:
    """Circle list CSV, one row per circle in the given (canonical) order."""
    t = circles if isinstance(circles, CircleTable) else CircleTable.from_run(circles)
    out = io.StringIO()
    out.write(CIRCLE_HEADER + "\n")
    for k, c, r, n in zip(t.curvature, t.centers, t.radii, t.word_len):
        out.write(f"{int(k)},{fmt17(c.real)},{fmt17(c.imag)},{fmt17(r)},{int(n)}\n")
    return out.getvalue()


def parse_circles_csv(text: str) -> CircleTable:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CIRCLE_HEADER:
        raise InvalidInput("circle CSV must start with header " + CIRCLE_HEADER)
    k, re, im, r, n = [], [], [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise InvalidInput(f"line {lineno}: expected 5 fields")
        try:
            k.append(int(parts[0]))
            re.append(float(parts[1]))
            im.append(float(parts[2]))
            r.append(float(parts[3]))
            n.append(int(parts[4]))
        except ValueError as exc:
            raise InvalidInput(f"line {lineno}: {exc}") from exc
    return CircleTable(
        np.array(k, dtype=np.int64),
        np.array(re, dtype=float) + 1j * np.array(im, dtype=float),
        np.array(r, dtype=float),
        np.array(n, dtype=np.int64),
    )


def emit_series_csv(series) -> str:
    out = io.StringIO()
    out.write(SERIES_HEADER + "\n")
    for t, n in zip(series.t, series.n):
        out.write(f"{fmt17(t)},{int(n)}\n")
    return out.getvalue()


def parse_series_csv(text: str):
    from .stats import CountSeries

    lines = text.splitlines()
    if not lines or lines[0].strip() != SERIES_HEADER:
        raise InvalidInput("series CSV must start with header " + SERIES_HEADER)
    rows = [ln.split(",") for ln in lines[1:] if ln.strip()]
    try:
        return CountSeries([float(a) for a, _ in rows], [int(b) for _, b in rows])
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc


def emit_csv(obj) -> str:
    """Series (anything with ``t`` and ``n``) or circle list, by type."""
    if hasattr(obj, "t") and hasattr(obj, "n"):
        return emit_series_csv(obj)
    return emit_circles_csv(obj)


# --------------------------------------------------------------------------
# JSON with 17-digit floats

def _json_value(v, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(v, bool) or v is None:
        return {True: "true", False: "false", None: "null"}[v]
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return '"nan"'
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        s = fmt17(v)
        return s if any(ch in s for ch in ".en") else s + ".0"
    if isinstance(v, str):
        import json

        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{_json_value(str(k), indent, level + 1)}: {_json_value(x, indent, level + 1)}"
                 for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        if len(v) == 0:
            return "[]"
        items = [pad + _json_value(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps_report(obj, indent: int = 2) -> str:
    """JSON text with every float printed to 17 significant digits."""
    return _json_value(obj, indent, 0) + "\n"


# --------------------------------------------------------------------------
# SVG

@dataclass(frozen=True)
class SceneCircle:
    center: complex
    radius: float
    stroke_width: float = 0.002
    fill: bool = False
    color: int = 0
    sort_key: float = 0.0


@dataclass(frozen=True)
class ScenePoint:
    z: complex
    size: float = 0.002
    color: int = 0


@dataclass
class Layer:
    name: str
    circles: list[SceneCircle] = field(default_factory=list)
    points: list[ScenePoint] = field(default_factory=list)


@dataclass
class Scene:
    viewport: tuple[float, float, float, float]  # x0, x1, y0, y1
    layers: list[Layer] = field(default_factory=list)

    def __post_init__(self):
        x0, x1, y0, y1 = self.viewport
        if not (x1 > x0 and y1 > y0):
            raise InvalidInput("viewport must have positive area")


def _f6(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def emit_svg(scene: Scene) -> str:
    """SVG 1.1 text.  The y axis points up (mathematical orientation)."""
    x0, x1, y0, y1 = scene.viewport
    w, h = x1 - x0, y1 - y0
    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_f6(x0)} {_f6(-y1)} {_f6(w)} {_f6(h)}">\n'
    )
    out.write(
        f'<rect x="{_f6(x0)}" y="{_f6(-y1)}" width="{_f6(w)}" height="{_f6(h)}" '
        'fill="white" stroke="none"/>\n'
    )
    if not any(layer.circles or layer.points for layer in scene.layers):
        warnings.warn("scene has no elements; emitting an empty viewport", EmptyScene, stacklevel=2)
    for layer in scene.layers:
        out.write(f'<g id="{layer.name}">\n')
        for c in sorted(layer.circles, key=lambda c: (c.sort_key, c.center.real, c.center.imag, c.radius)):
            color = PALETTE[c.color % len(PALETTE)]
            fill = color if c.fill else "none"
            out.write(
                f'<circle cx="{_f6(c.center.real)}" cy="{_f6(-c.center.imag)}" r="{_f6(c.radius)}" '
                f'fill="{fill}" stroke="{color}" stroke-width="{_f6(c.stroke_width)}"/>\n'
            )
        for p in sorted(layer.points, key=lambda p: (p.z.real, p.z.imag)):
            color = PALETTE[p.color % len(PALETTE)]
            out.write(
                f'<circle cx="{_f6(p.z.real)}" cy="{_f6(-p.z.imag)}" r="{_f6(p.size)}" '
                f'fill="{color}" stroke="none"/>\n'
            )
        out.write("</g>\n")
    out.write("</svg>\n")
    return out.getvalue()


def auto_viewport(centers, radii, pad: float = 0.05) -> tuple[float, float, float, float]:
    centers = np.asarray(centers, dtype=complex)
    radii = np.asarray(radii, dtype=float)
    if not len(centers):
        return (-1.0, 1.0, -1.0, 1.0)
    x0 = float(np.min(centers.real - radii))
    x1 = float(np.max(centers.real + radii))
    y0 = float(np.min(centers.imag - radii))
    y1 = float(np.max(centers.imag + radii))
    m = pad * max(x1 - x0, y1 - y0, 1e-9)
    return (x0 - m, x1 + m, y0 - m, y1 + m)


def packing_scene(circles, viewport=None, stroke_width: float | None = None) -> Scene:
    """Scene with the bounding circle in its own layer and the rest colored
    by word length mod 8."""
    t = circles if isinstance(circles, CircleTable) else CircleTable.from_run(circles)
    if viewport is None or viewport == "auto":
        viewport = auto_viewport(t.centers, t.radii)
    sw = stroke_width if stroke_width is not None else 0.002 * (viewport[1] - viewport[0])
    outer, inner = Layer("bounding"), Layer("circles")
    for k, c, r, n in zip(t.curvature, t.centers, t.radii, t.word_len):
        item = SceneCircle(complex(c), float(r), sw, False, int(n), float(k))
        (outer if k < 0 else inner).circles.append(item)
    return Scene(tuple(float(v) for v in viewport), [outer, inner])


def points_scene(points, viewport=None, size: float | None = None) -> Scene:
    pts = np.asarray(points, dtype=complex)
    pts = pts[np.isfinite(pts)]
    if viewport is None or viewport == "auto":
        viewport = auto_viewport(pts, np.zeros(len(pts)))
    sz = size if size is not None else 0.001 * (viewport[1] - viewport[0])
    layer = Layer("limit_set", points=[ScenePoint(complex(z), sz) for z in pts])
    return Scene(tuple(float(v) for v in viewport), [layer])
