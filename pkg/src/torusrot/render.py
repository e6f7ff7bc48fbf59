"""SVG figures of rotation-set reports.

Output is a fixed 800x800 SVG 1.1 document in rotation-vector units with
10% padding around everything drawn.  All coordinates are printed with a
fixed number of decimals, so identical reports give identical bytes.
"""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from . import report as rpt

SIZE = 800
PAD = 0.10

# (report key, legend label, fill, stroke, filled)
LAYERS = [
    ("estimate.outer.vertices", "rotation set (outer)", "none", "#1f4e9c", False),
    ("estimate.inner.vertices", "rotation set (inner)", "#8fb3e8", "#1f4e9c", True),
    ("theorem.image.outer.vertices", "L-hat image (outer)", "none", "#b3541e", False),
    ("theorem.image.inner.vertices", "L-hat image (inner)", "#f2b28c", "#b3541e", True),
    ("theorem.zaction.outer.vertices", "Z^3 estimate (outer)", "none", "#2e7d32", False),
    ("theorem.zaction.inner.vertices", "Z^3 estimate (inner)", "#a5d6a7", "#2e7d32", True),
]


def _nice_step(span: float) -> float:
    raw = span / 8.0
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def _clip_line(u, v, w, x0, x1, y0, y1):
    """Endpoints of ``{ux + vy + w = 0}`` inside the box, or None."""
    pts = []
    if v != 0:
        for x in (x0, x1):
            y = -(u * x + w) / v
            if y0 <= y <= y1:
                pts.append((x, y))
    if u != 0:
        for y in (y0, y1):
            x = -(v * y + w) / u
            if x0 <= x <= x1:
                pts.append((x, y))
    pts = sorted(set(pts))
    if len(pts) < 2:
        return None
    return pts[0], pts[-1]


def render_svg(raw: dict[str, str]) -> str:
    polys = []
    for key, label, fill, stroke, filled in LAYERS:
        if key in raw and raw[key]:
            polys.append((rpt.parse_vertices(raw[key]), label, fill, stroke, filled))
    if not polys:
        raise ValueError("report holds no polygons to draw")
    line = None
    if raw.get("hypothesis.line", "at-infinity") != "at-infinity":
        line = rpt.parse_numbers(raw["hypothesis.line"])

    allv = np.concatenate([p[0] for p in polys])
    lo, hi = allv.min(0), allv.max(0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 0.1))
    centre = 0.5 * (lo + hi)
    half = 0.5 * span * (1 + 2 * PAD)
    x0, x1 = centre[0] - half, centre[0] + half
    y0, y1 = centre[1] - half, centre[1] + half

    def sx(x):
        return (x - x0) / (x1 - x0) * SIZE

    def sy(y):
        return SIZE - (y - y0) / (y1 - y0) * SIZE

    def fmt(a):
        return f"{a:.3f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]

    step = _nice_step(x1 - x0)
    out.append('<g stroke="#dddddd" stroke-width="1" font-family="sans-serif" font-size="11" fill="#555555">')
    k = math.ceil(x0 / step)
    while k * step <= x1:
        x = k * step
        out.append(f'<line x1="{fmt(sx(x))}" y1="0" x2="{fmt(sx(x))}" y2="{SIZE}"/>')
        out.append(f'<text x="{fmt(sx(x) + 2)}" y="{SIZE - 4}" stroke="none">{x:.4g}</text>')
        k += 1
    k = math.ceil(y0 / step)
    while k * step <= y1:
        y = k * step
        out.append(f'<line x1="0" y1="{fmt(sy(y))}" x2="{SIZE}" y2="{fmt(sy(y))}"/>')
        out.append(f'<text x="4" y="{fmt(sy(y) - 2)}" stroke="none">{y:.4g}</text>')
        k += 1
    out.append("</g>")

    legend = []
    for verts, label, fill, stroke, filled in polys:
        if len(verts) == 1:
            out.append(
                f'<circle cx="{fmt(sx(verts[0, 0]))}" cy="{fmt(sy(verts[0, 1]))}" r="5" '
                f'fill="{stroke}" class="marker"/>'
            )
        elif len(verts) == 2:
            out.append(
                f'<line x1="{fmt(sx(verts[0, 0]))}" y1="{fmt(sy(verts[0, 1]))}" '
                f'x2="{fmt(sx(verts[1, 0]))}" y2="{fmt(sy(verts[1, 1]))}" stroke="{stroke}" stroke-width="3"/>'
            )
        else:
            pts = " ".join(f"{fmt(sx(x))},{fmt(sy(y))}" for x, y in verts)
            opacity = ' fill-opacity="0.6"' if filled else ""
            out.append(f'<polygon points="{pts}" fill="{fill}"{opacity} stroke="{stroke}" stroke-width="1.5"/>')
        legend.append((label, stroke))

    if line is not None:
        seg = _clip_line(*line, x0, x1, y0, y1)
        if seg is not None:
            (ax, ay), (bx, by) = seg
            out.append(
                f'<line x1="{fmt(sx(ax))}" y1="{fmt(sy(ay))}" x2="{fmt(sx(bx))}" y2="{fmt(sy(by))}" '
                'stroke="#c62828" stroke-width="2" stroke-dasharray="8,4" class="infinity-line"/>'
            )
            legend.append(("line sent to infinity by L", "#c62828"))
        else:
            legend.append(("line sent to infinity by L (outside view)", "#c62828"))

    out.append('<g font-family="sans-serif" font-size="13">')
    for i, (label, colour) in enumerate(legend):
        y = 20 + 18 * i
        out.append(f'<rect x="12" y="{y - 10}" width="12" height="12" fill="{colour}"/>')
        out.append(f'<text x="30" y="{y}">{escape(label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_file(report_path: str | Path, out_path: str | Path) -> None:
    svg = render_svg(rpt.read(report_path))
    Path(out_path).write_text(svg)
