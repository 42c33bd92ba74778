"""Standalone SVG figures of rect surfaces, paths and leaves.

Exact coordinates are rounded to 12 decimals for display only; nothing here
feeds back into computations.  Output is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .cylinders import horizontal_cylinders

__all__ = ["SvgScene", "emit_svg", "render_svg", "layout_cells", "surface_scene",
           "vh_path_scene", "leaf_scene"]

PALETTE = ["#cfe3f7", "#f7dfc4", "#d6efd0", "#ecd5ef", "#f4f1c2", "#d3d3ea"]
SCALE = 80
MARGIN = 20


def _num(v):
    text = f"{float(v):.12f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


@dataclass
class SvgScene:
    """Geometry in flat, y-up coordinates."""

    polygons: list = field(default_factory=list)  # (points, fill)
    segments: list = field(default_factory=list)  # (a, b, colour)
    points: list = field(default_factory=list)  # (point, colour)
    labels: list = field(default_factory=list)  # (point, text)

    def empty(self):
        return not (self.polygons or self.segments or self.points or self.labels)

    def bounds(self):
        xs, ys = [], []
        for pts, _ in self.polygons:
            xs += [float(p[0]) for p in pts]
            ys += [float(p[1]) for p in pts]
        for a, b, _ in self.segments:
            xs += [float(a[0]), float(b[0])]
            ys += [float(a[1]), float(b[1])]
        for p, _ in self.points + self.labels:
            xs.append(float(p[0]))
            ys.append(float(p[1]))
        return min(xs), min(ys), max(xs), max(ys)


def render_svg(scene):
    if scene.empty():
        raise ValueError("empty scene")
    x0, y0, x1, y1 = scene.bounds()
    width = (x1 - x0) * SCALE + 2 * MARGIN
    height = (y1 - y0) * SCALE + 2 * MARGIN

    def tx(p):
        # flip the y axis: canvas y grows downwards
        return _num((float(p[0]) - x0) * SCALE + MARGIN), _num((y1 - float(p[1])) * SCALE + MARGIN)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
    ]
    for pts, fill in scene.polygons:
        coords = " ".join(",".join(tx(p)) for p in pts)
        out.append(f'<polygon points="{coords}" fill="{fill}" stroke="black" stroke-width="1"/>')
    for a, b, colour in scene.segments:
        (ax, ay), (bx, by) = tx(a), tx(b)
        out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke="{colour}" stroke-width="2"/>')
    for p, colour in scene.points:
        cx, cy = tx(p)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="4" fill="{colour}"/>')
    for p, text in scene.labels:
        cx, cy = tx(p)
        out.append(f'<text x="{cx}" y="{cy}" font-size="12" font-family="monospace" '
                   f'text-anchor="middle">{escape(str(text))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(scene, path):
    text = render_svg(scene)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


# -- layouts -----------------------------------------------------------------------


def _overlaps(a, b):
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def layout_cells(S):
    """Place the cells in the plane, neighbours side by side where they fit.

    Returns ``origin[c]`` as float pairs.  Cells that cannot be attached
    without overlap start a new block to the right.
    """
    origin = {}
    boxes = []
    gap = 0.5
    for seed in range(S.n):
        if seed in origin:
            continue
        shift = max((b[2] for b in boxes), default=-gap) + gap
        origin[seed] = (shift, 0.0)
        boxes.append((shift, 0.0, shift + float(S.widths[seed]), float(S.heights[seed])))
        queue = [seed]
        for c in queue:
            x, y = origin[c]
            w, h = float(S.widths[c]), float(S.heights[c])
            for nb, ox, oy in (
                (S.right[c], x + w, y),
                (S.up[c], x, y + h),
                (S.left[c], x - float(S.widths[S.left[c]]), y),
                (S.down[c], x, y - float(S.heights[S.down[c]])),
            ):
                if nb in origin:
                    continue
                box = (ox, oy, ox + float(S.widths[nb]), oy + float(S.heights[nb]))
                if any(_overlaps(box, b) for b in boxes):
                    continue
                origin[nb] = (ox, oy)
                boxes.append(box)
                queue.append(nb)
    return origin


def _place(origin, p):
    return (origin[p.cell][0] + float(p.x), origin[p.cell][1] + float(p.y))


def surface_scene(S, shade_cylinders=True, origin=None):
    origin = origin or layout_cells(S)
    colour = {}
    if shade_cylinders:
        for k, cyl in enumerate(horizontal_cylinders(S)):
            for c in cyl.cells:
                colour[c] = PALETTE[k % len(PALETTE)]
    scene = SvgScene()
    for c in range(S.n):
        x, y = origin[c]
        w, h = float(S.widths[c]), float(S.heights[c])
        scene.polygons.append(([(x, y), (x + w, y), (x + w, y + h), (x, y + h)], colour.get(c, "#eeeeee")))
        scene.labels.append(((x + w / 2, y + h / 2), str(c)))
    for v, o in enumerate(S.vertex_order):
        if o > 1:
            for c in S.vertex_cycles[v]:
                scene.points.append((origin[c], "red"))
    return scene


def vh_path_scene(S, path, p, q):
    origin = layout_cells(S)
    scene = surface_scene(S, origin=origin)
    pts = [p] + list(path.turning_points)
    for a, b in zip(pts, pts[1:]):
        scene.segments.append((_place(origin, a), _place(origin, b), "#1f5fbf"))
    for t in path.turning_points:
        scene.points.append((_place(origin, t), "#1f5fbf"))
    scene.points.append((_place(origin, p), "black"))
    scene.points.append((_place(origin, q), "black"))
    return scene


def leaf_scene(leaf):
    return surface_scene(leaf.carrier)
