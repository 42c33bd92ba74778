"""Straight-line flow on rect surfaces.

Orbits stop when they reach a cone point; regular vertices (cone angle
2*pi) are crossed like any other point.  All incidence tests are exact.

Directions at a vertex are resolved with half-open quadrants: a direction
with angle in ``[0, pi/2)`` leaves into the cell whose bottom-left corner is
the vertex, ``[pi/2, pi)`` into the cell whose bottom-right corner it is, and
so on counterclockwise.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .scalar import Vec2, as_scalar, simplify
from .surface import Point, RectSurface

__all__ = [
    "Trace",
    "TraceBudgetExceeded",
    "trace_budget",
    "trace_segment",
    "trace_ray",
    "trace_germ",
    "germs",
    "segment_valid",
    "SaddleConnection",
    "saddle_connections_up_to",
    "visible_targets",
    "primitive_direction",
]

DEFAULT_BUDGET = 1_000_000


class TraceBudgetExceeded(RuntimeError):
    pass


def trace_budget():
    """Step cap for a single trace, from ``VEECHLAB_TRACE_BUDGET``."""
    raw = os.environ.get("VEECHLAB_TRACE_BUDGET")
    if raw:
        return max(1, int(raw))
    return DEFAULT_BUDGET


@dataclass
class Trace:
    start: Point
    vector: tuple
    terminal: str  # "end", "cone", "returned" or "exhausted"
    end: Point | None = None
    vertex: int | None = None
    t: object = None
    cells: list = field(default_factory=list)

    @property
    def hits_cone(self):
        return self.terminal == "cone"

    def length2(self):
        vx, vy = self.vector
        t = self.t if self.t is not None else 1
        return (vx * vx + vy * vy) * t * t


def _sgn(x):
    return (x > 0) - (x < 0)


def primitive_direction(v):
    """Normalize a direction: integer gcd for rational vectors, else unchanged."""
    vx, vy = (simplify(as_scalar(t)) for t in v)
    if isinstance(vx, Fraction) and isinstance(vy, Fraction):
        den = math.lcm(vx.denominator, vy.denominator)
        a, b = int(vx * den), int(vy * den)
        g = math.gcd(a, b)
        if g == 0:
            raise ValueError("zero direction")
        return (Fraction(a // g), Fraction(b // g))
    if not vx and not vy:
        raise ValueError("zero direction")
    return (vx, vy)


def _outgoing(S, i, vx, vy):
    """Placement leaving the vertex at the bottom-left corner of cell ``i``."""
    if vx > 0 and vy >= 0:
        return i, Fraction(0), Fraction(0)
    if vx <= 0 and vy > 0:
        c = S.left[i]
        return c, S.widths[c], Fraction(0)
    if vx < 0 and vy <= 0:
        c = S.down[S.left[i]]
        return c, S.widths[c], S.heights[c]
    c = S.right[S.down[S.left[i]]]
    return c, Fraction(0), S.heights[c]


def germs(S, vertex, v):
    """Starting placements of the separatrices leaving ``vertex`` in direction ``v``."""
    vx, vy = v
    return [_outgoing(S, i, vx, vy) for i in S.vertex_cycles[vertex]]


def _placement(S, p, vx, vy):
    v = S.vertex_at(p)
    if v is not None:
        if S.vertex_order[v] > 1:
            raise ValueError("trace starts at a cone point; use trace_germ")
        return _outgoing(S, S.vertex_cycles[v][0], vx, vy)
    return p.cell, p.x, p.y


def _trace(S, cell, x, y, vx, vy, t_end=None, len2=None, target=None,
           on_cross=None, budget=None, start=None):
    """Core tracer.  Stops at ``t_end`` (parameter), at squared length
    ``len2``, on reaching ``target`` (first return), at a cone point, or
    when ``on_cross`` returns True."""
    if budget is None:
        budget = trace_budget()
    widths, heights = S.widths, S.heights
    right, up, left, down = S.right, S.up, S.left, S.down
    vnorm2 = vx * vx + vy * vy
    t = Fraction(0)
    cells = [cell]
    steps = 0
    while True:
        steps += 1
        if steps > budget:
            raise TraceBudgetExceeded(f"trace exceeded {budget} steps")
        w, h = widths[cell], heights[cell]
        tx = (w - x) / vx if vx > 0 else (x / -vx if vx < 0 else None)
        ty = (h - y) / vy if vy > 0 else (y / -vy if vy < 0 else None)
        if tx is None:
            tmin = ty
        elif ty is None:
            tmin = tx
        else:
            tmin = tx if tx <= ty else ty
        if target is not None and target.cell == cell:
            # first passage through the target inside this cell
            tau = _hit_time(x, y, vx, vy, target.x, target.y)
            if tau is not None and tau <= tmin and (t + tau) > 0:
                if not _past_limit(t + tau, t_end, len2, vnorm2, strict=True):
                    return Trace(start, (vx, vy), "returned", target, None, t + tau, cells)
        if _past_limit(t + tmin, t_end, len2, vnorm2):
            if t_end is not None:
                dt = t_end - t
                p = S.point(cell, x + vx * dt, y + vy * dt)
                tv = S.vertex_at(p)
                if tv is not None and S.vertex_order[tv] > 1:
                    return Trace(start, (vx, vy), "cone", p, tv, t_end, cells)
                return Trace(start, (vx, vy), "end", p, None, t_end, cells)
            return Trace(start, (vx, vy), "exhausted", None, None, None, cells)
        hit_x = tx is not None and tx == tmin
        hit_y = ty is not None and ty == tmin
        nx = (w if vx > 0 else 0) if hit_x else x + vx * tmin
        ny = (h if vy > 0 else 0) if hit_y else y + vy * tmin
        t = t + tmin
        corner = (hit_x and hit_y) or (hit_x and (ny == 0 or ny == h)) or (hit_y and (nx == 0 or nx == w))
        if corner:
            name = ("t" if ny == h else "b") + ("r" if nx == w else "l")
            vert = S.corner_vertex(cell, name)
            if S.vertex_order[vert] > 1:
                return Trace(start, (vx, vy), "cone", S.vertex_point(vert), vert, t, cells)
            old = cell
            cell, x, y = _outgoing(S, S.vertex_cycles[vert][0], vx, vy)
            if on_cross is not None and on_cross("corner", vert, old, t):
                return Trace(start, (vx, vy), "stopped", S.point(cell, x, y), None, t, cells)
        elif hit_x:
            if vx > 0:
                cell = right[cell]
                x = Fraction(0)
            else:
                cell = left[cell]
                x = widths[cell]
            y = ny
        else:
            if vy > 0:
                cell = up[cell]
                y = Fraction(0)
                x = nx
                crossed = cell
            else:
                crossed = cell
                cell = down[cell]
                y = heights[cell]
                x = nx
            if on_cross is not None and on_cross("h", crossed, nx, t):
                return Trace(start, (vx, vy), "stopped", S.point(cell, x, y), None, t, cells)
        cells.append(cell)


def _hit_time(x, y, vx, vy, px, py):
    """tau >= 0 with (x, y) + tau v == (px, py), or None."""
    dx, dy = px - x, py - y
    if dx * vy != dy * vx:
        return None
    if vx:
        tau = dx / vx
    else:
        tau = dy / vy
    if tau < 0:
        return None
    return tau


def _past_limit(t, t_end, len2, vnorm2, strict=False):
    if t_end is not None:
        return t > t_end if strict else t >= t_end
    if len2 is not None:
        val = t * t * vnorm2
        return val > len2 if strict else val >= len2
    return False


def trace_segment(S, p, v, budget=None):
    """Develop the straight segment from ``p`` with holonomy ``v``."""
    vx, vy = (simplify(as_scalar(t)) for t in v)
    p = S.point(*p)
    if not vx and not vy:
        return Trace(p, (vx, vy), "end", p, None, Fraction(1), [p.cell])
    grid = S.uniform_cell()
    if grid is not None and isinstance(vx, Fraction) and isinstance(vy, Fraction):
        return _trace_grid(S, grid, p, vx, vy, budget)
    cell, x, y = _placement(S, p, vx, vy)
    return _trace(S, cell, x, y, vx, vy, t_end=Fraction(1), budget=budget, start=p)


def trace_germ(S, placement, v, t_end=None, len2=None, on_cross=None, budget=None):
    """Trace a separatrix from a placement returned by :func:`germs`."""
    vx, vy = (simplify(as_scalar(t)) for t in v)
    cell, x, y = placement
    return _trace(S, cell, x, y, vx, vy, t_end=t_end, len2=len2, on_cross=on_cross,
                  budget=budget, start=Point(cell, x, y))


def trace_ray(S, p, direction, max_len, budget=None):
    """Trace from a regular point for length ``max_len``.

    The terminal is ``cone`` (stopped at a singularity), ``returned`` (came
    back to ``p``, a closed regular geodesic) or ``exhausted``.  The end point
    is reported when the parameter ``max_len/|direction|`` lies in the field.
    """
    vx, vy = (simplify(as_scalar(t)) for t in direction)
    p = S.point(*p)
    if S.is_cone(p):
        raise ValueError("trace starts at a cone point; use trace_germ")
    max_len = simplify(as_scalar(max_len))
    norm2 = vx * vx + vy * vy
    ratio = as_scalar(max_len * max_len / norm2).sqrt()
    cell, x, y = _placement(S, p, vx, vy)
    if ratio is not None:
        res = _trace(S, cell, x, y, vx, vy, t_end=simplify(ratio), target=p, budget=budget, start=p)
        if res.terminal == "end":
            res.terminal = "exhausted"
        return res
    return _trace(S, cell, x, y, vx, vy, len2=max_len * max_len, target=p, budget=budget, start=p)


def segment_valid(S, p, q, v):
    """True iff the segment from ``p`` with holonomy ``v`` avoids cone points and ends at ``q``."""
    res = trace_segment(S, p, v)
    return res.terminal == "end" and res.end == S.point(*q)


# -- integer fast path for square grids ------------------------------------------------


def _trace_grid(S, side, p, vx, vy, budget=None):
    """Exact segment tracing on surfaces tiled by equal squares, in integers."""
    if budget is None:
        budget = trace_budget()
    cell, x, y = _placement(S, p, vx, vy)
    xs, ys, ux, uy = x / side, y / side, vx / side, vy / side
    D = math.lcm(xs.denominator, ys.denominator, ux.denominator, uy.denominator)
    X0, Y0, VX, VY = int(xs * D), int(ys * D), int(ux * D), int(uy * D)
    sx, sy = _sgn(VX), _sgn(VY)
    ax, ay = abs(VX), abs(VY)
    dx0 = (D - X0) if sx > 0 else X0
    dy0 = (D - Y0) if sy > 0 else Y0
    right, up, left, down = S.right, S.up, S.left, S.down
    order, vertex_of, cycles = S.vertex_order, S.vertex_of, S.vertex_cycles
    k = j = 0
    # local coordinate along an edge when the motion is parallel to it
    Xl, Yl = X0, Y0
    cells = [cell]
    steps = 0
    while True:
        steps += 1
        if steps > budget:
            raise TraceBudgetExceeded(f"trace exceeded {budget} steps")
        nx = dx0 + k * D
        ny = dy0 + j * D
        if sx and sy:
            c = nx * ay - ny * ax
        elif sx:
            c = -1
        else:
            c = 1
        if (c <= 0 and nx >= ax) or (c > 0 and ny >= ay):
            ex = X0 + VX - sx * k * D if sx else Xl
            ey = Y0 + VY - sy * j * D if sy else Yl
            q = S.point(cell, Fraction(ex, D) * side, Fraction(ey, D) * side)
            tv = S.vertex_at(q)
            if tv is not None and order[tv] > 1:
                return Trace(p, (vx, vy), "cone", q, tv, Fraction(1), cells)
            return Trace(p, (vx, vy), "end", q, None, Fraction(1), cells)
        if c == 0:
            corner = True
        elif c < 0:
            corner = sy == 0 and (Yl == 0 or Yl == D)
        else:
            corner = sx == 0 and (Xl == 0 or Xl == D)
        if corner:
            xr = sx > 0 or (sx == 0 and Xl == D)
            yt = sy > 0 or (sy == 0 and Yl == D)
            if xr:
                i = up[right[cell]] if yt else right[cell]
            else:
                i = up[cell] if yt else cell
            vert = vertex_of[i]
            if order[vert] > 1:
                t = Fraction(nx, ax) if c <= 0 else Fraction(ny, ay)
                return Trace(p, (vx, vy), "cone", S.vertex_point(vert), vert, t, cells)
            cell, lx, ly = _outgoing(S, cycles[vert][0], vx, vy)
            if sx == 0:
                Xl = D if lx else 0
            if sy == 0:
                Yl = D if ly else 0
            if c <= 0:
                k += 1
            if c >= 0:
                j += 1
        elif c < 0:
            cell = right[cell] if sx > 0 else left[cell]
            k += 1
        else:
            cell = up[cell] if sy > 0 else down[cell]
            j += 1
        cells.append(cell)


# -- visibility in the development ---------------------------------------------------------


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _in_wedge(wedge, d):
    a, b = wedge
    return _cross(a, d) >= 0 and _cross(d, b) >= 0 and (_cross(a, b) > 0 or _dot(a, d) > 0)


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def _intersect(w1, w2):
    a1, b1 = w1
    a2, b2 = w2
    if _in_wedge(w1, a2):
        a = a2
    elif _in_wedge(w2, a1):
        a = a1
    else:
        return None
    if _in_wedge(w1, b2):
        b = b2
    elif _in_wedge(w2, b1):
        b = b1
    else:
        return None
    if _cross(a, b) < 0 or (_cross(a, b) == 0 and _dot(a, b) <= 0):
        return None
    return (a, b)


def _edge_dist2(p, q):
    # axis-parallel segment from p to q, squared distance to the origin
    if p[0] == q[0]:
        lo, hi = (p[1], q[1]) if p[1] <= q[1] else (q[1], p[1])
        m = 0 if lo <= 0 <= hi else min(lo * lo, hi * hi)
        return p[0] * p[0] + m
    lo, hi = (p[0], q[0]) if p[0] <= q[0] else (q[0], p[0])
    m = 0 if lo <= 0 <= hi else min(lo * lo, hi * hi)
    return p[1] * p[1] + m


def _cell_reps(S, p):
    """All (cell, x, y) whose closed cell contains the point ``p``."""
    v = S.vertex_at(p)
    if v is not None:
        reps = []
        for i in S.vertex_cycles[v]:
            for quad in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
                reps.append(_outgoing(S, i, *quad))
        return reps
    reps = [(p.cell, p.x, p.y)]
    if p.x == 0:
        c = S.left[p.cell]
        reps.append((c, S.widths[c], p.y))
    if p.y == 0:
        c = S.down[p.cell]
        reps.append((c, p.x, S.heights[c]))
    return reps


def _corners(w, h):
    return [(0, 0), (w, 0), (w, h), (0, h)]


def visible_targets(S, p, L, want):
    """Development BFS from ``p`` out to distance ``L``.

    ``want(cell, origin)`` returns the candidate vectors (from ``p``) that
    lie in the developed copy of ``cell`` whose bottom-left corner sits at
    ``origin``.  Candidates inside the visible wedge and within distance
    ``L`` are returned, deduplicated.  Every straight segment from ``p`` of
    length at most ``L`` appears among the developed cells, so the result is
    complete; callers still validate candidates by exact tracing.
    """
    L2 = L * L
    found = set()
    # seeds: each closed cell containing p, entered through its far edges
    queue = []
    for cell, x, y in _cell_reps(S, p):
        origin = (-x, -y)
        queue.append((cell, origin, None, None))
    seen_states = set()
    while queue:
        nxt = []
        for cell, origin, wedge, entry in queue:
            key = (cell, origin, wedge, entry)
            if key in seen_states:
                continue
            seen_states.add(key)
            w, h = S.widths[cell], S.heights[cell]
            for vec in want(cell, origin):
                if _dot(vec, vec) <= L2 and (vec[0] or vec[1]):
                    if wedge is None or _in_wedge(wedge, vec):
                        found.add(vec)
            pts = [(origin[0] + a, origin[1] + b) for a, b in _corners(w, h)]
            # edges ccw: bottom, right, top, left; neighbors and entry edge ids
            edges = [
                (pts[0], pts[1], S.down[cell], 2),
                (pts[1], pts[2], S.right[cell], 3),
                (pts[2], pts[3], S.up[cell], 0),
                (pts[3], pts[0], S.left[cell], 1),
            ]
            for k, (a, b, nb, nb_entry) in enumerate(edges):
                if k == entry:
                    continue
                if _edge_dist2(a, b) > L2:
                    continue
                # a far edge has the apex on its inner side and spans a..b ccw
                if _cross(a, b) <= 0:
                    continue
                sub = (a, b)
                if wedge is not None:
                    sub = _intersect(wedge, sub)
                    if sub is None:
                        continue
                if _cross(sub[0], sub[1]) == 0 and _through_cone_corner(S, cell, k, sub[0], a, b):
                    continue
                nb_origin = _neighbor_origin(S, cell, origin, k, nb)
                nxt.append((nb, nb_origin, sub, nb_entry))
        queue = nxt
    return sorted(found, key=lambda v: (v[0] * v[0] + v[1] * v[1], v[0], v[1]))


def _neighbor_origin(S, cell, origin, k, nb):
    if k == 0:
        return (origin[0], origin[1] - S.heights[nb])
    if k == 1:
        return (origin[0] + S.widths[cell], origin[1])
    if k == 2:
        return (origin[0], origin[1] + S.heights[cell])
    return (origin[0] - S.widths[nb], origin[1])


def _through_cone_corner(S, cell, k, d, a, b):
    names = [("bl", "br"), ("br", "tr"), ("tr", "tl"), ("tl", "bl")][k]
    for pt, name in ((a, names[0]), (b, names[1])):
        if _cross(d, pt) == 0 and _dot(d, pt) > 0:
            return S.is_cone_vertex(S.corner_vertex(cell, name))
    return False


# -- saddle connections -------------------------------------------------------------------------


@dataclass(frozen=True)
class SaddleConnection:
    start: int
    end: int
    holonomy: tuple
    length2: object
    germ: tuple


def saddle_connections_up_to(S, L):
    """All saddle connections of length at most ``L``, one per outgoing germ.

    For surfaces tiled by equal squares the holonomies are lattice vectors and
    are enumerated directly; otherwise the development BFS supplies the
    candidates.  Every reported connection is confirmed by exact tracing.
    """
    L = simplify(as_scalar(L))
    out = []
    cones = [v for v, o in enumerate(S.vertex_order) if o > 1]
    if not cones:
        return out
    grid = S.uniform_cell()
    for v0 in cones:
        p0 = S.vertex_point(v0)
        if grid is not None and isinstance(L, Fraction):
            r = int(L / grid)
            cands = []
            for a in range(-r, r + 1):
                for b in range(-r, r + 1):
                    if (a or b) and (a * a + b * b) * grid * grid <= L * L:
                        cands.append((Fraction(a) * grid, Fraction(b) * grid))
        else:
            def want(cell, origin):
                res = []
                for (a, b), name in zip(_corners(S.widths[cell], S.heights[cell]), ("bl", "br", "tr", "tl")):
                    if S.is_cone_vertex(S.corner_vertex(cell, name)):
                        res.append((origin[0] + a, origin[1] + b))
                return res

            cands = visible_targets(S, p0, L, want)
        for vec in cands:
            for g in germs(S, v0, vec):
                res = trace_germ(S, g, vec, t_end=Fraction(1))
                if res.terminal == "cone" and res.t == 1:
                    out.append(SaddleConnection(v0, res.vertex, vec, vec[0] * vec[0] + vec[1] * vec[1], g))
    out.sort(key=lambda s: (s.length2, s.holonomy, s.start, s.germ))
    return out
