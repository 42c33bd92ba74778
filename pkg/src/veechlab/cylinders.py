"""Cylinder decompositions, parabolic directions and rectangles.

Horizontal cylinders of a rect surface are read off the rows (cycles of
``right``): two rows are stacked into one cylinder when the top side of the
lower row carries no cone point.  Vertical cylinders are the horizontal ones
of the transposed surface.  Other directions go through the first return map
to the union of the bottom sides of the cells, partitioned at every point
whose orbit meets a vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .flow import germs, primitive_direction, trace_germ, TraceBudgetExceeded
from .scalar import as_scalar, simplify

__all__ = [
    "Cylinder",
    "PeriodicityUndetermined",
    "cylinder_decomposition",
    "horizontal_cylinders",
    "vertical_cylinders",
    "is_parabolic",
    "Rectangle",
    "rectangle_decomposition",
    "RectangleDecomposition",
]


class PeriodicityUndetermined(RuntimeError):
    pass


@dataclass
class Cylinder:
    direction: tuple
    holonomy: tuple  # core curve holonomy
    area: object
    cells: tuple = ()
    # cell -> (offset along the core, offset across) of the cell's corner
    coords: dict = field(default_factory=dict)
    circumference2: object = None

    @property
    def circumference(self):
        r = as_scalar(self.circumference2).sqrt()
        return None if r is None else simplify(r)

    @property
    def height(self):
        c = self.circumference
        if c is None:
            return None
        return simplify(as_scalar(self.area / c))

    @property
    def modulus(self):
        """Height over circumference, i.e. area / circumference**2."""
        return simplify(as_scalar(self.area / self.circumference2))


# -- horizontal and vertical ----------------------------------------------------------


def _rows(S):
    seen = set()
    rows = []
    for c in range(S.n):
        if c in seen:
            continue
        row = [c]
        seen.add(c)
        j = S.right[c]
        while j != c:
            row.append(j)
            seen.add(j)
            j = S.right[j]
        rows.append(row)
    return rows


def _top_regular(S, row):
    return all(not S.is_cone_vertex(S.corner_vertex(c, "tl")) for c in row)


def horizontal_cylinders(S):
    """Horizontal cylinders with per-cell cylinder coordinates.

    ``coords[c] = (s, eta)``: the bottom-left corner of cell ``c`` lies at
    distance ``s`` along the core (measured from the corner of the first
    cell of the bottom row) and height ``eta`` above the bottom boundary.
    """
    rows = _rows(S)
    row_of = {}
    for k, row in enumerate(rows):
        for c in row:
            row_of[c] = k
    above = {}
    below = {}
    for k, row in enumerate(rows):
        if _top_regular(S, row):
            k2 = row_of[S.up[row[0]]]
            above[k] = k2
            below[k2] = k
    stacks = []
    used = set()
    bottoms = [k for k in range(len(rows)) if k not in below]
    # rows closing up into a stack without boundary only occur on tori
    loops = sorted((k for k in range(len(rows)) if k in below), key=lambda k: min(rows[k]))
    for b in bottoms + loops:
        if b in used:
            continue
        stack = [b]
        j = above.get(b)
        while j is not None and j != b:
            stack.append(j)
            j = above.get(j)
        used.update(stack)
        stacks.append(stack)
    cylinders = []
    for stack in stacks:
        base = rows[stack[0]]
        start = min(base)
        i0 = base.index(start)
        base = base[i0:] + base[:i0]
        coords = {}
        s = Fraction(0)
        for c in base:
            coords[c] = (s, Fraction(0))
            s = s + S.widths[c]
        circ = s
        eta = Fraction(0)
        prev = base
        for r in stack[1:]:
            eta = eta + S.heights[prev[0]]
            cur = [S.up[c] for c in prev]
            for c_low, c in zip(prev, cur):
                coords[c] = (coords[c_low][0], eta)
            prev = cur
        cells = tuple(sorted(coords))
        area = sum((S.widths[c] * S.heights[c] for c in cells), Fraction(0))
        cylinders.append(
            Cylinder((Fraction(1), Fraction(0)), (circ, Fraction(0)), simplify(as_scalar(area)),
                     cells, coords, circumference2=simplify(as_scalar(circ * circ)))
        )
    cylinders.sort(key=lambda c: c.cells[0])
    return cylinders


def vertical_cylinders(S):
    """Vertical cylinders; coordinates are (offset up the core, offset across)."""
    out = []
    for cyl in horizontal_cylinders(S.transpose()):
        hx, hy = cyl.holonomy
        out.append(Cylinder((Fraction(0), Fraction(1)), (hy, hx), cyl.area, cyl.cells,
                            cyl.coords, cyl.circumference2))
    return out


# -- general direction --------------------------------------------------------------------


def cylinder_decomposition(S, direction, method="auto", budget=None):
    """Maximal cylinders in a periodic direction.

    Raises :class:`PeriodicityUndetermined` if some separatrix fails to
    close within the trace budget.
    """
    vx, vy = primitive_direction(direction)
    if method == "auto":
        if vy == 0:
            return horizontal_cylinders(S)
        if vx == 0:
            return vertical_cylinders(S)
        method = "return"
    if vy == 0:
        out = []
        for cyl in cylinder_decomposition(S.transpose(), (vy, vx), method="return", budget=budget):
            hx, hy = cyl.holonomy
            out.append(Cylinder((vx, vy), (hy, hx), cyl.area, cyl.cells, {}, cyl.circumference2))
        return out
    if vy < 0:
        vx, vy = -vx, -vy
    return _return_map_cylinders(S, vx, vy, budget)


def _return_map_cylinders(S, vx, vy, budget):
    # partition points on each bottom side, with a flag for singular ones
    marks = {c: {Fraction(0): S.is_cone_vertex(S.vertex_of[c])} for c in range(S.n)}

    def add(cell, x, singular):
        x = simplify(as_scalar(x))
        if x == S.widths[cell]:
            return
        d = marks[cell]
        d[x] = d.get(x, False) or singular

    def recorder(singular):
        def on_cross(kind, a, b, t):
            if kind == "h":
                add(a, b, singular)
            elif singular:
                # a separatrix through a regular vertex marks its corner
                add(S.vertex_cycles[a][0], 0, True)
            return False
        return on_cross

    try:
        for v, order in enumerate(S.vertex_order):
            for sgn in (1, -1):
                d = (sgn * vx, sgn * vy)
                for g in germs(S, v, d):
                    if order > 1:
                        res = trace_germ(S, g, d, on_cross=recorder(True), budget=budget)
                        if res.terminal != "cone":
                            raise PeriodicityUndetermined("separatrix did not close")
                    else:
                        # regular vertex: follow its leaf until it closes up
                        start = S.vertex_cycles[v][0]

                        def stop_at_home(kind, a, b, t, start=start, v=v):
                            if kind == "h":
                                add(a, b, False)
                            return kind == "corner" and a == v

                        # a leaf that runs into a cone point is a separatrix
                        # already recorded from the other end
                        trace_germ(S, g, d, on_cross=stop_at_home, budget=budget)
                        break
    except TraceBudgetExceeded as exc:
        raise PeriodicityUndetermined(str(exc)) from exc

    intervals = []  # (cell, lo, hi)
    index = {}
    for c in range(S.n):
        pts = sorted(marks[c])
        ends = pts[1:] + [S.widths[c]]
        for lo, hi in zip(pts, ends):
            index[(c, lo)] = len(intervals)
            intervals.append((c, lo, hi))
    starts = {c: sorted(marks[c]) for c in range(S.n)}

    def locate(cell, x):
        pts = starts[cell]
        lo, hi = 0, len(pts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if pts[mid] <= x:
                lo = mid
            else:
                hi = mid - 1
        return index[(cell, pts[lo])]

    def step(cell, x):
        h = S.heights[cell]
        dx = vx * h / vy
        pos = x + dx
        c = cell
        while pos >= S.widths[c]:
            pos = pos - S.widths[c]
            c = S.right[c]
        while pos < 0:
            c = S.left[c]
            pos = pos + S.widths[c]
        return S.up[c], pos, (dx, h)

    parent = list(range(len(intervals)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for k, (c, lo, hi) in enumerate(intervals):
        mid = (lo + hi) / 2
        c2, x2, _ = step(c, mid)
        union(k, locate(c2, x2))
    # neighbours across non-singular partition points belong to one cylinder
    for c in range(S.n):
        pts = starts[c]
        for a, b in zip(pts, pts[1:]):
            if not marks[c][b]:
                union(index[(c, a)], index[(c, b)])
        if not marks[c][Fraction(0)] and Fraction(0) in marks[c]:
            lc = S.left[c]
            union(index[(c, pts[0])], index[(lc, starts[lc][-1])])

    groups = {}
    for k in range(len(intervals)):
        groups.setdefault(find(k), []).append(k)
    cylinders = []
    for root, members in sorted(groups.items()):
        area = Fraction(0)
        cells = set()
        for k in members:
            c, lo, hi = intervals[k]
            area = area + (hi - lo) * S.heights[c]
            cells.add(c)
        c, lo, hi = intervals[members[0]]
        x0 = (lo + hi) / 2
        cell, x = c, x0
        hx, hy = Fraction(0), Fraction(0)
        for _ in range(len(intervals) + 1):
            cell, x, (dx, dy) = step(cell, x)
            hx, hy = hx + dx, hy + dy
            if cell == c and x == x0:
                break
        else:
            raise PeriodicityUndetermined("return map orbit did not close")
        hx, hy = simplify(as_scalar(hx)), simplify(as_scalar(hy))
        cylinders.append(
            Cylinder((vx, vy), (hx, hy), simplify(as_scalar(area)), tuple(sorted(cells)), {},
                     simplify(as_scalar(hx * hx + hy * hy)))
        )
    return cylinders


def is_parabolic(S, direction):
    """``(True, ratios)`` if all moduli are commensurable, else ``(False, ratios)``.

    ``ratios`` lists each modulus divided by the first one.
    """
    cyls = cylinder_decomposition(S, direction)
    m0 = cyls[0].modulus
    ratios = [simplify(as_scalar(c.modulus / m0)) for c in cyls]
    return all(isinstance(r, Fraction) for r in ratios), ratios


# -- rectangles -------------------------------------------------------------------------------


@dataclass
class Rectangle:
    id: int
    cells: tuple
    horizontal: int
    vertical: int


class RectangleDecomposition:
    """Rectangles cut out by the horizontal and vertical cylinders.

    ``rect_of[c]``, ``hcyl_of[c]``, ``vcyl_of[c]`` give, for each cell, its
    rectangle and the cylinders containing it.
    """

    def __init__(self, S):
        self.surface = S
        self.horizontal = horizontal_cylinders(S)
        self.vertical = vertical_cylinders(S)
        self.hcyl_of = {}
        self.vcyl_of = {}
        for k, cyl in enumerate(self.horizontal):
            for c in cyl.cells:
                self.hcyl_of[c] = k
        for k, cyl in enumerate(self.vertical):
            for c in cyl.cells:
                self.vcyl_of[c] = k
        parent = list(range(S.n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for c in range(S.n):
            r = S.right[c]
            if self.vcyl_of[c] == self.vcyl_of[r]:
                parent[find(r)] = find(c)
            u = S.up[c]
            if self.hcyl_of[c] == self.hcyl_of[u]:
                parent[find(u)] = find(c)
        groups = {}
        for c in range(S.n):
            groups.setdefault(find(c), []).append(c)
        self.rectangles = []
        self.rect_of = {}
        for members in sorted(groups.values()):
            rid = len(self.rectangles)
            c0 = members[0]
            self.rectangles.append(Rectangle(rid, tuple(members), self.hcyl_of[c0], self.vcyl_of[c0]))
            for c in members:
                self.rect_of[c] = rid

    def __len__(self):
        return len(self.rectangles)

    def rectangle(self, p):
        return self.rect_of[p.cell]

    def anchor(self, rid):
        """Least cell of the rectangle; its corner serves as the local origin."""
        return self.rectangles[rid].cells[0]

    def local_coords(self, p):
        """Coordinates of ``p`` in its rectangle, relative to the rectangle's
        bottom-left corner (cells of a rectangle tile it as a grid)."""
        S = self.surface
        rid = self.rect_of[p.cell]
        ox, oy = self._offsets(rid)[p.cell]
        return ox + p.x, oy + p.y

    def _offsets(self, rid):
        cache = self.__dict__.setdefault("_offset_cache", {})
        if rid in cache:
            return cache[rid]
        S = self.surface
        cells = set(self.rectangles[rid].cells)
        start = self.anchor(rid)
        off = {start: (Fraction(0), Fraction(0))}
        queue = [start]
        for c in queue:
            x, y = off[c]
            for nb, dx, dy in ((S.right[c], S.widths[c], 0), (S.up[c], 0, S.heights[c])):
                if nb in cells and nb not in off and (
                    (dy == 0 and self.vcyl_of[nb] == self.vcyl_of[c]) or (dx == 0 and self.hcyl_of[nb] == self.hcyl_of[c])
                ):
                    off[nb] = (x + dx, y + dy)
                    queue.append(nb)
        # shift so the minimum corner is the origin
        mx = min(v[0] for v in off.values())
        my = min(v[1] for v in off.values())
        off = {c: (x - mx, y - my) for c, (x, y) in off.items()}
        cache[rid] = off
        return off

    def same_rectangle(self, p, q):
        return self.rect_of[p.cell] == self.rect_of[q.cell]


def rectangle_decomposition(S):
    return RectangleDecomposition(S)
