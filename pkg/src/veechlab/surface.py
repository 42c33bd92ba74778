"""Translation surfaces tiled by rectangles, and polygonal surfaces.

A :class:`RectSurface` is a finite set of rectangular cells glued edge to
edge: ``right[i]`` is the cell glued along the right side of cell ``i`` and
``up[i]`` the cell glued along its top.  Unit-square cells give an origami;
L-shaped tables, their covers and staircases all fit in the same model.
Cells are numbered from 0.

Vertices are tracked through the bottom-left corners of the cells.  Walking
counterclockwise around the corner of cell ``i`` visits ``left``, ``down``,
``right`` and ``up`` in turn, so the vertex classes are the cycles of the
commutator ``up . right . down . left`` and a cycle of length ``k`` is a cone
point of angle ``2*pi*k``.
"""

from __future__ import annotations

import math
import re
from collections import namedtuple
from fractions import Fraction

from .scalar import Scalar, Vec2, as_scalar, parse_scalar, simplify

__all__ = [
    "SurfaceError",
    "Point",
    "ConePoint",
    "RectSurface",
    "PolygonSurface",
    "build_origami",
    "build_rect_surface",
    "build_staircase",
    "build_l_shaped",
    "build_double_cover_LC",
    "build_2ngon_pair",
    "l_shape_weierstrass_points",
    "golden_ratio",
    "genus",
    "cone_points",
    "arithmeticity_detect",
    "Arithmetic",
    "NonArithmetic",
    "perm_from_cycles",
    "perm_to_cycles",
    "parse_surface",
    "format_surface",
    "builtin_surface",
]


class SurfaceError(ValueError):
    pass


Point = namedtuple("Point", "cell x y")
Point.__doc__ = "A point of a rect surface: cell index and local coordinates."

ConePoint = namedtuple("ConePoint", "vertex order")


def golden_ratio():
    return Scalar(Fraction(1, 2), Fraction(1, 2), 5)


def _num(x):
    return simplify(as_scalar(x)) if not isinstance(x, (int, Fraction)) else Fraction(x)


# -- permutations ---------------------------------------------------------------


def perm_inverse(p):
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def perm_cycles(p):
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(tuple(cyc))
    return out


def perm_from_cycles(text, n):
    """``"(0,1)(2)"`` or ``"(0 1)"`` on ``range(n)`` as a tuple."""
    p = list(range(n))
    for body in re.findall(r"\(([^)]*)\)", text):
        items = [int(t) for t in re.split(r"[,\s]+", body.strip()) if t]
        for a, b in zip(items, items[1:] + items[:1]):
            if not 0 <= a < n:
                raise SurfaceError(f"cell {a} out of range")
            p[a] = b
    if sorted(p) != list(range(n)):
        raise SurfaceError(f"not a permutation: {text}")
    return tuple(p)


def perm_to_cycles(p):
    return "".join("(" + ",".join(map(str, c)) + ")" for c in perm_cycles(p))


# -- rectangle tiled surfaces ---------------------------------------------------


class RectSurface:
    """Surface glued from rectangles; see the module docstring.

    ``meta`` holds optional structure attached by constructors (for example
    the covering map of a staircase).  It never influences geometry.
    """

    def __init__(self, widths, heights, right, up, name=None, meta=None):
        n = len(widths)
        if n == 0:
            raise SurfaceError("empty surface")
        if not (len(heights) == len(right) == len(up) == n):
            raise SurfaceError("inconsistent cell data")
        self.right = tuple(int(i) for i in right)
        self.up = tuple(int(i) for i in up)
        for perm in (self.right, self.up):
            if sorted(perm) != list(range(n)):
                raise SurfaceError("gluing data is not a permutation")
        self.widths = tuple(_num(w) for w in widths)
        self.heights = tuple(_num(h) for h in heights)
        for w, h in zip(self.widths, self.heights):
            if w <= 0 or h <= 0:
                raise SurfaceError("degenerate cell (non-positive side)")
        for i in range(n):
            if self.heights[self.right[i]] != self.heights[i]:
                raise SurfaceError(f"cells {i} and {self.right[i]} glued along unequal sides")
            if self.widths[self.up[i]] != self.widths[i]:
                raise SurfaceError(f"cells {i} and {self.up[i]} glued along unequal sides")
        self.left = perm_inverse(self.right)
        self.down = perm_inverse(self.up)
        self.n = n
        self.name = name
        self.meta = dict(meta or {})
        self.field = 0
        for v in self.widths + self.heights:
            if isinstance(v, Scalar) and v.b:
                if self.field and self.field != v.d:
                    raise SurfaceError("cells use two different quadratic fields")
                self.field = v.d
        if not self._connected():
            raise SurfaceError("disconnected surface")
        self._vertices()

    # -- combinatorics --------------------------------------------------------

    def _connected(self):
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in (self.right[i], self.up[i], self.left[i], self.down[i]):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.n

    def commutator(self):
        r, u, l, d = self.right, self.up, self.left, self.down
        return tuple(u[r[d[l[i]]]] for i in range(self.n))

    def _vertices(self):
        cycles = perm_cycles(self.commutator())
        cycles.sort(key=min)
        self.vertex_cycles = [tuple(c) for c in cycles]
        self.vertex_of = [0] * self.n
        for k, cyc in enumerate(cycles):
            for i in cyc:
                self.vertex_of[i] = k
        self.vertex_order = [len(c) for c in cycles]

    def is_origami(self):
        return all(w == 1 for w in self.widths) and all(h == 1 for h in self.heights)

    def uniform_cell(self):
        """Common rational side length if all cells are equal squares, else None."""
        s = self.widths[0]
        if not isinstance(s, Fraction):
            return None
        if all(w == s for w in self.widths) and all(h == s for h in self.heights):
            return s
        return None

    def corner_vertex(self, cell, corner):
        """Vertex id of a cell corner; corner is one of 'bl', 'br', 'tl', 'tr'."""
        if corner == "bl":
            i = cell
        elif corner == "br":
            i = self.right[cell]
        elif corner == "tl":
            i = self.up[cell]
        elif corner == "tr":
            i = self.up[self.right[cell]]
        else:
            raise ValueError(corner)
        return self.vertex_of[i]

    def is_cone_vertex(self, v):
        return self.vertex_order[v] > 1

    def cone_points(self):
        return [ConePoint(v, o) for v, o in enumerate(self.vertex_order) if o > 1]

    def genus(self):
        total = sum(o - 1 for o in self.vertex_order)
        if total % 2:
            raise SurfaceError("odd total cone excess")
        return total // 2 + 1

    def euler_characteristic(self):
        # cells, each with one bottom and one left edge, and the vertex classes
        return len(self.vertex_cycles) - 2 * self.n + self.n

    def area(self):
        return sum((w * h for w, h in zip(self.widths, self.heights)), Fraction(0))

    def cone_signature(self):
        """Cone orders as a compact string, e.g. ``3^1`` or ``2^4``."""
        orders = sorted((o for o in self.vertex_order if o > 1), reverse=True)
        if not orders:
            return "none"
        parts = []
        for o in sorted(set(orders), reverse=True):
            parts.append(f"{o}^{orders.count(o)}")
        return " ".join(parts)

    # -- points -----------------------------------------------------------------

    def vertex_point(self, v):
        return Point(min(self.vertex_cycles[v]), Fraction(0), Fraction(0))

    def point(self, cell, x, y):
        """Canonical point: half-open cell coordinates, vertices by least cell."""
        x = _num(x)
        y = _num(y)
        cell = int(cell)
        for _ in range(4 * self.n + 4):
            w, h = self.widths[cell], self.heights[cell]
            if x < 0:
                cell = self.left[cell]
                x = x + self.widths[cell]
            elif x >= w:
                x = x - w
                cell = self.right[cell]
            elif y < 0:
                cell = self.down[cell]
                y = y + self.heights[cell]
            elif y >= h:
                y = y - h
                cell = self.up[cell]
            else:
                break
        else:
            # far away coordinates: fall back to a slow walk
            return self.point(*self._walk(cell, x, y))
        if x == 0 and y == 0:
            return self.vertex_point(self.vertex_of[cell])
        if x == 0:
            # the left edge belongs to this cell already; nothing to do
            pass
        return Point(cell, x, y)

    def _walk(self, cell, x, y):
        while x < 0:
            cell = self.left[cell]
            x = x + self.widths[cell]
        while x >= self.widths[cell]:
            x = x - self.widths[cell]
            cell = self.right[cell]
        while y < 0:
            cell = self.down[cell]
            y = y + self.heights[cell]
        while y >= self.heights[cell]:
            y = y - self.heights[cell]
            cell = self.up[cell]
        return cell, x, y

    def vertex_at(self, p):
        """Vertex id if the canonical point ``p`` is a vertex, else None."""
        if p.x == 0 and p.y == 0:
            return self.vertex_of[p.cell]
        return None

    def is_cone(self, p):
        v = self.vertex_at(p)
        return v is not None and self.vertex_order[v] > 1

    def center(self, cell):
        return Point(cell, self.widths[cell] / 2, self.heights[cell] / 2)

    # -- derived surfaces ---------------------------------------------------------

    def transpose(self):
        """Mirror in the diagonal: swaps the roles of horizontal and vertical."""
        return RectSurface(self.heights, self.widths, self.up, self.right, name=None)

    def subdivide(self, k):
        """Cut every cell into ``k x k`` congruent cells."""
        n = self.n
        cells = n * k * k
        widths, heights, right, up = [], [], [0] * cells, [0] * cells

        def idx(c, i, j):
            return c * k * k + j * k + i

        for c in range(n):
            for j in range(k):
                for i in range(k):
                    widths.append(self.widths[c] / k)
                    heights.append(self.heights[c] / k)
                    right[idx(c, i, j)] = idx(c, i + 1, j) if i + 1 < k else idx(self.right[c], 0, j)
                    up[idx(c, i, j)] = idx(c, i, j + 1) if j + 1 < k else idx(self.up[c], i, 0)
        return RectSurface(widths, heights, right, up)

    def canonical_form(self):
        """Relabeling-invariant key (minimum over BFS relabelings)."""
        best = None
        for start in range(self.n):
            order = {start: 0}
            queue = [start]
            for i in queue:
                for j in (self.right[i], self.up[i]):
                    if j not in order:
                        order[j] = len(order)
                        queue.append(j)
            inv = sorted(order, key=order.get)
            key = (
                tuple(order[self.right[i]] for i in inv),
                tuple(order[self.up[i]] for i in inv),
                tuple(str(self.widths[i]) for i in inv),
                tuple(str(self.heights[i]) for i in inv),
            )
            if best is None or key < best:
                best = key
        return best

    def is_isomorphic(self, other):
        return self.n == other.n and self.canonical_form() == other.canonical_form()

    def to_polygons(self):
        polys = []
        glue = {}
        for c in range(self.n):
            w, h = self.widths[c], self.heights[c]
            polys.append([Vec2(0, 0), Vec2(w, 0), Vec2(w, h), Vec2(0, h)])
            # edges: 0 bottom, 1 right, 2 top, 3 left
            glue[(c, 1)] = (self.right[c], 3)
            glue[(self.right[c], 3)] = (c, 1)
            glue[(c, 2)] = (self.up[c], 0)
            glue[(self.up[c], 0)] = (c, 2)
        return PolygonSurface(polys, glue)

    def __repr__(self):
        label = self.name or f"{self.n} cells"
        return f"RectSurface({label})"


def build_rect_surface(widths, heights, right, up, name=None):
    return RectSurface(widths, heights, right, up, name=name)


def build_origami(sigma_right, sigma_up, name=None):
    """Origami from its right and up permutations (0-based sequences or cycle strings)."""
    if isinstance(sigma_right, str) or isinstance(sigma_up, str):
        n = max(int(t) for t in re.findall(r"\d+", f"{sigma_right} {sigma_up}")) + 1
        if isinstance(sigma_right, str):
            sigma_right = perm_from_cycles(sigma_right, n)
        if isinstance(sigma_up, str):
            sigma_up = perm_from_cycles(sigma_up, n)
    if len(sigma_right) != len(sigma_up):
        raise SurfaceError("permutations on different ground sets")
    n = len(sigma_right)
    return RectSurface([1] * n, [1] * n, sigma_right, sigma_up, name=name)


def build_staircase(n):
    """Cyclic staircase of 4n unit squares, a degree-n cover of R^2/2Z^2."""
    if n <= 0:
        raise SurfaceError("staircase needs n >= 1")
    m = 4 * n
    right = list(range(m))
    up = list(range(m))
    for k in range(2 * n):
        right[2 * k], right[2 * k + 1] = 2 * k + 1, 2 * k
        a, b = 2 * k + 1, (2 * k + 2) % m
        up[a], up[b] = b, a
    # cell 2k sits at (k mod 2, k mod 2) in R^2/2Z^2: each step moves by (1, 1)
    offsets = []
    for c in range(m):
        k = c // 2
        x = (k + c % 2) % 2
        y = k % 2
        offsets.append((x, y))
    meta = {"cover": {"lattice": 2, "offsets": offsets, "degree": n}}
    return RectSurface([1] * m, [1] * m, right, up, name=f"staircase:{n}", meta=meta)


def build_l_shaped(w1, h1, w2, h2, name=None):
    """L-shaped table: a w1 x h1 corner cell, a w2 x h1 arm to its right and a
    w1 x h2 arm on top, opposite sides glued.

    Cell 0 is the corner, cell 1 the right arm, cell 2 the top arm.
    """
    return RectSurface(
        [w1, w2, w1], [h1, h1, h2], [1, 0, 2], [2, 1, 0], name=name
    )


def l_shape_weierstrass_points(L):
    """The six fixed points of the hyperelliptic involution of an L-shape."""
    pts = [L.center(0), L.center(1), L.center(2)]
    pts.append(L.point(2, L.widths[2], L.heights[2] / 2))  # right edge of the top arm
    pts.append(L.point(1, L.widths[1] / 2, L.heights[1]))  # top edge of the right arm
    pts.append(L.vertex_point(0))
    return pts


def _l_cells(L):
    return L.n == 3 and L.right == (1, 0, 2) and L.up == (2, 1, 0)


def build_double_cover_LC(L):
    """Double cover of an L-shaped surface branched over its Weierstrass points.

    The L is cut into 2 x 2 subcells so that the branch points are vertices.
    The six points are paired in order and joined by shortest edge paths of
    the cell 1-skeleton; the symmetric difference of these paths is the slit.
    Crossing a slit edge swaps the two sheets.
    """
    if not _l_cells(L):
        raise SurfaceError("input is not an L-shaped surface")
    fine = L.subdivide(2)
    marks = []
    for p in l_shape_weierstrass_points(L):
        q = _refine_point(L, fine, p)
        v = fine.vertex_at(q)
        assert v is not None
        marks.append(v)
    # 1-skeleton: edges are ('b', c) bottom edge of c and ('l', c) left edge of c
    adj = {}
    for c in range(fine.n):
        bl = fine.vertex_of[c]
        br = fine.corner_vertex(c, "br")
        tl = fine.corner_vertex(c, "tl")
        adj.setdefault(bl, []).append((br, ("b", c)))
        adj.setdefault(br, []).append((bl, ("b", c)))
        adj.setdefault(bl, []).append((tl, ("l", c)))
        adj.setdefault(tl, []).append((bl, ("l", c)))
    slit = set()
    for a, b in zip(marks[0::2], marks[1::2]):
        for e in _shortest_edge_path(adj, a, b):
            slit ^= {e}
    n = fine.n
    right = [0] * (2 * n)
    up = [0] * (2 * n)
    for s in range(2):
        for c in range(n):
            rc = fine.right[c]
            uc = fine.up[c]
            right[c + s * n] = rc + ((s ^ (("l", rc) in slit)) * n)
            up[c + s * n] = uc + ((s ^ (("b", uc) in slit)) * n)
    widths = list(fine.widths) * 2
    heights = list(fine.heights) * 2
    meta = {
        "double_cover": {
            "base": L,
            "fine": fine,
            "slit": sorted(slit),
            "branch_vertices": marks,
        }
    }
    base = L.name or "L"
    cover = RectSurface(widths, heights, right, up, name=f"LC:{base}", meta=meta)
    _check_riemann_hurwitz(L, cover)
    return cover


def _check_riemann_hurwitz(L, cover):
    # chi(cover) = 2 chi(L) - (number of branch points)
    chi_l = 2 - 2 * L.genus()
    chi_c = 2 - 2 * cover.genus()
    if chi_c != 2 * chi_l - 6:
        raise SurfaceError("double cover violates Riemann-Hurwitz")


def _refine_point(L, fine, p):
    """Image of a point of ``L`` in its 2 x 2 subdivision."""
    c = p.cell
    w, h = L.widths[c], L.heights[c]
    i = 1 if p.x >= w / 2 else 0
    j = 1 if p.y >= h / 2 else 0
    return fine.point(c * 4 + j * 2 + i, p.x - i * w / 2, p.y - j * h / 2)


def cover_project(cover, p):
    """Project a point of an LC cover down to the base L-shape."""
    data = cover.meta["double_cover"]
    fine, L = data["fine"], data["base"]
    c = p.cell % fine.n
    base_cell = c // 4
    i, j = c % 2, (c % 4) // 2
    return L.point(base_cell, p.x + i * L.widths[base_cell] / 2, p.y + j * L.heights[base_cell] / 2)


def cover_lifts(cover, q):
    """Both preimages in an LC cover of a point of the base L-shape."""
    data = cover.meta["double_cover"]
    fine = data["fine"]
    f = _refine_point(data["base"], fine, q)
    return [cover.point(f.cell + s * fine.n, f.x, f.y) for s in range(2)]


def _shortest_edge_path(adj, a, b):
    prev = {a: None}
    queue = [a]
    for v in queue:
        if v == b:
            break
        for w, e in adj[v]:
            if w not in prev:
                prev[w] = (v, e)
                queue.append(w)
    path = []
    v = b
    while prev[v] is not None:
        v, e = prev[v]
        path.append(e)
    return path


# -- polygon surfaces -----------------------------------------------------------


def _half(v):
    # 0 for directions in [0, pi), 1 for [pi, 2 pi)
    return 0 if (v.y > 0 or (v.y == 0 and v.x > 0)) else 1


def _arg_less(u, w):
    hu, hw = _half(u), _half(w)
    if hu != hw:
        return hu < hw
    return u.cross(w) > 0


class PolygonSurface:
    """Polygons (counterclockwise vertex lists) with edges glued by translation.

    ``gluings`` maps ``(polygon, edge)`` to ``(polygon, edge)``; edge ``j`` runs
    from vertex ``j`` to vertex ``j + 1``.
    """

    def __init__(self, polygons, gluings, name=None):
        self.polygons = [[v if isinstance(v, Vec2) else Vec2(*v) for v in poly] for poly in polygons]
        self.gluings = dict(gluings)
        self.name = name
        self.field = 0
        for poly in self.polygons:
            for v in poly:
                for t in v:
                    if t.b:
                        self.field = t.d
        self._validate()
        self._vertices()

    def edge(self, p, j):
        poly = self.polygons[p]
        return poly[(j + 1) % len(poly)] - poly[j]

    def _validate(self):
        for p, poly in enumerate(self.polygons):
            if len(poly) < 3:
                raise SurfaceError("polygon with fewer than 3 vertices")
            for j in range(len(poly)):
                if (p, j) not in self.gluings:
                    raise SurfaceError(f"edge {(p, j)} is not glued")
        for a, b in self.gluings.items():
            if self.gluings.get(b) != a:
                raise SurfaceError("gluing is not an involution")
            if a == b:
                raise SurfaceError("edge glued to itself")
            if self.edge(*a) != -self.edge(*b):
                raise SurfaceError(f"edges {a} and {b} are not parallel translates")

    def _vertices(self):
        seen = set()
        self.vertex_classes = []
        self.vertex_order = []
        for p, poly in enumerate(self.polygons):
            for j in range(len(poly)):
                if (p, j) in seen:
                    continue
                cyc = []
                cur = (p, j)
                while cur not in seen:
                    seen.add(cur)
                    cyc.append(cur)
                    q, k = cur
                    prev_edge = (q, (k - 1) % len(self.polygons[q]))
                    cur = self.gluings[prev_edge]
                # angle at (q, k) sweeps from edge k to the reverse of edge k-1
                turns = 0
                for q, k in cyc:
                    u = self.edge(q, k)
                    w = -self.edge(q, (k - 1) % len(self.polygons[q]))
                    if not _arg_less(u, w):
                        turns += 1
                self.vertex_classes.append(cyc)
                self.vertex_order.append(turns)

    def cone_points(self):
        return [ConePoint(v, o) for v, o in enumerate(self.vertex_order) if o > 1]

    def euler_characteristic(self):
        edges = len(self.gluings) // 2
        return len(self.vertex_classes) - edges + len(self.polygons)

    def genus(self):
        chi = self.euler_characteristic()
        g = (2 - chi) // 2
        if sum(o - 1 for o in self.vertex_order) != 2 * g - 2:
            raise SurfaceError("angle sum inconsistent with Euler characteristic")
        return g

    def area(self):
        total = Fraction(0)
        for poly in self.polygons:
            for a, b in zip(poly, poly[1:] + poly[:1]):
                total = total + a.cross(b)
        return simplify(as_scalar(total)) / 2

    def cone_signature(self):
        orders = sorted((o for o in self.vertex_order if o > 1), reverse=True)
        if not orders:
            return "none"
        return " ".join(f"{o}^{orders.count(o)}" for o in sorted(set(orders), reverse=True))

    def to_rect_surface(self):
        """Inverse of :meth:`RectSurface.to_polygons` for axis-parallel rectangles."""
        n = len(self.polygons)
        widths, heights, right, up = [], [], [0] * n, [0] * n
        for p, poly in enumerate(self.polygons):
            if len(poly) != 4 or poly[1] - poly[0] != Vec2(poly[1].x - poly[0].x, 0):
                raise SurfaceError("not a rectangle surface")
            widths.append(self.edge(p, 0).x)
            heights.append(self.edge(p, 1).y)
            q, k = self.gluings[(p, 1)]
            if k != 3:
                raise SurfaceError("right edge not glued to a left edge")
            right[p] = q
            q, k = self.gluings[(p, 2)]
            if k != 0:
                raise SurfaceError("top edge not glued to a bottom edge")
            up[p] = q
        return RectSurface(widths, heights, right, up)

    def translation_automorphism_order(self, perm):
        """Order of the polygon permutation ``perm`` as a translation automorphism.

        Returns None unless ``perm`` maps congruent polygons onto each other by
        translations compatible with every gluing.
        """
        for p, q in enumerate(perm):
            a, b = self.polygons[p], self.polygons[q]
            if len(a) != len(b):
                return None
            shift = b[0] - a[0]
            if any(bv - av != shift for av, bv in zip(a, b)):
                return None
        for (p, j), (q, k) in self.gluings.items():
            if self.gluings[(perm[p], j)] != (perm[q], k):
                return None
        order = 1
        cur = list(perm)
        while cur != list(range(len(perm))):
            cur = [perm[i] for i in cur]
            order += 1
        return order

    def __repr__(self):
        return f"PolygonSurface({self.name or len(self.polygons)})"


def _regular_polygon_vertices(n2):
    """Regular 2n-gon with unit sides and exact coordinates.

    The decagon does not have coordinates in Q(sqrt 5); it is stretched
    vertically by 1/sin(pi/5), an affine change that keeps every gluing a
    translation and every cone angle unchanged.
    """
    if n2 == 4:
        dirs = [Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0), Vec2(0, -1)]
    elif n2 == 8:
        s = Scalar(0, Fraction(1, 2), 2)
        dirs = [Vec2(1, 0), Vec2(s, s), Vec2(0, 1), Vec2(-s, s)]
        dirs += [-v for v in dirs]
    elif n2 == 10:
        c1 = Scalar(Fraction(1, 4), Fraction(1, 4), 5)   # cos(pi/5)
        c2 = Scalar(Fraction(-1, 4), Fraction(1, 4), 5)  # cos(2 pi/5)
        phi = golden_ratio()
        # (cos k pi/5, sin k pi/5 / sin pi/5)
        dirs = [Vec2(1, 0), Vec2(c1, 1), Vec2(c2, phi), Vec2(-c2, phi), Vec2(-c1, 1)]
        dirs += [-v for v in dirs]
    else:
        raise SurfaceError("coordinate field not quadratic")
    verts = [Vec2(0, 0)]
    for v in dirs[:-1]:
        verts.append(verts[-1] + v)
    return verts


def build_2ngon_pair(n):
    """Return ``(Y, X)``: two regular 2n-gons glued along diametrical sides,
    and a single 2n-gon with opposite sides glued."""
    if n not in (2, 4, 5):
        raise SurfaceError("coordinate field not quadratic")
    verts = _regular_polygon_vertices(2 * n)
    m = 2 * n
    glue_pair = {}
    for j in range(m):
        glue_pair[(0, j)] = (1, (j + n) % m)
        glue_pair[(1, (j + n) % m)] = (0, j)
    shift = Vec2(verts[n].x - verts[0].x + 2 * max(v.x for v in verts), 0)
    second = [v + shift for v in verts]
    pair = PolygonSurface([verts, second], glue_pair, name=f"{m}-gon pair")
    glue_one = {(0, j): (0, (j + n) % m) for j in range(m)}
    single = PolygonSurface([verts], glue_one, name=f"{m}-gon")
    return pair, single


# -- Gauss-Bonnet bookkeeping ------------------------------------------------------


def genus(S):
    return S.genus()


def cone_points(S):
    return S.cone_points()


# -- arithmeticity --------------------------------------------------------------------


class Arithmetic:
    """Period lattice (basis vectors) and the covering of the torus it defines."""

    def __init__(self, basis, degree, cover):
        self.basis = basis
        self.degree = degree
        self.cover = cover

    def __repr__(self):
        return f"Arithmetic(basis={self.basis}, degree={self.degree})"


class NonArithmetic:
    def __init__(self, periods, ratio):
        self.periods = periods
        self.ratio = ratio

    def __repr__(self):
        return f"NonArithmetic(ratio={self.ratio})"


def absolute_periods(S):
    """Holonomies of the loops closed by non-tree gluings of a spanning tree."""
    pos = {0: (Fraction(0), Fraction(0))}
    queue = [0]
    tree = set()
    for c in queue:
        x, y = pos[c]
        for nb, dx, dy, kind in (
            (S.right[c], S.widths[c], 0, "r"),
            (S.up[c], 0, S.heights[c], "u"),
            (S.left[c], -S.widths[S.left[c]], 0, "l"),
            (S.down[c], 0, -S.heights[S.down[c]], "d"),
        ):
            if nb not in pos:
                pos[nb] = (x + dx, y + dy)
                queue.append(nb)
                if kind in "ru":
                    tree.add((kind, c))
                else:
                    tree.add(("r" if kind == "l" else "u", nb))
    periods = []
    for c in range(S.n):
        x, y = pos[c]
        for kind, nb, dx, dy in (("r", S.right[c], S.widths[c], 0), ("u", S.up[c], 0, S.heights[c])):
            if (kind, c) in tree:
                continue
            hx = x + dx - pos[nb][0]
            hy = y + dy - pos[nb][1]
            if hx or hy:
                periods.append((hx, hy))
    return periods, pos


def _coords(v):
    out = []
    for t in v:
        t = as_scalar(t)
        out.extend([t.a, t.b])
    return out


def _rational_rank_basis(vectors):
    """Indices of a maximal Q-linearly independent subset (as vectors in Q^4)."""
    rows = []
    chosen = []
    for idx, v in enumerate(vectors):
        r = _coords(v)
        for piv, row in rows:
            if r[piv]:
                f = r[piv] / row[piv]
                r = [a - f * b for a, b in zip(r, row)]
        nz = [i for i, a in enumerate(r) if a]
        if nz:
            rows.append((nz[0], r))
            chosen.append(idx)
    return chosen


def _solve2(b1, b2, v):
    det = b1[0] * b2[1] - b1[1] * b2[0]
    s = (v[0] * b2[1] - v[1] * b2[0]) / det
    t = (b1[0] * v[1] - b1[1] * v[0]) / det
    return simplify(as_scalar(s)), simplify(as_scalar(t))


def _hnf_rational_lattice(coeffs):
    """Z-basis (2 vectors of rationals) of the lattice spanned by ``coeffs``."""
    den = 1
    for s, t in coeffs:
        den = den * Fraction(s).denominator // math.gcd(den, Fraction(s).denominator)
        den = den * Fraction(t).denominator // math.gcd(den, Fraction(t).denominator)
    rows = [[int(s * den), int(t * den)] for s, t in coeffs]
    # column-style Hermite reduction on the first coordinate, then the second
    a = [r for r in rows if r[0] or r[1]]
    basis = []
    col_rows = a
    while True:
        nz = [r for r in col_rows if r[0]]
        if len(nz) <= 1:
            break
        nz.sort(key=lambda r: abs(r[0]))
        piv = nz[0]
        new = [piv]
        for r in col_rows:
            if r is piv:
                continue
            if r[0]:
                q = r[0] // piv[0]
                r = [r[0] - q * piv[0], r[1] - q * piv[1]]
            new.append(r)
        col_rows = new
    first = [r for r in col_rows if r[0]]
    rest = [r[1] for r in col_rows if not r[0]]
    g = 0
    for x in rest:
        g = math.gcd(g, x)
    if first:
        a0, a1 = first[0]
        if a0 < 0:
            a0, a1 = -a0, -a1
        if g:
            a1 %= g
        basis.append((Fraction(a0, den), Fraction(a1, den)))
    if g:
        basis.append((Fraction(0), Fraction(g, den)))
    return basis


def arithmeticity_detect(S):
    """Decide whether a rect surface covers a flat torus by a translation map."""
    periods, pos = absolute_periods(S)
    idx = _rational_rank_basis(periods)
    if len(idx) > 2:
        ratio = _witness_ratio(S, periods)
        return NonArithmetic(periods, ratio)
    if len(idx) < 2:
        raise SurfaceError("period group of rank < 2")
    b1, b2 = periods[idx[0]], periods[idx[1]]
    if all(isinstance(t, Fraction) for v in periods for t in v):
        b1, b2 = (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))
    coeffs = [_solve2(b1, b2, v) for v in periods]
    if not all(isinstance(c, Fraction) for pair in coeffs for c in pair):
        ratio = _witness_ratio(S, periods)
        return NonArithmetic(periods, ratio)
    zb = _hnf_rational_lattice(coeffs)
    basis = [
        tuple(simplify(as_scalar(s * b1[k] + t * b2[k])) for k in range(2))
        for s, t in zb
    ]
    det = abs(basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0])
    degree = simplify(as_scalar(S.area() / det))
    cover = [pos[c] for c in range(S.n)]
    return Arithmetic(basis, degree, cover)


def _witness_ratio(S, periods):
    # prefer two parallel periods with an irrational ratio
    for axis in (0, 1):
        vals = [abs(as_scalar(v[axis])) for v in periods if v[1 - axis] == 0 and v[axis] != 0]
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                big, small = max(vals[i], vals[j]), min(vals[i], vals[j])
                r = simplify(big / small)
                if not isinstance(r, Fraction):
                    return r
    for v in periods:
        for w in periods:
            for k in range(2):
                if v[k] and w[k]:
                    r = simplify(as_scalar(v[k]) / w[k])
                    if not isinstance(r, Fraction):
                        return abs(r)
    return None


# -- text format ------------------------------------------------------------------------


def format_surface(S):
    if isinstance(S, RectSurface):
        if S.is_origami():
            return "\n".join(
                [
                    f"origami n={S.n} d={S.field}",
                    f"right {perm_to_cycles(S.right)}",
                    f"up {perm_to_cycles(S.up)}",
                ]
            ) + "\n"
        return "\n".join(
            [
                f"rects n={S.n} d={S.field}",
                f"right {perm_to_cycles(S.right)}",
                f"up {perm_to_cycles(S.up)}",
                "widths " + " ".join(str(w) for w in S.widths),
                "heights " + " ".join(str(h) for h in S.heights),
            ]
        ) + "\n"
    lines = [f"polygons n={len(S.polygons)} d={S.field}"]
    for poly in S.polygons:
        lines.append("polygon " + " ".join(f"{v.x},{v.y}" for v in poly))
    done = set()
    for a, b in sorted(S.gluings.items()):
        if a in done:
            continue
        done.add(b)
        lines.append(f"glue {a[0]}:{a[1]} {b[0]}:{b[1]}")
    return "\n".join(lines) + "\n"


def parse_surface(text):
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip() and not ln.startswith("#")]
    head = lines[0].split()
    fields = dict(t.split("=") for t in head[1:])
    body = {}
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        body.setdefault(key, []).append(rest)
    if head[0] in ("origami", "rects"):
        n = int(fields["n"])
        right = perm_from_cycles(body["right"][0], n)
        up = perm_from_cycles(body["up"][0], n)
        if head[0] == "origami":
            return RectSurface([1] * n, [1] * n, right, up)
        widths = [parse_scalar(t) for t in body["widths"][0].split()]
        heights = [parse_scalar(t) for t in body["heights"][0].split()]
        return RectSurface(widths, heights, right, up)
    if head[0] == "polygons":
        polys = []
        for ln in body.get("polygon", []):
            pts = []
            for tok in ln.split():
                x, y = tok.split(",")
                pts.append(Vec2(parse_scalar(x), parse_scalar(y)))
            polys.append(pts)
        glue = {}
        for ln in body.get("glue", []):
            a, b = ln.split()
            a = tuple(int(t) for t in a.split(":"))
            b = tuple(int(t) for t in b.split(":"))
            glue[a] = b
            glue[b] = a
        return PolygonSurface(polys, glue)
    raise SurfaceError(f"unknown surface header {head[0]!r}")


# -- builtin registry -------------------------------------------------------------------


def builtin_surface(name):
    """Named example surfaces (see the README for the list)."""
    if name.startswith("builtin:"):
        name = name[len("builtin:"):]
    if name == "torus":
        return build_origami([0], [0], name="torus")
    if name == "L3":
        return build_l_shaped(1, 1, 1, 1, name="L3")
    m = re.fullmatch(r"L\((\d+),(\d+)\)", name)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        # L made of a horizontal bar of a squares and a vertical bar of b squares
        return _l_origami(a, b, name)
    if name == "golden-L":
        phi = golden_ratio()
        return build_l_shaped(phi, phi, 1, 1, name="golden-L")
    m = re.fullmatch(r"(?:staircase:|Y)(\d+)", name)
    if m:
        return build_staircase(int(m.group(1)))
    if name.startswith("LC:"):
        return build_double_cover_LC(builtin_surface(name[3:]))
    if name == "LC":
        return build_double_cover_LC(builtin_surface("L3"))
    if name == "octagon":
        return build_2ngon_pair(4)[1]
    if name == "decagon-pair":
        return build_2ngon_pair(5)[0]
    if name == "decagon":
        return build_2ngon_pair(5)[1]
    if name == "octagon-pair":
        return build_2ngon_pair(4)[0]
    raise SurfaceError(f"unknown builtin surface {name!r}")


def _l_origami(a, b, name):
    """Unit-square L: squares 0..a-1 in the bottom row, a..a+b-2 above square 0."""
    if a < 1 or b < 1:
        raise SurfaceError("L(m,n) needs m, n >= 1")
    n = a + b - 1
    right = list(range(n))
    up = list(range(n))
    for i in range(a):
        right[i] = (i + 1) % a
    column = [0] + list(range(a, n))
    for k, c in enumerate(column):
        up[c] = column[(k + 1) % len(column)]
    return RectSurface([1] * n, [1] * n, right, up, name=name)
