"""Leaves of the linear foliations of a product X_h x X_v.

A leaf of slope ``p/q`` is the image of a local map
``zeta -> (z_h + q*zeta, z_v + p*zeta)``.  On rect surfaces it is tiled by
*product cells*: the pieces of zeta-space on which both coordinates stay in a
single cell of their factor.  A product cell is recorded by the cells of the
two factors and the positions of its bottom-left corner in them, and the
leaf is grown by moving right and up until the set of states closes.

Negative slopes are handled by turning the vertical factor by a half turn,
which reverses its direction of motion.
"""

from __future__ import annotations

import math
from collections import namedtuple
from fractions import Fraction

from .flow import _cell_reps
from .surface import Point, RectSurface, SurfaceError

__all__ = [
    "Slope",
    "HORIZONTAL",
    "VERTICAL",
    "parse_slope",
    "ProductPoint",
    "LeafSurface",
    "LeafNotCompact",
    "cone_order_product",
    "build_leaf",
    "local_leaf_classes",
    "leaf_invariance_check",
    "translation_automorphisms",
    "map_order",
    "quotient_by_cell_permutation",
]

DEFAULT_MAX_CELLS = 200_000


class Slope(namedtuple("Slope", "p q")):
    """Slope ``p/q`` in lowest terms with ``q >= 0``; ``(1, 0)`` is vertical."""

    __slots__ = ()

    def __new__(cls, p, q=1):
        p, q = int(p), int(q)
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a slope")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return super().__new__(cls, p, q)

    def __str__(self):
        if self.q == 0:
            return "inf"
        if self.q == 1:
            return str(self.p)
        return f"{self.p}/{self.q}"


HORIZONTAL = Slope(0, 1)
VERTICAL = Slope(1, 0)


def parse_slope(value):
    if isinstance(value, Slope):
        return value
    if isinstance(value, tuple):
        return Slope(*value)
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "oo", "vertical", "v"):
            return VERTICAL
        if text in ("horizontal", "h"):
            return HORIZONTAL
        value = Fraction(text)
    value = Fraction(value)
    return Slope(value.numerator, value.denominator)


ProductPoint = namedtuple("ProductPoint", "h v")


class LeafNotCompact(RuntimeError):
    pass


def cone_order_product(o_h, o_v):
    """Order of the cone points over a pair of cone points, and how many local leaves meet there."""
    if o_h < 1 or o_v < 1:
        raise ValueError("cone orders must be positive")
    g = math.gcd(o_h, o_v)
    return {"order": o_h * o_v // g, "leaf_count": g}


# -- half turn of a factor ---------------------------------------------------


def _half_turn(S):
    return RectSurface(S.widths, S.heights, S.left, S.down, name=None)


def _turn_point(S, T, p):
    """Image of the point ``p`` of ``S`` in its half turn ``T`` (or back)."""
    return T.point(p.cell, S.widths[p.cell] - p.x, S.heights[p.cell] - p.y)


# -- leaves ------------------------------------------------------------------------


class LeafSurface:
    """A leaf realised as a rect surface in the zeta coordinate.

    ``states[c] = (a, xa, ya, b, xb, yb)``: cell ``c`` of ``carrier`` sits in
    cell ``a`` of the horizontal factor with bottom-left corner ``(xa, ya)``
    and likewise in cell ``b`` of the vertical factor.  ``scale_h`` and
    ``scale_v`` are the stretch factors of the two projections (``q`` and
    ``|p|``).
    """

    def __init__(self, slope, carrier, states, factor_h, factor_v, turned, original_v):
        self.slope = slope
        self.carrier = carrier
        self.states = states
        self.factor_h = factor_h
        self.factor_v = factor_v
        self.turned = turned
        self.original_v = original_v
        self.scale_h = slope.q
        self.scale_v = abs(slope.p)
        self._by_h = {}
        for c, st in enumerate(states):
            self._by_h.setdefault(st[0], []).append(c)

    @property
    def squares(self):
        """Number of unit squares after rescaling zeta by ``max(p,1)*max(q,1)``."""
        k = max(self.scale_h, 1) * max(self.scale_v, 1)
        return int(self.carrier.area() * k * k)

    def pr_h(self, point):
        c, x, y = point
        a, xa, ya = self.states[c][:3]
        return self.factor_h.point(a, xa + self.scale_h * x, ya + self.scale_h * y)

    def pr_v(self, point):
        """Projection to the vertical factor, in the coordinates of the original surface."""
        c, x, y = point
        b, xb, yb = self.states[c][3:]
        q = self.factor_v.point(b, xb + self.scale_v * x, yb + self.scale_v * y)
        if self.turned:
            return _turn_point(self.factor_v, self.original_v, q)
        return q

    def project(self, point):
        return ProductPoint(self.pr_h(point), self.pr_v(point))

    def contains(self, ph, pv):
        """Whether the pair ``(ph, pv)`` lies on this leaf."""
        Xh, Xv = self.factor_h, self.factor_v
        ph = Xh.point(*ph)
        pv = self.original_v.point(*pv)
        if self.turned:
            pv = _turn_point(self.original_v, Xv, pv)
        sh, sv = self.scale_h, self.scale_v
        for cell, x, y in _cell_reps(Xh, ph):
            for c in self._by_h.get(cell, ()):
                a, xa, ya, b, xb, yb = self.states[c]
                w, h = self.carrier.widths[c], self.carrier.heights[c]
                if sh:
                    zx, zy = (x - xa) / sh, (y - ya) / sh
                    if not (0 <= zx <= w and 0 <= zy <= h):
                        continue
                    if Xv.point(b, xb + sv * zx, yb + sv * zy) == pv:
                        return True
                else:
                    # vertical leaf: the horizontal coordinate is frozen
                    if (x, y) != (xa, ya):
                        continue
                    if any(self._v_hit(c, pv)):
                        return True
        return False

    def _v_hit(self, c, pv):
        b, xb, yb = self.states[c][3:]
        sv = self.scale_v
        for cell, x, y in _cell_reps(self.factor_v, pv):
            if cell != b:
                continue
            zx, zy = (x - xb) / sv, (y - yb) / sv
            yield 0 <= zx <= self.carrier.widths[c] and 0 <= zy <= self.carrier.heights[c]

    def __repr__(self):
        return f"LeafSurface(slope={self.slope}, cells={self.carrier.n})"


def _step(limit, pos, scale):
    if scale == 0:
        return None
    return (limit - pos) / scale


def _min_step(*vals):
    vals = [v for v in vals if v is not None]
    return min(vals)


def _cell_size(Xh, Xv, sh, sv, st):
    a, xa, ya, b, xb, yb = st
    w = _min_step(_step(Xh.widths[a], xa, sh), _step(Xv.widths[b], xb, sv))
    h = _min_step(_step(Xh.heights[a], ya, sh), _step(Xv.heights[b], yb, sv))
    return w, h


def _advance(limit, cell, pos, scale, step, nxt):
    pos = pos + scale * step
    if pos == limit:
        return nxt[cell], Fraction(0)
    return cell, pos


def _develop(Xh, Xv, sh, sv, start, max_cells):
    index = {start: 0}
    states = [start]
    sizes = []
    right, up = [], []
    k = 0
    while k < len(states):
        st = states[k]
        a, xa, ya, b, xb, yb = st
        w, h = _cell_size(Xh, Xv, sh, sv, st)
        sizes.append((w, h))
        na, nxa = _advance(Xh.widths[a], a, xa, sh, w, Xh.right)
        nb, nxb = _advance(Xv.widths[b], b, xb, sv, w, Xv.right)
        ua, uya = _advance(Xh.heights[a], a, ya, sh, h, Xh.up)
        ub, uyb = _advance(Xv.heights[b], b, yb, sv, h, Xv.up)
        for nst, out in (((na, nxa, ya, nb, nxb, yb), right), ((ua, xa, uya, ub, xb, uyb), up)):
            j = index.get(nst)
            if j is None:
                if len(states) >= max_cells:
                    raise LeafNotCompact("leaf not compact at budget")
                j = index[nst] = len(states)
                states.append(nst)
            out.append(j)
        k += 1
    widths = [s[0] for s in sizes]
    heights = [s[1] for s in sizes]
    return states, RectSurface(widths, heights, right, up)


def _start_state(Xh, Xv, sh, sv, ph, pv, branch):
    vh, vv = Xh.vertex_at(ph), Xv.vertex_at(pv)
    if vh is not None and vv is not None and sh and sv:
        cyc_h, cyc_v = Xh.vertex_cycles[vh], Xv.vertex_cycles[vv]
        j = (-branch) % len(cyc_v)
        return (cyc_h[0], Fraction(0), Fraction(0), cyc_v[j], Fraction(0), Fraction(0))
    # back up to the nearest grid lines below and to the left of the base
    dx = _min_step(_step(ph.x, 0, sh), _step(pv.x, 0, sv))
    dy = _min_step(_step(ph.y, 0, sh), _step(pv.y, 0, sv))
    return (ph.cell, ph.x - sh * dx, ph.y - sh * dy, pv.cell, pv.x - sv * dx, pv.y - sv * dy)


def _base_points(Xh, Xv, base):
    if base is None or base == "cone":
        base = ("cone", "cone")
    ph, pv = base

    def resolve(X, p):
        if p == "cone":
            cones = [v for v, o in enumerate(X.vertex_order) if o > 1]
            return X.vertex_point(cones[0] if cones else 0)
        return X.point(*p)

    return resolve(Xh, ph), resolve(Xv, pv)


def build_leaf(X, slope, base=None, branch=0, Xv=None, max_cells=DEFAULT_MAX_CELLS):
    """Leaf of slope ``slope`` through ``base`` in ``X x X`` (or ``X x Xv``).

    ``base`` is a pair of points, either of which may be ``"cone"`` (the first
    cone point of the factor).  When both are vertices, ``branch`` picks the
    local leaf: the leaf leaving the cone pair through sectors ``(i_h, i_v)``
    with ``i_h - i_v = branch``, sectors numbered along the vertex cycles.
    """
    slope = parse_slope(slope)
    Xv_orig = X if Xv is None else Xv
    ph, pv = _base_points(X, Xv_orig, base)
    turned = slope.p < 0
    Xv_eff = Xv_orig
    if turned:
        Xv_eff = _half_turn(Xv_orig)
        pv = _turn_point(Xv_orig, Xv_eff, pv)
    sh, sv = slope.q, abs(slope.p)
    start = _start_state(X, Xv_eff, sh, sv, ph, pv, branch)
    states, carrier = _develop(X, Xv_eff, sh, sv, start, max_cells)
    carrier.name = f"leaf[{slope}]"
    return LeafSurface(slope, carrier, states, X, Xv_eff, turned, Xv_orig)


def local_leaf_classes(Xh, vh, Xv, vv, slope=1):
    """Group the sector pairs at the cone pair ``(vh, vv)`` into local leaves.

    Every pair of sectors starts a leaf; two pairs give the same local leaf
    when they land in the same vertex of the same developed leaf.  Returns a
    list of ``(order, sector_pairs)``.
    """
    seen = set()
    classes = []
    for ch in Xh.vertex_cycles[vh]:
        for cv in Xv.vertex_cycles[vv]:
            if (ch, cv) in seen:
                continue
            leaf = _leaf_from_sectors(Xh, Xv, slope, ch, cv)
            C = leaf.carrier
            v = C.vertex_of[leaf.states.index(_sector_state(ch, cv))]
            members = [(leaf.states[c][0], leaf.states[c][3]) for c in C.vertex_cycles[v]]
            seen.update(members)
            classes.append((C.vertex_order[v], members))
    return classes


def _sector_state(ch, cv):
    z = Fraction(0)
    return (ch, z, z, cv, z, z)


def _leaf_from_sectors(Xh, Xv, slope, ch, cv):
    slope = parse_slope(slope)
    if slope.p <= 0 or slope.q <= 0:
        raise ValueError("sector enumeration needs a positive slope")
    states, carrier = _develop(Xh, Xv, slope.q, slope.p, _sector_state(ch, cv), DEFAULT_MAX_CELLS)
    return LeafSurface(slope, carrier, states, Xh, Xv, False, Xv)


def leaf_invariance_check(leaf, generators):
    """True iff every map in ``generators`` carries ``leaf`` to itself diagonally.

    Leaves of one slope are disjoint away from cone pairs and the diagonal
    image of a leaf is again a leaf of the same slope, so it suffices to
    follow one regular point.
    """
    C = leaf.carrier
    probe = C.center(0)
    ph, pv = leaf.pr_h(probe), leaf.pr_v(probe)
    for f in generators:
        if not leaf.contains(f.apply(ph), f.apply(pv)):
            return False
    return True


# -- automorphisms and quotients ----------------------------------------------


def translation_automorphisms(S):
    from .affine import find_affine_maps

    return find_affine_maps(S, (1, 0, 0, 1), first=False)


def map_order(f, limit=1000):
    """Order of an affine map, computed on the images of the cell centres."""
    S = f.surface
    start = [S.center(c) for c in range(S.n)]
    g = f
    for k in range(1, limit + 1):
        if g.images == start:
            return k
        g = f.compose(g)
    raise RuntimeError("order exceeds limit")


def quotient_by_cell_permutation(S, perm):
    """Quotient of ``S`` by a translation automorphism permuting its cells.

    Returns ``(quotient, cell_map)``.
    """
    orbit_of = [-1] * S.n
    orbits = []
    for c in range(S.n):
        if orbit_of[c] >= 0:
            continue
        k = len(orbits)
        orb = []
        d = c
        while orbit_of[d] < 0:
            orbit_of[d] = k
            orb.append(d)
            d = perm[d]
        orbits.append(orb)
    right = [orbit_of[S.right[o[0]]] for o in orbits]
    up = [orbit_of[S.up[o[0]]] for o in orbits]
    for o in orbits:
        for c in o:
            if orbit_of[S.right[c]] != right[orbit_of[c]] or orbit_of[S.up[c]] != up[orbit_of[c]]:
                raise SurfaceError("permutation does not commute with the gluings")
    Q = RectSurface([S.widths[o[0]] for o in orbits], [S.heights[o[0]] for o in orbits], right, up)
    return Q, orbit_of
