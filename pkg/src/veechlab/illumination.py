"""Illumination: straight segments between regular points.

``p`` illuminates ``q`` when a straight segment from ``p`` to ``q`` avoids
every cone point.  The search here is exhaustive up to a length bound; a
negative answer is only ever certified by covering or fixed-point arguments.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .affine import dehn_twist, fixed_points, involution
from .cylinders import rectangle_decomposition
from .flow import _cell_reps, trace_segment, visible_targets
from .scalar import as_scalar, simplify
from .surface import Point, RectSurface, cover_lifts, cover_project

__all__ = [
    "Illuminated",
    "BlockedUpTo",
    "BlockedCertified",
    "illuminates",
    "self_illuminates",
    "replay",
    "map_certificate",
    "blocked_certify_covering",
    "covering_partners",
    "has_covering_structure",
    "OffDiagonalReport",
    "offdiagonal_blocked_pairs",
    "VHPath",
    "vh_path",
    "Certificate",
    "Exhausted",
    "twist_reduce",
    "random_rational_point",
]


@dataclass(frozen=True)
class Illuminated:
    start: Point
    end: Point
    holonomy: tuple
    cells: tuple

    @property
    def label(self):
        return "Illuminated"


@dataclass(frozen=True)
class BlockedUpTo:
    length: object

    @property
    def label(self):
        return f"BlockedUpTo({self.length})"


@dataclass(frozen=True)
class BlockedCertified:
    reason: str
    detail: str = ""

    @property
    def label(self):
        return f"BlockedCertified({self.reason})"


def _require_rect(S):
    if not isinstance(S, RectSurface):
        raise TypeError("illumination works on rect surfaces; convert polygon surfaces first")


def _check_regular(S, *points):
    out = []
    for p in points:
        p = S.point(*p)
        if S.is_cone(p):
            raise ValueError("point is a cone point")
        out.append(p)
    return out


def _candidates(S, p, q, L):
    """Holonomies of all developed copies of ``q`` within distance ``L`` of ``p``."""
    side = S.uniform_cell()
    L = simplify(as_scalar(L))
    if side is not None and isinstance(L, Fraction):
        dx, dy = q.x - p.x, q.y - p.y
        r = int(L / side) + 2
        out = []
        for i in range(-r, r + 1):
            for j in range(-r, r + 1):
                v = (dx + i * side, dy + j * side)
                if (v[0] or v[1]) and v[0] * v[0] + v[1] * v[1] <= L * L:
                    out.append(v)
        out.sort(key=lambda v: (v[0] * v[0] + v[1] * v[1], v[0], v[1]))
        return out
    reps = _cell_reps(S, q)

    def want(cell, origin):
        return [(simplify(as_scalar(origin[0] + x)), simplify(as_scalar(origin[1] + y)))
                for c, x, y in reps if c == cell]

    return visible_targets(S, p, L, want)


def illuminates(S, p, q, L_max):
    """Search for a segment from ``p`` to ``q`` of length at most ``L_max``.

    Candidates are tried shortest first (ties broken lexicographically) and
    each one is checked by exact tracing.
    """
    _require_rect(S)
    p, q = _check_regular(S, p, q)
    for v in _candidates(S, p, q, L_max):
        res = trace_segment(S, p, v)
        if res.terminal == "end" and res.end == q:
            return Illuminated(p, q, tuple(v), tuple(res.cells))
    return BlockedUpTo(L_max)


def self_illuminates(S, p, L_max):
    """Closed regular geodesic through ``p`` of length at most ``L_max``."""
    return illuminates(S, p, p, L_max)


def replay(S, verdict):
    """Re-trace an :class:`Illuminated` certificate; True iff it checks out."""
    res = trace_segment(S, verdict.start, verdict.holonomy)
    return res.terminal == "end" and res.end == verdict.end and tuple(res.cells) == verdict.cells


def map_certificate(f, verdict):
    """Image of a segment under an affine map, re-traced on the surface."""
    S = f.surface
    a, b, c, d = (simplify(e) for e in f.derivative.entries())
    vx, vy = verdict.holonomy
    v = (simplify(as_scalar(a * vx + b * vy)), simplify(as_scalar(c * vx + d * vy)))
    p, q = f.apply(verdict.start), f.apply(verdict.end)
    res = trace_segment(S, p, v)
    if res.terminal != "end" or res.end != q:
        raise RuntimeError("image of a valid segment failed to trace")
    return Illuminated(p, q, v, tuple(res.cells))


# -- covering certificates --------------------------------------------------------------


def has_covering_structure(S):
    return "cover" in S.meta or "double_cover" in S.meta


def _torus_projection(S, p):
    data = S.meta["cover"]
    m = data["lattice"]
    ox, oy = data["offsets"][p.cell]
    return ((ox + p.x) % m, (oy + p.y) % m)


def covering_partners(S, p):
    """Regular points ``q`` whose image is the partner of the image of ``p``.

    For a staircase these are the ``pi^-1(-pi(p))``; for an LC cover the two
    lifts of ``phi(pi(p))``.
    """
    p = S.point(*p)
    if "cover" in S.meta:
        m = S.meta["cover"]["lattice"]
        x, y = _torus_projection(S, p)
        tx, ty = (-x) % m, (-y) % m
        out = []
        for c, (ox, oy) in enumerate(S.meta["cover"]["offsets"]):
            lx, ly = (tx - ox) % m, (ty - oy) % m
            if lx < S.widths[c] and ly < S.heights[c]:
                out.append(S.point(c, lx, ly))
        return sorted(set(out))
    if "double_cover" in S.meta:
        phi = _base_involution(S)
        return sorted(set(cover_lifts(S, phi.apply(cover_project(S, p)))))
    raise ValueError("surface lacks covering structure")


def _base_involution(S):
    cache = S.meta["double_cover"]
    if "_phi" not in cache:
        phi, _ = involution(cache["base"])
        cache["_phi"] = phi
    return cache["_phi"]


def blocked_certify_covering(S, p, q):
    """True iff the pair is blocked by the covering argument.

    Staircase: ``pi(q) = -pi(p)`` in the torus ``R^2/mZ^2`` whose
    two-torsion points all lift to cone points.  LC cover: ``q`` lies over
    ``phi(pi(p))`` and every preimage of a fixed point of ``phi`` is a cone
    point.
    """
    p, q = S.point(*p), S.point(*q)
    if S.is_cone(p) or S.is_cone(q):
        return False
    if "cover" in S.meta:
        m = S.meta["cover"]["lattice"]
        if not _two_torsion_singular(S):
            return False
        x, y = _torus_projection(S, p)
        u, w = _torus_projection(S, q)
        return (x + u) % m == 0 and (y + w) % m == 0
    if "double_cover" in S.meta:
        phi = _base_involution(S)
        a, b = cover_project(S, p), cover_project(S, q)
        if phi.apply(a) != b:
            return False
        for f in fixed_points(phi):
            if not all(S.is_cone(x) for x in cover_lifts(S, f)):
                return False
        return True
    raise ValueError("surface lacks covering structure")


def _two_torsion_singular(S):
    """Every point over a two-torsion point of the base torus is a cone point."""
    data = S.meta["cover"]
    half = Fraction(data["lattice"], 2)
    for c, (ox, oy) in enumerate(data["offsets"]):
        x = (-ox) % half
        while x < S.widths[c]:
            y = (-oy) % half
            while y < S.heights[c]:
                if not S.is_cone(S.point(c, x, y)):
                    return False
                y += half
            x += half
    return True


# -- off-diagonal family --------------------------------------------------------------


@dataclass
class OffDiagonalReport:
    status: str
    witness: object
    fixed_points: list
    involution: object
    unique: bool

    def pairs(self, points):
        """The off-diagonal pairs ``(p, phi(p))`` over the given points."""
        return [(p, self.involution.apply(p)) for p in points]


def offdiagonal_blocked_pairs(S):
    phi, unique = involution(S)
    if phi is None:
        raise ValueError("surface has no affine involution")
    fix = fixed_points(phi)
    regular = [p for p in fix if not S.is_cone(p)]
    if regular:
        return OffDiagonalReport("RegularFixExists", regular[0], fix, phi, unique)
    return OffDiagonalReport("AllFixSingular", None, fix, phi, unique)


# -- VH paths -------------------------------------------------------------------------------


@dataclass
class VHPath:
    rectangles: list
    moves: list
    turning_points: list = field(default_factory=list)

    @property
    def length(self):
        return len(self.rectangles) - 1


def _rect_graph(R):
    adj = {r.id: [] for r in R.rectangles}
    for a in R.rectangles:
        for b in R.rectangles:
            if a.id == b.id:
                continue
            if a.horizontal == b.horizontal:
                adj[a.id].append((b.id, "h"))
            elif a.vertical == b.vertical:
                adj[a.id].append((b.id, "v"))
    return adj


def vh_path(S, p, q, decomposition=None):
    """Shortest chain of rectangles from ``R(p)`` to ``R(q)``, consecutive ones
    sharing a cylinder, with the turning points of a VH-path along it."""
    R = decomposition or rectangle_decomposition(S)
    p, q = S.point(*p), S.point(*q)
    r0, r1 = R.rectangle(p), R.rectangle(q)
    adj = _rect_graph(R)
    prev = {r0: None}
    queue = deque([r0])
    while queue:
        a = queue.popleft()
        if a == r1:
            break
        for b, kind in adj[a]:
            if b not in prev:
                prev[b] = (a, kind)
                queue.append(b)
    chain, moves = [r1], []
    while prev[chain[-1]] is not None:
        a, kind = prev[chain[-1]]
        moves.append(kind)
        chain.append(a)
    chain.reverse()
    moves.reverse()
    return VHPath(chain, moves, _turning_points(S, R, p, chain, moves))


def _turning_points(S, R, p, chain, moves):
    hc = {c: (k, cyl.coords[c]) for k, cyl in enumerate(R.horizontal) for c in cyl.cells}
    vc = {c: (k, cyl.coords[c]) for k, cyl in enumerate(R.vertical) for c in cyl.cells}
    cur = p
    out = []
    for rid, kind in zip(chain[1:], moves):
        cells = R.rectangles[rid].cells
        if kind == "h":
            k, (_, eta) = hc[cur.cell]
            c = next(c for c in cells if hc[c][0] == k and hc[c][1][1] == eta)
            cur = S.point(c, S.widths[c] / 2, cur.y)
        else:
            k, (_, eta) = vc[cur.cell]
            c = next(c for c in cells if vc[c][0] == k and vc[c][1][1] == eta)
            cur = S.point(c, cur.x, S.heights[c] / 2)
        out.append(cur)
    return out


# -- twist reduction ------------------------------------------------------------------------


@dataclass
class Certificate:
    word: tuple
    image_pair: tuple
    image_holonomy: tuple
    holonomy: tuple
    colocation: str = "rectangle"  # or "cylinder"


@dataclass
class Exhausted:
    closed: bool
    states: int


class _Colocator:
    """Straight segments between two points sharing a rectangle or a cylinder.

    A rectangle is convex, and so is the universal cover of an open cylinder,
    so such pairs are joined by a segment that stays inside; boundary cases
    are settled by tracing.
    """

    def __init__(self, S):
        self.S = S
        self.R = R = rectangle_decomposition(S)
        self.hc = {c: (k, cyl.coords[c], cyl.holonomy[0]) for k, cyl in enumerate(R.horizontal) for c in cyl.cells}
        self.vc = {c: (k, cyl.coords[c], cyl.holonomy[1]) for k, cyl in enumerate(R.vertical) for c in cyl.cells}

    def _valid(self, p, q, v):
        if not v[0] and not v[1]:
            return False
        res = trace_segment(self.S, p, v)
        return res.terminal == "end" and res.end == q

    def in_rectangle(self, p, q):
        R = self.R
        if R.same_rectangle(p, q):
            xp, yp = R.local_coords(p)
            xq, yq = R.local_coords(q)
            v = (xq - xp, yq - yp)
            if self._valid(p, q, v):
                return v
        return None

    def in_cylinder(self, p, q):
        for table, flip in ((self.hc, False), (self.vc, True)):
            kp, (sp, ep), circ = table[p.cell]
            kq, (sq, eq), _ = table[q.cell]
            if kp != kq:
                continue
            along_p, across_p = (p.y, p.x) if flip else (p.x, p.y)
            along_q, across_q = (q.y, q.x) if flip else (q.x, q.y)
            ds = (sq + along_q) - (sp + along_p)
            de = (eq + across_q) - (ep + across_p)
            m0 = math.floor(-ds / circ)
            shifts = sorted((ds + m * circ for m in (m0 - 1, m0, m0 + 1, m0 + 2)), key=abs)
            for s in shifts:
                v = (de, s) if flip else (s, de)
                if self._valid(p, q, v):
                    return v
        return None


def twist_reduce(S, p, q, budget=100_000):
    """Search words in the twists ``T_h^{+-1}, T_v^{+-1}`` that bring ``p`` and
    ``q`` into one rectangle, by breadth-first search over the pair orbit.

    If the whole orbit is explored without a shared rectangle, the first pair
    found sharing a horizontal or vertical cylinder is used instead.  The
    segment joining the images is pulled back to a segment from ``p`` to ``q``.
    """
    p, q = S.point(*p), S.point(*q)
    coloc = _Colocator(S)
    gens = {}
    for name, direction, power in (("Th", "h", 1), ("Th^-1", "h", -1), ("Tv", "v", 1), ("Tv^-1", "v", -1)):
        gens[name] = dehn_twist(S, direction, power)
    start = (p, q)
    prev = {start: None}
    queue = deque([start])
    fallback = None
    while queue:
        pair = queue.popleft()
        v = coloc.in_rectangle(*pair)
        if v is not None:
            return _certificate(S, gens, prev, pair, v, "rectangle")
        if fallback is None:
            w = coloc.in_cylinder(*pair)
            if w is not None:
                fallback = (pair, w)
        if len(prev) >= budget:
            if fallback is not None:
                return _certificate(S, gens, prev, *fallback, "cylinder")
            return Exhausted(False, len(prev))
        for name, f in gens.items():
            nxt = (f.apply(pair[0]), f.apply(pair[1]))
            if nxt not in prev:
                prev[nxt] = (pair, name)
                queue.append(nxt)
    if fallback is not None:
        return _certificate(S, gens, prev, *fallback, "cylinder")
    return Exhausted(True, len(prev))


def _certificate(S, gens, prev, pair, v, kind):
    word = []
    node = pair
    while prev[node] is not None:
        node, name = prev[node]
        word.append(name)
    word.reverse()
    p, q = node
    hol = _pull_back(gens, word, v)
    res = trace_segment(S, p, hol)
    if res.terminal != "end" or res.end != q:
        raise RuntimeError("pulled back segment failed to trace")
    return Certificate(tuple(word), pair, v, hol, kind)


def _pull_back(gens, word, v):
    # the word is applied left to right, so undo it from the last letter
    x, y = v
    for name in reversed(word):
        a, b, c, d = (simplify(e) for e in gens[name].derivative.entries())
        # inverse of (a b; c d) with determinant 1
        x, y = simplify(as_scalar(d * x - b * y)), simplify(as_scalar(-c * x + a * y))
    return (x, y)


def random_rational_point(S, rng, denominator=12):
    """A random regular point with coordinates in ``(1/denominator) Z``."""
    while True:
        c = rng.randrange(S.n)
        w, h = S.widths[c], S.heights[c]
        x = Fraction(rng.randrange(denominator), denominator) * w
        y = Fraction(rng.randrange(denominator), denominator) * h
        p = S.point(c, x, y)
        if not S.is_cone(p):
            return p
