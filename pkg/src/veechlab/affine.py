"""Affine self-maps of rect surfaces.

An :class:`AffineMap` is stored as its derivative together with the images of
the cell centres.  A point ``p`` of cell ``c`` is mapped by developing the
segment ``A (p - centre_c)`` from the image of the centre, which is exact and
never meets a cone point before its end.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .cylinders import horizontal_cylinders
from .flow import germs, trace_germ, trace_segment
from .scalar import Mat2, as_scalar, simplify
from .surface import Point

__all__ = [
    "AffineMap",
    "NotParabolic",
    "dehn_twist",
    "apply",
    "apply_diag",
    "find_affine_maps",
    "is_in_veech_group",
    "involution",
    "fixed_points",
    "in_gamma2",
    "identity_map",
]


class NotParabolic(ValueError):
    pass


def _mat(A):
    if isinstance(A, Mat2):
        return A
    a, b, c, d = A
    return Mat2(a, b, c, d)


def _entries(A):
    return tuple(simplify(e) for e in A.entries())


def _mul(A, v):
    a, b, c, d = _entries(A)
    return (simplify(as_scalar(a * v[0] + b * v[1])), simplify(as_scalar(c * v[0] + d * v[1])))


class AffineMap:
    """Affine homeomorphism of ``surface`` with derivative ``derivative``.

    ``images[c]`` is the image of the centre of cell ``c``.  ``direct`` is an
    optional exact formula used instead of tracing (Dehn twists carry one).
    """

    def __init__(self, surface, derivative, images, name=None, direct=None):
        A = _mat(derivative)
        if A.det() != 1:
            raise ValueError("derivative must have determinant 1")
        self.surface = surface
        self.derivative = A
        self.images = [surface.point(*q) for q in images]
        self.name = name
        self._direct = direct

    def __call__(self, p):
        return self.apply(p)

    def apply(self, p):
        S = self.surface
        p = S.point(*p)
        if self._direct is not None:
            return self._direct(p)
        return self._apply_traced(p)

    def _apply_traced(self, p):
        S = self.surface
        c = p.cell
        d = (p.x - S.widths[c] / 2, p.y - S.heights[c] / 2)
        res = trace_segment(S, self.images[c], _mul(self.derivative, d))
        if res.terminal not in ("end", "cone") or res.t != 1:
            raise RuntimeError("affine image segment met a cone point")
        return res.end

    def compose(self, other):
        """``self o other``."""
        images = [self.apply(q) for q in other.images]
        return AffineMap(self.surface, self.derivative @ other.derivative, images)

    def __matmul__(self, other):
        return self.compose(other)

    def power(self, k):
        if k < 0:
            return self.inverse().power(-k)
        result = identity_map(self.surface)
        for _ in range(k):
            result = self.compose(result)
        return result

    def inverse(self):
        inv_direct = getattr(self, "_inverse_direct", None)
        if inv_direct is not None:
            return inv_direct()
        S = self.surface
        target = S.center(0)
        for g in find_affine_maps(S, self.derivative.inverse(), first=False):
            if g.apply(self.images[0]) == target:
                return g
        raise RuntimeError("no inverse found")

    def same_as(self, other):
        return self.derivative == other.derivative and self.images == other.images

    def grid_permutation(self):
        """Cell permutation if every centre maps to a centre, else None."""
        S = self.surface
        perm = []
        for q in self.images:
            if q.x * 2 != S.widths[q.cell] or q.y * 2 != S.heights[q.cell]:
                return None
            perm.append(q.cell)
        return perm

    def __repr__(self):
        return f"AffineMap({self.name or _entries(self.derivative)})"


def identity_map(S):
    return AffineMap(S, Mat2.identity(), [S.center(c) for c in range(S.n)], name="id",
                     direct=lambda p: p)


def apply(f, p):
    return f.apply(p)


def apply_diag(f, pair):
    """Diagonal action on pairs of points."""
    p, q = pair
    return f.apply(p), f.apply(q)


# -- Dehn twists ---------------------------------------------------------------------------


def _rational_lcm(values):
    num = 1
    den = 0
    for v in values:
        v = Fraction(v)
        num = num * v.numerator // math.gcd(num, v.numerator)
        den = math.gcd(den, v.denominator)
    return Fraction(num, den)


def _twist_data(S):
    cyls = horizontal_cylinders(S)
    inv_moduli = [simplify(as_scalar(c.circumference2 / c.area)) for c in cyls]
    base = inv_moduli[0]
    ratios = [simplify(as_scalar(m / base)) for m in inv_moduli]
    if not all(isinstance(r, Fraction) for r in ratios):
        raise NotParabolic("moduli are not commensurable")
    shear = simplify(as_scalar(base * _rational_lcm(ratios)))
    return cyls, shear


def _horizontal_twist_fn(S, cyls, shear):
    where = {}
    rows = {}
    for k, cyl in enumerate(cyls):
        for c, (s0, eta0) in cyl.coords.items():
            where[c] = (k, s0, eta0)
            rows.setdefault((k, eta0), []).append((s0, c))
    for key in rows:
        rows[key].sort()
    circ = [c.holonomy[0] for c in cyls]

    def fn(p):
        k, s0, eta0 = where[p.cell]
        s = s0 + p.x + shear * (eta0 + p.y)
        c = circ[k]
        s = simplify(as_scalar(s - c * math.floor(s / c)))
        row = rows[(k, eta0)]
        cell = row[0][1]
        for s_start, cc in row:
            if s_start <= s:
                cell = cc
            else:
                break
        start = dict((cc, ss) for ss, cc in row)[cell]
        return S.point(cell, s - start, p.y)

    return fn


def dehn_twist(S, direction="h", power=1):
    """Minimal affine multitwist in the horizontal (``"h"``) or vertical (``"v"``) direction.

    The shear ``a`` is the least positive number making every cylinder's
    twist an integral power of its full Dehn twist.
    """
    if direction in ("h", (1, 0)):
        cyls, shear = _twist_data(S)
        a = shear * power
        fn = _horizontal_twist_fn(S, cyls, a)
        images = [fn(S.center(c)) for c in range(S.n)]
        f = AffineMap(S, Mat2(1, a, 0, 1), images, name=f"T_h^{power}", direct=fn)
        f._inverse_direct = lambda: dehn_twist(S, "h", -power)
        f.shear = shear
        return f
    if direction in ("v", (0, 1)):
        T = S.transpose()
        cyls, shear = _twist_data(T)
        a = shear * power
        fn_t = _horizontal_twist_fn(T, cyls, a)

        def fn(p):
            q = fn_t(T.point(p.cell, p.y, p.x))
            return S.point(q.cell, q.y, q.x)

        images = [fn(S.center(c)) for c in range(S.n)]
        f = AffineMap(S, Mat2(1, 0, a, 1), images, name=f"T_v^{power}", direct=fn)
        f._inverse_direct = lambda: dehn_twist(S, "v", -power)
        f.shear = shear
        return f
    raise NotParabolic("only the horizontal and vertical directions are supported")


# -- isomorphism search --------------------------------------------------------------------------


def _check_field(S, A):
    for e in A.entries():
        if e.b and S.field and e.d != S.field:
            raise ValueError("matrix entries outside the surface's field")
        if e.b and not S.field:
            raise ValueError("matrix entries outside the surface's field")


def find_affine_maps(S, A, first=True):
    """Affine maps of ``S`` with derivative ``A`` (all of them unless ``first``)."""
    A = _mat(A)
    if A.det() != 1:
        raise ValueError("matrix must have determinant 1")
    _check_field(S, A)
    # anchor: the corner of cell 0 (or the least cell at a cone point)
    cones = [v for v, o in enumerate(S.vertex_order) if o > 1]
    if cones:
        v0 = cones[0]
        targets = [v for v in cones if S.vertex_order[v] == S.vertex_order[v0]]
    else:
        v0 = S.vertex_of[0]
        targets = [v0] + [v for v in range(len(S.vertex_order)) if v != v0]
    c0 = S.vertex_cycles[v0][0]
    d0 = _mul(A, (S.widths[c0] / 2, S.heights[c0] / 2))
    found = []
    for v1 in targets:
        for g in germs(S, v1, d0):
            res = trace_germ(S, g, d0, t_end=Fraction(1))
            if res.terminal != "end":
                continue
            f = _extend(S, A, c0, res.end)
            if f is not None:
                if not any(f.images == h.images for h in found):
                    found.append(f)
                if first:
                    return found
        if not cones:
            # without cone points every translate works; one suffices
            if found and first:
                return found
    return found


def _extend(S, A, c0, image0):
    images = {c0: image0}
    queue = [c0]
    for c in queue:
        for nb, hol in (
            (S.right[c], ((S.widths[c] + S.widths[S.right[c]]) / 2, Fraction(0))),
            (S.up[c], (Fraction(0), (S.heights[c] + S.heights[S.up[c]]) / 2)),
            (S.left[c], (-(S.widths[c] + S.widths[S.left[c]]) / 2, Fraction(0))),
            (S.down[c], (Fraction(0), -(S.heights[c] + S.heights[S.down[c]]) / 2)),
        ):
            res = trace_segment(S, images[c], _mul(A, hol))
            if res.terminal != "end":
                return None
            if nb in images:
                if images[nb] != res.end:
                    return None
            else:
                images[nb] = res.end
                queue.append(nb)
    return AffineMap(S, A, [images[c] for c in range(S.n)])


def is_in_veech_group(S, A):
    return bool(find_affine_maps(S, A, first=True))


def involution(S):
    """An affine map with derivative ``-I`` and whether it is the only one.

    Returns ``(map, unique)`` or ``(None, False)``.
    """
    maps = find_affine_maps(S, Mat2(-1, 0, 0, -1), first=False)
    if not maps:
        return None, False
    return maps[0], len(maps) == 1


def fixed_points(f):
    """Fixed points of an involution with derivative ``-I`` permuting the cells."""
    S = f.surface
    if _entries(f.derivative) != (-1, 0, 0, -1):
        raise ValueError("fixed point solver expects derivative -I")
    sigma = f.grid_permutation()
    if sigma is None:
        raise NotImplementedError("involution does not permute the cells")
    pts = []
    for c in range(S.n):
        if sigma[c] == c:
            pts.append(S.center(c))
        if sigma[c] == S.right[c]:
            pts.append(S.point(c, S.widths[c], S.heights[c] / 2))
        if sigma[c] == S.up[c]:
            pts.append(S.point(c, S.widths[c] / 2, S.heights[c]))
    for v, cyc in enumerate(S.vertex_cycles):
        c = cyc[0]
        # the bottom-left corner of c goes to the top-right corner of sigma(c)
        if S.corner_vertex(sigma[c], "tr") == v:
            pts.append(S.vertex_point(v))
    return sorted(set(pts), key=lambda p: (p.cell, p.x, p.y))


def in_gamma2(A):
    """Principal congruence subgroup of level 2: integral, det 1, A = I mod 2."""
    A = _mat(A)
    if not A.is_integral():
        raise ValueError("matrix entries must be integers")
    if A.det() != 1:
        raise ValueError("matrix must have determinant 1")
    a, b, c, d = (int(e.a) for e in A.entries())
    return a % 2 == 1 and d % 2 == 1 and b % 2 == 0 and c % 2 == 0
